#include "lcslab/estimators.hpp"

#include "lcslab/error.hpp"
#include "lcslab/mixing.hpp"
#include "lcslab/numeric.hpp"
#include "lcslab/parallel.hpp"
#include "lcslab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace lcslab {

namespace {

constexpr std::uint64_t kReplicateTag = 2;
constexpr std::uint64_t kPilotTag = 3;
constexpr std::uint64_t kGridTag = 4;
constexpr std::uint64_t kMainTag = 5;

struct Moments {
  double mean = 0.0;
  double std_err = 0.0;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  if (xs.empty()) return m;
  const auto count = static_cast<double>(xs.size());
  m.mean = pairwise_sum(xs) / count;
  if (xs.size() < 2) return m;
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - m.mean) * (xs[i] - m.mean);
  const double var = pairwise_sum(sq) / (count - 1.0);
  m.std_err = std::sqrt(var / count);
  return m;
}

double binomial_se(double p, std::size_t reps) {
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(reps));
}

void require_reps(std::size_t reps) {
  if (reps < 2) throw LabError(ErrorKind::PreconditionViolated, "need at least 2 replicates");
}

// Least squares for y = a + b·x.
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const auto count = static_cast<double>(x.size());
  const double mx = pairwise_sum(x) / count;
  const double my = pairwise_sum(y) / count;
  CompensatedSum sxy, sxx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy.add((x[i] - mx) * (y[i] - my));
    sxx.add((x[i] - mx) * (x[i] - mx));
  }
  const double b = sxx.value() > 0.0 ? sxy.value() / sxx.value() : 0.0;
  return {my - b * mx, b};
}

}  // namespace

std::uint64_t replicate_seed(std::uint64_t seed, std::size_t rep) {
  return CounterRng::derive(seed, kReplicateTag, rep);
}

double exact_mean_lc(const PairHMM& hmm, std::size_t n, const EstimatorOptions& opts) {
  if (n < 1) throw LabError(ErrorKind::PreconditionViolated, "exact_mean_lc needs n >= 1");
  const std::size_t A = hmm.alphabet_size();
  const std::size_t cost = saturating_pow(A * A, n);
  if (cost > opts.cap) {
    throw LabError(ErrorKind::EnumerationCapExceeded,
                   "exact_mean_lc needs " + std::to_string(cost) + " joint atoms, cap is " +
                       std::to_string(opts.cap));
  }
  std::vector<CompensatedSum> shard(A * A);
  parallel_for(A * A, opts.threads, [&](std::size_t s) {
    const std::pair<Letter, Letter> first{static_cast<Letter>(s / A), static_cast<Letter>(s % A)};
    for_each_joint(
        hmm, n,
        [&](std::span<const Letter> u, std::span<const Letter> v, std::size_t, std::size_t,
            double p) {
          if (p > 0.0) shard[s].add(p * static_cast<double>(lcs_length(u, v, opts.kernel).length));
        },
        first);
  });
  CompensatedSum total;
  for (const auto& s : shard) total.add(s);
  return total.value();
}

std::vector<std::uint64_t> lc_samples(const PairHMM& hmm, std::size_t n, std::size_t reps,
                                      std::uint64_t seed, const EstimatorOptions& opts) {
  if (n < 1) throw LabError(ErrorKind::PreconditionViolated, "LC samples need n >= 1");
  const PathSampler sampler(hmm);
  std::vector<std::uint64_t> out(reps);
  parallel_for(reps, opts.threads, [&](std::size_t i) {
    thread_local Word x, y;
    sampler.sample(n, replicate_seed(seed, i), x, y);
    out[i] = lcs_length(x, y, opts.kernel).length;
  });
  return out;
}

MeanLcEstimate mc_mean_lc(const PairHMM& hmm, std::size_t n, std::size_t reps, std::uint64_t seed,
                          const EstimatorOptions& opts) {
  require_reps(reps);
  const auto lc = lc_samples(hmm, n, reps, seed, opts);
  std::vector<double> ratio(reps);
  for (std::size_t i = 0; i < reps; ++i) ratio[i] = static_cast<double>(lc[i]) / static_cast<double>(n);
  const Moments m = moments(ratio);
  MeanLcEstimate est;
  est.n = n;
  est.reps = reps;
  est.mean = m.mean;
  est.std_err = m.std_err;
  est.seed = seed;
  return est;
}

GammaStarEstimate gamma_star_estimate(const PairHMM& hmm, std::span<const std::size_t> n_grid,
                                      std::size_t reps, std::uint64_t seed,
                                      const EstimatorOptions& opts) {
  const std::set<std::size_t> distinct(n_grid.begin(), n_grid.end());
  if (distinct.size() < 2) {
    throw LabError(ErrorKind::NeedTwoGridPoints, "gamma_star_estimate needs two distinct lengths");
  }
  GammaStarEstimate out;
  out.fekete_lower = -1.0;
  std::vector<double> x, y;
  for (std::size_t n : n_grid) {
    MeanLcEstimate m = mc_mean_lc(hmm, n, reps, CounterRng::derive(seed, kGridTag, n), opts);
    out.fekete_lower = std::max(out.fekete_lower, m.mean - 4.0 * m.std_err);
    x.push_back(std::sqrt(std::log(static_cast<double>(n)) / static_cast<double>(n)));
    y.push_back(m.mean);
    out.means.push_back(m);
  }
  const auto [a, b] = fit_line(x, y);
  out.gamma_hat = a;
  out.C_hat = -b;
  return out;
}

std::vector<double> default_t_grid(double A, std::size_t n) {
  std::vector<double> grid(20);
  const double top = 3.0 * A * std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = top * static_cast<double>(i) / 19.0;
  return grid;
}

HoeffdingReport hoeffding_tail_check(const PairHMM& hmm, std::size_t n, std::size_t reps,
                                     std::span<const double> t_grid, std::uint64_t seed,
                                     const EstimatorOptions& opts) {
  require_reps(reps);
  HoeffdingReport report;
  report.n = n;
  report.reps = reps;
  report.A = tau_min(hmm.chain()).A;

  const auto pilot = lc_samples(hmm, n, reps, CounterRng::derive(seed, kPilotTag), opts);
  std::vector<double> pv(pilot.begin(), pilot.end());
  report.center = pairwise_sum(pv) / static_cast<double>(reps);

  const auto main = lc_samples(hmm, n, reps, CounterRng::derive(seed, kMainTag), opts);
  std::vector<double> grid(t_grid.begin(), t_grid.end());
  if (grid.empty()) grid = default_t_grid(report.A, n);
  report.all_ok = true;
  for (double t : grid) {
    std::size_t hits = 0;
    for (auto v : main) hits += static_cast<double>(v) - report.center >= t ? 1 : 0;
    TailRow row;
    row.t = t;
    row.empirical = static_cast<double>(hits) / static_cast<double>(reps);
    row.std_err = binomial_se(row.empirical, reps);
    row.bound = std::exp(-t * t / (report.A * report.A * static_cast<double>(n)));
    row.ok = row.empirical <= row.bound + 3.0 * row.std_err;
    report.all_ok = report.all_ok && row.ok;
    report.rows.push_back(row);
  }
  return report;
}

CouplingReport coupling_decay_check(const PairHMM& hmm, std::size_t n, std::size_t reps,
                                    std::uint64_t seed, const EstimatorOptions& opts) {
  require_reps(reps);
  if (n < 1) throw LabError(ErrorKind::PreconditionViolated, "coupling check needs n >= 1");
  CouplingReport report;
  report.doeblin = doeblin_constants(hmm, default_max_k(hmm.states()));
  const std::size_t K_max = std::min<std::size_t>(n, 50);
  const PathSampler sampler(hmm);
  std::vector<std::size_t> meet(reps);
  parallel_for(reps, opts.threads, [&](std::size_t i) {
    meet[i] = sampler.coupled(K_max, replicate_seed(seed, i)).meeting_time;
  });

  std::vector<double> fx, fy;
  report.all_ok = true;
  for (std::size_t K = 1; K <= K_max; ++K) {
    std::size_t exceed = 0;
    for (auto t : meet) exceed += t > K ? 1 : 0;
    CouplingRow row;
    row.K = K;
    row.empirical = static_cast<double>(exceed) / static_cast<double>(reps);
    row.std_err = binomial_se(row.empirical, reps);
    row.bound = report.doeblin.tail_bound(static_cast<double>(K));
    row.ok = row.empirical <= row.bound + 3.0 * row.std_err;
    report.all_ok = report.all_ok && row.ok;
    report.rows.push_back(row);
    if (exceed >= 30) {
      fx.push_back(static_cast<double>(K));
      fy.push_back(std::log(row.empirical));
    }
  }
  if (fx.size() >= 2) report.log_slope = fit_line(fx, fy).second;
  return report;
}

RateBoundReport rate_bound_evaluate(const PairHMM& hmm, std::size_t n, const RateInputs& in) {
  if (n < 2) throw LabError(ErrorKind::PreconditionViolated, "rate bounds need n >= 2");
  RateBoundReport r;
  r.n = n;
  r.gamma_hat = in.gamma_hat;
  r.beta_star_lb = in.beta_star_lb;
  r.A = in.mixing.A;
  r.C = 2.0 * r.A * std::sqrt(10.0);
  r.c = in.doeblin.c;
  r.alpha = in.doeblin.alpha;
  r.stationary = hmm.chain().starts_stationary();
  r.symmetric = validate(hmm).symmetric;

  const double dn = static_cast<double>(n);
  const double root = std::sqrt(dn);
  const double coupling = r.stationary ? 0.0 : 1.0 / root + r.c * std::pow(r.alpha, root);
  r.lower = r.gamma_hat - 2.0 * r.beta_star_lb - r.C * std::sqrt(std::log(dn) / dn) - 2.0 / dn -
            coupling;
  if (!r.symmetric) {
    r.h_n = in.h_n ? *in.h_n : h_n(hmm, n).h;
    r.lower -= *r.h_n / dn;
  }
  r.upper = r.gamma_hat + coupling;
  return r;
}

SandwichReport sandwich_check(const PairHMM& hmm, std::span<const std::size_t> n_grid,
                              std::size_t reps, std::uint64_t seed, const EstimatorOptions& opts) {
  SandwichReport report;
  report.mixing = tau_min(hmm.chain());
  report.doeblin = doeblin_constants(hmm, default_max_k(hmm.states()));

  const std::size_t A = hmm.alphabet_size();
  std::size_t beta_n = 0;
  while (beta_n < 4 && saturating_pow(A * A, beta_n + 1) <= opts.cap) ++beta_n;
  if (beta_n > 0) {
    BetaOptions bo;
    bo.cap = opts.cap;
    bo.threads = opts.threads;
    report.beta_star_lb = beta_star_estimate(hmm, beta_n, bo).beta_star_conservative;
  }
  report.beta_n = beta_n;

  report.gamma = gamma_star_estimate(hmm, n_grid, reps, seed, opts);
  report.gamma_used = std::max(report.gamma.gamma_hat, report.gamma.fekete_lower);

  RateInputs in;
  in.gamma_hat = report.gamma_used;
  in.beta_star_lb = report.beta_star_lb;
  in.mixing = report.mixing;
  in.doeblin = report.doeblin;
  report.all_inside = true;
  for (const auto& m : report.gamma.means) {
    SandwichRow row;
    row.n = m.n;
    row.mean = m.mean;
    row.se = m.std_err;
    if (m.n >= 2) {
      const RateBoundReport b = rate_bound_evaluate(hmm, m.n, in);
      row.lower = b.lower;
      row.upper = b.upper;
    } else {
      row.lower = -std::numeric_limits<double>::infinity();
      row.upper = std::numeric_limits<double>::infinity();
    }
    row.inside = m.mean + 4.0 * m.std_err >= row.lower && m.mean - 4.0 * m.std_err <= row.upper;
    report.all_inside = report.all_inside && row.inside;
    report.rows.push_back(row);
  }
  return report;
}

StrictMatchReport strict_match_check(const PairHMM& hmm, std::size_t n, std::size_t reps,
                                     std::uint64_t seed, const EstimatorOptions& opts) {
  if (!validate(hmm).symmetric) {
    throw LabError(ErrorKind::PreconditionViolated, "strict match check needs a symmetric model");
  }
  for (const auto& e : hmm.emissions()) {
    if (e.minCoeff() <= 0.0) {
      throw LabError(ErrorKind::PreconditionViolated,
                     "strict match check needs every pair probability positive");
    }
  }
  if (!hmm.chain().starts_stationary()) {
    throw LabError(ErrorKind::PreconditionViolated, "strict match check needs a stationary start");
  }
  const MeanLcEstimate m = mc_mean_lc(hmm, n, reps, seed, opts);
  StrictMatchReport r;
  r.mean = m.mean;
  r.std_err = m.std_err;
  r.match_prob = stationary_match_probability(hmm);
  r.strict = m.mean - 4.0 * m.std_err > r.match_prob;
  return r;
}

}  // namespace lcslab
