#include "lcslab/mixing.hpp"

#include "lcslab/error.hpp"
#include "lcslab/numeric.hpp"
#include "lcslab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lcslab {

namespace {

std::uint64_t checked_cost(std::size_t base, std::size_t n, std::uint64_t cap, const char* what) {
  const std::size_t cost = saturating_pow(base, n);
  if (cost > cap) {
    throw LabError(ErrorKind::EnumerationCapExceeded,
                   std::string(what) + " needs " + std::to_string(cost) +
                       " joint atoms, cap is " + std::to_string(cap));
  }
  return cost;
}

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

BetaReport beta_xy_exact(const PairHMM& hmm, std::size_t n, const BetaOptions& opts) {
  if (n < 1) throw LabError(ErrorKind::PreconditionViolated, "beta needs n >= 1");
  const std::size_t A = hmm.alphabet_size();
  BetaReport report;
  report.n = n;
  report.cost = checked_cost(A * A, n, opts.cap, "beta_xy");

  const auto px = marginal_table(hmm, n, Side::X);
  const auto py = marginal_table(hmm, n, Side::Y);
  std::vector<CompensatedSum> shard(A * A);
  parallel_for(A * A, opts.threads, [&](std::size_t s) {
    const std::pair<Letter, Letter> first{static_cast<Letter>(s / A), static_cast<Letter>(s % A)};
    CompensatedSum& acc = shard[s];
    for_each_joint(
        hmm, n,
        [&](std::span<const Letter>, std::span<const Letter>, std::size_t uc, std::size_t vc,
            double p) { acc.add(std::abs(p - px[uc] * py[vc])); },
        first);
  });
  CompensatedSum total;
  for (const auto& s : shard) total.add(s);
  report.beta_xy = clamp_unit(0.5 * total.value());
  return report;
}

double beta_zx_y_exact(const PairHMM& hmm, std::size_t n, const BetaOptions& opts) {
  if (n < 1) throw LabError(ErrorKind::PreconditionViolated, "beta needs n >= 1");
  const std::size_t A = hmm.alphabet_size();
  const std::size_t S = hmm.states();
  const auto Si = static_cast<Eigen::Index>(S);
  // Hidden atoms on the X side: whole states unless labels say otherwise.
  std::vector<std::size_t> label(S);
  for (std::size_t z = 0; z < S; ++z) label[z] = hmm.x_hidden() ? (*hmm.x_hidden())[z] : z;
  const std::size_t W = *std::max_element(label.begin(), label.end()) + 1;
  checked_cost(W * A * A, n, opts.cap, "beta_zx_y");

  const auto py = marginal_table(hmm, n, Side::Y);
  const Matrix& ex = hmm.marginal_emissions(Side::X);
  const Matrix Pt = hmm.chain().P().transpose();
  // mask[w](z) = 1 when state z carries label w.
  std::vector<Vector> mask(W, Vector::Zero(Si));
  for (std::size_t z = 0; z < S; ++z) mask[label[z]][static_cast<Eigen::Index>(z)] = 1.0;
  std::vector<Vector> emit_xy(A * A, Vector(Si));
  for (std::size_t a = 0; a < A; ++a)
    for (std::size_t b = 0; b < A; ++b)
      for (std::size_t z = 0; z < S; ++z)
        emit_xy[a * A + b][static_cast<Eigen::Index>(z)] = hmm.emit(z)(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));

  std::vector<CompensatedSum> shard(W * A);
  parallel_for(W * A, opts.threads, [&](std::size_t s) {
    const std::size_t w0 = s / A;
    const std::size_t x0 = s % A;
    CompensatedSum& acc = shard[s];
    // Forward vectors of the (W, X) path alone and with Y appended.
    std::vector<Vector> pred_zx(n, hmm.chain().mu()), pred_joint(n, hmm.chain().mu());
    Vector a_joint(Si);
    const auto rec = [&](auto&& self, std::size_t depth, std::size_t ycode) -> void {
      for (std::size_t w = 0; w < W; ++w) {
        if (depth == 0 && w != w0) continue;
        for (std::size_t x = 0; x < A; ++x) {
          if (depth == 0 && x != x0) continue;
          const Vector zx = pred_zx[depth].cwiseProduct(mask[w]).cwiseProduct(ex.col(static_cast<Eigen::Index>(x)));
          const double p_zx = zx.sum();
          const Vector joint_w = pred_joint[depth].cwiseProduct(mask[w]);
          if (depth + 1 < n) pred_zx[depth + 1].noalias() = Pt * zx;
          for (std::size_t y = 0; y < A; ++y) {
            a_joint = joint_w.cwiseProduct(emit_xy[x * A + y]);
            const std::size_t yc = ycode * A + y;
            if (depth + 1 == n) {
              acc.add(std::abs(a_joint.sum() - p_zx * py[yc]));
            } else {
              pred_joint[depth + 1].noalias() = Pt * a_joint;
              self(self, depth + 1, yc);
            }
          }
        }
      }
    };
    rec(rec, 0, 0);
  });
  CompensatedSum total;
  for (const auto& s : shard) total.add(s);
  return clamp_unit(0.5 * total.value());
}

BetaStarEstimate beta_star_estimate(const PairHMM& hmm, std::size_t n_max, const BetaOptions& opts) {
  if (n_max < 1) throw LabError(ErrorKind::PreconditionViolated, "beta_star_estimate needs n_max >= 1");
  BetaStarEstimate out;
  std::size_t atoms = hmm.states();
  if (hmm.x_hidden()) atoms = *std::max_element(hmm.x_hidden()->begin(), hmm.x_hidden()->end()) + 1;
  const std::size_t zx_base = atoms * hmm.alphabet_size() * hmm.alphabet_size();
  for (std::size_t n = 1; n <= n_max; ++n) {
    BetaReport r = beta_xy_exact(hmm, n, opts);
    if (saturating_pow(zx_base, n) <= opts.cap) r.beta_zx_y = beta_zx_y_exact(hmm, n, opts);
    out.sequence.push_back(r);
  }
  const BetaReport& last = out.sequence.back();
  out.beta_star_lower = last.beta_xy;
  out.beta_star_conservative = std::max(last.beta_xy, last.beta_zx_y.value_or(0.0));
  return out;
}

AsymmetryReport h_n(const PairHMM& hmm, std::size_t n) {
  if (n < 1) throw LabError(ErrorKind::PreconditionViolated, "h_n needs n >= 1");
  const auto p = mismatch_profile(hmm, 2 * n);
  // prefix[j] = Σ_{i ≤ j} p_i; the weighted sum for m is prefix[n−m] + prefix[n+m].
  std::vector<double> prefix(2 * n + 1, 0.0);
  CompensatedSum run;
  for (std::size_t i = 0; i < 2 * n; ++i) {
    run.add(p[i]);
    prefix[i + 1] = run.value();
  }
  AsymmetryReport report;
  report.n = n;
  report.argmax_m = -static_cast<long>(n);
  report.h = -1.0;
  const long ln = static_cast<long>(n);
  for (long m = -ln; m <= ln; ++m) {
    const double g = prefix[static_cast<std::size_t>(ln - m)] + prefix[static_cast<std::size_t>(ln + m)];
    if (g > report.h) {
      report.h = g;
      report.argmax_m = m;
    }
  }
  return report;
}

}  // namespace lcslab
