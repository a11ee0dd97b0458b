#pragma once

#include "lcslab/hmm_model.hpp"
#include "lcslab/lcs_kernels.hpp"
#include "lcslab/markov_core.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace lcslab {

struct EstimatorOptions {
  unsigned threads = 1;
  LcsKernel kernel = LcsKernel::bit_parallel;
  /// Cap on joint atoms for exact enumeration (exact means, β).
  std::uint64_t cap = 100'000'000;
};

struct MeanLcEstimate {
  std::size_t n = 0;
  std::size_t reps = 0;
  /// Sample mean of LC_n / n.
  double mean = 0.0;
  double std_err = 0.0;
  /// E[LC_n] / n when computed by enumeration.
  std::optional<double> exact;
  std::uint64_t seed = 0;
  /// False when exact is present and |mean − exact| > 4·std_err.
  bool consistent = true;
};

/// Seed of replicate `rep` in a batch keyed by `seed`.
std::uint64_t replicate_seed(std::uint64_t seed, std::size_t rep);

/// E[LC_n] by summing exact_law(u, v)·LCS(u, v) over Aⁿ × Aⁿ.
double exact_mean_lc(const PairHMM& hmm, std::size_t n, const EstimatorOptions& opts = {});

/// LC_n / n over `reps` independent paths. Replicate i is drawn from
/// replicate_seed(seed, i), so the result does not depend on opts.threads.
MeanLcEstimate mc_mean_lc(const PairHMM& hmm, std::size_t n, std::size_t reps, std::uint64_t seed,
                          const EstimatorOptions& opts = {});

/// Raw LC_n values of the same replicates mc_mean_lc would draw.
std::vector<std::uint64_t> lc_samples(const PairHMM& hmm, std::size_t n, std::size_t reps,
                                      std::uint64_t seed, const EstimatorOptions& opts = {});

struct GammaStarEstimate {
  std::vector<MeanLcEstimate> means;
  /// max over the grid of mean − 4·SE.
  double fekete_lower = 0.0;
  /// Least-squares fit of mean(n) = gamma_hat − C_hat·√(ln n / n).
  double gamma_hat = 0.0;
  double C_hat = 0.0;
};

/// Per-grid-point batches use seed derive(seed, n). Throws NeedTwoGridPoints
/// when the grid has fewer than two distinct lengths.
GammaStarEstimate gamma_star_estimate(const PairHMM& hmm, std::span<const std::size_t> n_grid,
                                      std::size_t reps, std::uint64_t seed,
                                      const EstimatorOptions& opts = {});

struct TailRow {
  double t = 0.0;
  double empirical = 0.0;
  double std_err = 0.0;
  double bound = 0.0;
  bool ok = false;
};

struct HoeffdingReport {
  std::size_t n = 0;
  std::size_t reps = 0;
  double A = 0.0;
  /// E[LC_n] estimate from an independent pilot batch of the same size.
  double center = 0.0;
  std::vector<TailRow> rows;
  bool all_ok = false;
};

/// Twenty points spread over [0, 3A√n].
std::vector<double> default_t_grid(double A, std::size_t n);

/// Empirical P(LC_n − E[LC_n] ≥ t) against exp(−t²/(A²n)), A from tau_min
/// of the hidden chain. An empty t_grid selects default_t_grid.
HoeffdingReport hoeffding_tail_check(const PairHMM& hmm, std::size_t n, std::size_t reps,
                                     std::span<const double> t_grid, std::uint64_t seed,
                                     const EstimatorOptions& opts = {});

struct CouplingRow {
  std::size_t K = 0;
  double empirical = 0.0;
  double std_err = 0.0;
  double bound = 0.0;
  bool ok = false;
};

struct CouplingReport {
  DoeblinConstants doeblin;
  std::vector<CouplingRow> rows;
  /// Least-squares slope of ln P̂(τ > K) over rows with at least 30 exceedances.
  std::optional<double> log_slope;
  bool all_ok = false;
};

/// Empirical P(τ > K) for K = 1..min(n, 50) against c·α^K.
CouplingReport coupling_decay_check(const PairHMM& hmm, std::size_t n, std::size_t reps,
                                    std::uint64_t seed, const EstimatorOptions& opts = {});

struct RateInputs {
  double gamma_hat = 0.0;
  double beta_star_lb = 0.0;
  MixingReport mixing;
  DoeblinConstants doeblin;
  /// Computed from the model when absent and the model is not symmetric.
  std::optional<double> h_n;
};

struct RateBoundReport {
  std::size_t n = 0;
  double gamma_hat = 0.0;
  double beta_star_lb = 0.0;
  double C = 0.0;
  double A = 0.0;
  double c = 0.0;
  double alpha = 0.0;
  bool stationary = false;
  bool symmetric = false;
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> h_n;
};

/**
 * lower = γ̂ − 2β − C√(ln n/n) − 2/n − (1 − 1_{μ=π})(1/√n + cα^{√n}) [− h(n)/n]
 * upper = γ̂ + (1 − 1_{μ=π})(1/√n + cα^{√n})
 * with C = 2A√10. The h(n)/n term applies only to non-symmetric models.
 * Negative lower bounds are reported as they are.
 */
RateBoundReport rate_bound_evaluate(const PairHMM& hmm, std::size_t n, const RateInputs& in);

struct SandwichRow {
  std::size_t n = 0;
  double mean = 0.0;
  double se = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool inside = false;
};

struct SandwichReport {
  GammaStarEstimate gamma;
  /// The γ* estimate plugged into the bounds: max(gamma_hat, fekete_lower).
  double gamma_used = 0.0;
  double beta_star_lb = 0.0;
  std::size_t beta_n = 0;
  MixingReport mixing;
  DoeblinConstants doeblin;
  std::vector<SandwichRow> rows;
  bool all_inside = false;
};

/// β is taken at the largest n ≤ 4 whose enumeration fits opts.cap.
SandwichReport sandwich_check(const PairHMM& hmm, std::span<const std::size_t> n_grid,
                              std::size_t reps, std::uint64_t seed,
                              const EstimatorOptions& opts = {});

struct StrictMatchReport {
  double mean = 0.0;
  double std_err = 0.0;
  double match_prob = 0.0;
  bool strict = false;
};

/// Requires a symmetric model, entrywise-positive emissions and μ = π.
StrictMatchReport strict_match_check(const PairHMM& hmm, std::size_t n, std::size_t reps,
                                     std::uint64_t seed, const EstimatorOptions& opts = {});

}  // namespace lcslab
