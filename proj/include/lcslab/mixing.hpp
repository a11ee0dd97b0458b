#pragma once

#include "lcslab/hmm_model.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace lcslab {

struct BetaOptions {
  /// Largest number of joint atoms a single β evaluation may visit.
  std::uint64_t cap = 100'000'000;
  unsigned threads = 1;
};

struct BetaReport {
  std::size_t n = 0;
  double beta_xy = 0.0;
  std::optional<double> beta_zx_y;
  /// Number of joint atoms summed over.
  std::uint64_t cost = 0;
};

/// ½ Σ_{u,v ∈ Aⁿ} |P(X = u, Y = v) − P(X = u) P(Y = v)|.
BetaReport beta_xy_exact(const PairHMM& hmm, std::size_t n, const BetaOptions& opts = {});

/// Same coefficient between (Z, X)^(n) and Y^(n). When the model carries
/// X-side hidden labels, Z is the labelled component only.
double beta_zx_y_exact(const PairHMM& hmm, std::size_t n, const BetaOptions& opts = {});

struct BetaStarEstimate {
  /// Entry i holds β(i + 1), with beta_zx_y filled when it fits the cap.
  std::vector<BetaReport> sequence;
  /// β(n_max) of X vs Y; β is non-decreasing so this bounds β* from below.
  double beta_star_lower = 0.0;
  /// max of both coefficients at n_max, the conservative choice used by
  /// bound evaluation.
  double beta_star_conservative = 0.0;
};

BetaStarEstimate beta_star_estimate(const PairHMM& hmm, std::size_t n_max,
                                    const BetaOptions& opts = {});

struct AsymmetryReport {
  std::size_t n = 0;
  double h = 0.0;
  long argmax_m = 0;
};

/**
 * h(n) = max over m ∈ [−n, n] of Σ_{i=1}^{2n} w_m(i)·P(X_i ≠ Y_i) with
 * w_m(i) = [i ≤ n − m] + [i ≤ n + m]. For m ≥ 0 this is
 * 2 Σ_{i ≤ n−m} p_i + Σ_{n−m < i ≤ n+m} p_i; negative m mirror it.
 * Ties keep the smallest m.
 */
AsymmetryReport h_n(const PairHMM& hmm, std::size_t n);

}  // namespace lcslab
