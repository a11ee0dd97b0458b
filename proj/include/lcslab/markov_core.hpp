#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace lcslab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Row sums / nonnegativity tolerance for stochastic objects.
inline constexpr double kStochasticTol = 1e-12;
/// Fixed-point residual required of a stationary distribution.
inline constexpr double kStationaryTol = 1e-10;

// =============================================================================
// ChainSpec
// =============================================================================

/**
 * Finite, time-homogeneous Markov chain: named states, initial law `mu`,
 * row-stochastic transition matrix `P`. The stationary law is solved on
 * first request and cached; copies share the cache.
 */
class ChainSpec {
 public:
  /// Validates stochasticity; throws LabError(DimensionMismatch) on shape
  /// errors and LabError(PreconditionViolated) on non-stochastic input.
  ChainSpec(std::vector<std::string> states, Vector mu, Matrix P);

  /// Convenience constructor naming states s0, s1, ...
  ChainSpec(Vector mu, Matrix P);

  std::size_t size() const noexcept { return states_.size(); }
  const std::vector<std::string>& states() const noexcept { return states_; }
  const Vector& mu() const noexcept { return mu_; }
  const Matrix& P() const noexcept { return P_; }

  /// Cached stationary distribution; throws NotIrreducible if the chain has
  /// more than one closed communicating class.
  const Vector& pi() const;

  /// True when ‖μ − π‖₁ ≤ 1e-12.
  bool starts_stationary() const;

  /// Same P, different initial law.
  ChainSpec with_initial(Vector mu) const;

 private:
  struct PiCache {
    std::once_flag once;
    Vector pi;
    std::exception_ptr error;
  };

  std::vector<std::string> states_;
  Vector mu_;
  Matrix P_;
  std::shared_ptr<PiCache> cache_;
};

// =============================================================================
// Reports
// =============================================================================

struct StructureReport {
  bool irreducible = false;
  bool aperiodic = false;
  /// Period of state 0 when irreducible, 0 otherwise.
  int period = 0;
  /// Number of closed communicating classes of the support digraph.
  int closed_classes = 0;
};

struct MixingReport {
  double epsilon = 0.0;
  long tau_eps = 0;
  double tau_min = 0.0;
  double A = 0.0;
};

struct DoeblinConstants {
  int k = 0;
  double eps = 0.0;
  double alpha = 0.0;
  double c = 0.0;
  /// Lower bound p on P(X_j = Y_{j+k}); only available once an emission
  /// model is attached (see hmm_model).
  std::optional<double> p_match;

  /// c·α^K, the meeting-time tail bound.
  double tail_bound(double K) const;
};

struct MixingOptions {
  long iteration_cap = 1'000'000;
  /// ε-grid {0, 1/grid, ..., (grid−1)/grid} used by tau_min.
  int grid = 100;
};

// =============================================================================
// Operations
// =============================================================================

Vector stationary_distribution(const Matrix& P);

StructureReport check_irreducible_aperiodic(const Matrix& P);

/// ½ Σ |μ(x) − ν(x)|.
double tv_distance(const Vector& mu, const Vector& nu);

/// P^t by repeated squaring, rows renormalized after every multiply.
Matrix matrix_power(const Matrix& P, long t);

/// max over state pairs of d_TV between rows of P^t.
double dbar(const ChainSpec& chain, long t);
double dbar_of_power(const Matrix& Pt);

/// Smallest t ≥ 1 with d̄(t) ≤ ε.
long mixing_time(const ChainSpec& chain, double eps, const MixingOptions& opts = {});

/// Minimizes τ(ε)((2−ε)/(1−ε))² over the ε-grid.
MixingReport tau_min(const ChainSpec& chain, const MixingOptions& opts = {});

/// Smallest k ≤ max_k with P^k entrywise positive, and the derived
/// Doeblin decay constants.
DoeblinConstants doeblin_constants(const ChainSpec& chain, int max_k);

/// Wielandt's bound (|S|−1)² + 1 on the primitivity exponent.
int default_max_k(std::size_t states);

}  // namespace lcslab
