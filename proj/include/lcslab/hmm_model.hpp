#pragma once

#include "lcslab/markov_core.hpp"
#include "lcslab/rng.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lcslab {

using Letter = std::uint16_t;
using Word = std::vector<Letter>;

enum class Side { X, Y };

// =============================================================================
// PairHMM
// =============================================================================

/**
 * Hidden chain Z whose state z emits a letter pair (x, y) with probability
 * E_z(x, y). `state_swap`, when present, declares an involution σ of the
 * hidden states under which swapping the two coordinates is a symmetry:
 * μ∘σ = μ, P(σz, σz') = P(z, z'), E_{σz} = E_zᵀ. Product constructions of
 * two identical independent HMMs carry one.
 */
class PairHMM {
 public:
  PairHMM(ChainSpec chain, std::vector<std::string> alphabet, std::vector<Matrix> emit,
          std::optional<std::vector<std::size_t>> state_swap = std::nullopt);

  const ChainSpec& chain() const noexcept { return chain_; }
  std::size_t states() const noexcept { return chain_.size(); }
  const std::vector<std::string>& alphabet() const noexcept { return alphabet_; }
  std::size_t alphabet_size() const noexcept { return alphabet_.size(); }
  const Matrix& emit(std::size_t z) const { return emit_.at(z); }
  const std::vector<Matrix>& emissions() const noexcept { return emit_; }
  const std::optional<std::vector<std::size_t>>& state_swap() const noexcept { return swap_; }

  /// Row z holds P(X = · | Z = z) (or Y).
  const Matrix& marginal_emissions(Side side) const noexcept {
    return side == Side::X ? emit_x_ : emit_y_;
  }

  /// Same model started from a different initial law.
  PairHMM with_initial(Vector mu) const;

  /// Label of the X-side hidden component of each state, for models built
  /// from two hidden chains. Absent means the whole state drives X.
  const std::optional<std::vector<std::size_t>>& x_hidden() const noexcept { return x_hidden_; }

  /// Same model with X-side hidden labels attached.
  PairHMM with_x_hidden(std::vector<std::size_t> labels) const;

 private:
  ChainSpec chain_;
  std::vector<std::string> alphabet_;
  std::vector<Matrix> emit_;
  std::optional<std::vector<std::size_t>> swap_;
  std::optional<std::vector<std::size_t>> x_hidden_;
  Matrix emit_x_;
  Matrix emit_y_;
};

/// Two independent single-emission HMMs sharing μ, P and emission vectors.
struct TwoChainHMM {
  ChainSpec chain;
  std::vector<std::string> alphabet;
  /// |S| × |A|, row z = emission law of state z.
  Matrix emit;
  bool independent = true;
};

struct ValidationReport {
  bool stochastic = false;
  bool symmetric = false;
  bool common_letter = false;
  bool identical_marginals = false;
};

struct SamplePath {
  std::vector<std::uint32_t> z;
  Word x;
  Word y;
  std::uint64_t seed = 0;
  std::optional<std::size_t> meeting_time;
};

struct CoupledSample {
  SamplePath from_mu;
  SamplePath from_pi;
  /// First 1-based index with equal hidden states; n + 1 when censored.
  std::size_t meeting_time = 0;
};

// =============================================================================
// Sampling
// =============================================================================

/**
 * Precomputed inverse-CDF tables for one model. Position i (0-based) of a
 * path consumes counters 2i (hidden move) and 2i + 1 (emission), so paths of
 * different lengths drawn with one seed share their prefixes.
 */
class PathSampler {
 public:
  explicit PathSampler(const PairHMM& hmm);

  /// Fills x, y (and z when non-null) with a length-n path from μ.
  void sample(std::size_t n, std::uint64_t seed, Word& x, Word& y,
              std::vector<std::uint32_t>* z = nullptr) const;

  CoupledSample coupled(std::size_t n, std::uint64_t seed) const;

 private:
  std::size_t states_;
  std::size_t letters_;
  std::vector<double> mu_cdf_;
  std::vector<double> pi_cdf_;
  std::vector<double> trans_cdf_;  // |S| rows of |S|
  std::vector<double> emit_cdf_;   // |S| rows of |A|²

  std::span<const double> trans_row(std::size_t z) const {
    return {trans_cdf_.data() + z * states_, states_};
  }
  std::span<const double> emit_row(std::size_t z) const {
    return {emit_cdf_.data() + z * letters_ * letters_, letters_ * letters_};
  }
};

/// Stream keys used for the μ-started and π-started copies.
inline std::uint64_t path_key(std::uint64_t seed) { return CounterRng::derive(seed, 0); }
inline std::uint64_t companion_key(std::uint64_t seed) { return CounterRng::derive(seed, 1); }

// =============================================================================
// Operations
// =============================================================================

ValidationReport validate(const PairHMM& hmm);

SamplePath sample_path(const PairHMM& hmm, std::size_t n, std::uint64_t seed);

/// Z from μ and Z̄ from π evolve independently until they first agree and
/// identically afterwards; emitted pairs are shared from the meeting time on.
CoupledSample coupled_sample(const PairHMM& hmm, std::size_t n, std::uint64_t seed);

/// P(X^(n) = u, Y^(n) = v) by the forward recursion.
double exact_law(const PairHMM& hmm, std::span<const Letter> u, std::span<const Letter> v);

/// P(X^(n) = u) or P(Y^(n) = u).
double marginal_law(const PairHMM& hmm, std::span<const Letter> u, Side side);

/// P(X_i ≠ Y_i), 1-based position i.
double p_mismatch(const PairHMM& hmm, std::size_t i);

/// P(X_i ≠ Y_i) for i = 1..count.
std::vector<double> mismatch_profile(const PairHMM& hmm, std::size_t count);

/// P(X_i = Y_i) under the stationary law.
double stationary_match_probability(const PairHMM& hmm);

/// The chain (Z_i, X_i, Y_i) on S × A × A, state index (z·|A| + x)·|A| + y.
ChainSpec product_chain(const PairHMM& hmm);

/// Pair model on S × S whose emission at (z, z') is e_z ⊗ e_z'.
PairHMM two_hmm_as_pair(const TwoChainHMM& two);

/// Doeblin constants of the hidden chain with p_match filled in as
/// min_z P(X_1 = Y_{k+1} | Z_1 = z).
DoeblinConstants doeblin_constants(const PairHMM& hmm, int max_k);

/// Visits every (u, v) ∈ Aⁿ × Aⁿ with its joint probability. Words are
/// handed over together with their base-|A| codes. The order is a fixed
/// depth-first order over letter pairs; restricting to pairs whose first
/// letters equal (first_x, first_y) yields one shard of that order.
using JointVisitor = std::function<void(std::span<const Letter> u, std::span<const Letter> v,
                                        std::size_t u_code, std::size_t v_code, double prob)>;
void for_each_joint(const PairHMM& hmm, std::size_t n, const JointVisitor& visit,
                    std::optional<std::pair<Letter, Letter>> first = std::nullopt);

/// P(X^(n) = u) for every u, indexed by base-|A| code.
std::vector<double> marginal_table(const PairHMM& hmm, std::size_t n, Side side);

/// |A|^e with overflow saturation at SIZE_MAX.
std::size_t saturating_pow(std::size_t base, std::size_t exponent);

}  // namespace lcslab
