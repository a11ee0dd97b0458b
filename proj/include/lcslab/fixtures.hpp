#pragma once

#include "lcslab/hmm_model.hpp"

#include <cstdint>

namespace lcslab::fixtures {

/// One state, every letter pair equally likely.
PairHMM uniform_pairs(std::size_t letters);

/// One state, X_i = Y_i uniform over the alphabet.
PairHMM diagonal_uniform(std::size_t letters);

/// One state, X_i ~ Bernoulli(p) and Y_i ~ Bernoulli(q) independent.
PairHMM bernoulli_pair(double p, double q);

/// One state, X always letter 0 and Y always letter 1.
PairHMM disjoint_support();

/// Two states, P = [[0.9, 0.1], [0.2, 0.8]], stationary start, symmetric
/// and entrywise-positive emissions.
PairHMM two_state_symmetric();

/// Same chain started from state 0, non-symmetric emissions.
PairHMM two_state_asymmetric();

/// P = [[0, 1], [0.5, 0.5]]: first positive power k = 2 with ε = 0.25.
PairHMM sparse_two_state();

/// Two independent copies of the two-state chain with emission rows
/// (0.8, 0.2) and (0.3, 0.7), stationary start.
TwoChainHMM independent_two_hmm();

/// Hidden state (x, y) on a 3-letter alphabet; x and y move independently
/// with rows 0 and 1 uniform, Y_1 = X_1 with X_1 ~ (1 − δ, δ, 0).
/// β(n) = 2δ(1 − δ) for every n.
PairHMM near_independent(double delta);

/// Entrywise-positive random model drawn from `seed`.
PairHMM random_pair_hmm(std::size_t states, std::size_t letters, std::uint64_t seed);

}  // namespace lcslab::fixtures
