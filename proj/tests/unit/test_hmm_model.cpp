#include "lcslab/error.hpp"
#include "lcslab/fixtures.hpp"
#include "lcslab/hmm_model.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace lcslab;
namespace fx = lcslab::fixtures;

namespace {

PairHMM single_state(Matrix E) {
  Vector mu(1);
  mu << 1.0;
  Matrix P(1, 1);
  P << 1.0;
  std::vector<std::string> alphabet;
  for (Eigen::Index a = 0; a < E.rows(); ++a) alphabet.push_back(std::string(1, static_cast<char>('a' + a)));
  return PairHMM(ChainSpec(mu, P), alphabet, {std::move(E)});
}

Matrix point_mass(int a, int b, int letters) {
  Matrix E = Matrix::Zero(letters, letters);
  E(a, b) = 1.0;
  return E;
}

std::vector<PairHMM> small_fixtures() {
  return {fx::uniform_pairs(2),        fx::diagonal_uniform(3),  fx::bernoulli_pair(1.0 / 3, 0.5),
          fx::two_state_symmetric(),   fx::two_state_asymmetric(), fx::sparse_two_state(),
          fx::random_pair_hmm(3, 2, 11)};
}

}  // namespace

TEST(Validate, UniformAllFlags) {
  const auto r = validate(fx::uniform_pairs(3));
  EXPECT_TRUE(r.stochastic);
  EXPECT_TRUE(r.symmetric);
  EXPECT_TRUE(r.common_letter);
  EXPECT_TRUE(r.identical_marginals);
}

TEST(Validate, Diagonal) {
  const auto r = validate(fx::diagonal_uniform(2));
  EXPECT_TRUE(r.symmetric);
  EXPECT_TRUE(r.common_letter);
}

TEST(Validate, OffDiagonalPointMass) {
  EXPECT_FALSE(validate(single_state(point_mass(0, 1, 2))).symmetric);
}

TEST(Validate, TwoHmmIsSymmetricThroughSwap) {
  const PairHMM pair = two_hmm_as_pair(fx::independent_two_hmm());
  EXPECT_EQ(pair.states(), 4u);
  EXPECT_TRUE(validate(pair).symmetric);
  EXPECT_TRUE(validate(pair).identical_marginals);
}

TEST(SamplePath, PointMassDiagonal) {
  const auto p = sample_path(single_state(point_mass(1, 1, 2)), 5, 7);
  EXPECT_EQ(p.x, (Word{1, 1, 1, 1, 1}));
  EXPECT_EQ(p.y, p.x);
}

TEST(SamplePath, Deterministic) {
  const PairHMM h = fx::two_state_asymmetric();
  const auto a = sample_path(h, 200, 42);
  const auto b = sample_path(h, 200, 42);
  EXPECT_EQ(a.z, b.z);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
  EXPECT_NE(sample_path(h, 200, 43).x, a.x);
}

TEST(SamplePath, PrefixStable) {
  const PairHMM h = fx::two_state_symmetric();
  const auto longer = sample_path(h, 100, 5);
  const auto shorter = sample_path(h, 40, 5);
  EXPECT_TRUE(std::equal(shorter.x.begin(), shorter.x.end(), longer.x.begin()));
  EXPECT_TRUE(std::equal(shorter.y.begin(), shorter.y.end(), longer.y.begin()));
}

TEST(SamplePath, LetterFrequenciesMatchMarginal) {
  // Started at π, each X_i has the one-letter marginal of the forward law.
  const PairHMM h = fx::two_state_symmetric();
  const std::size_t n = 10000;
  const auto p = sample_path(h, n, 2024);
  double ones = 0;
  for (Letter c : p.x) ones += c;
  const double freq = ones / n;
  const Word one{1};
  const double exact = marginal_law(h, one, Side::X);
  EXPECT_NEAR(exact, oracle::path_marginal(h, one, Side::X), 1e-14);
  // The path is dependent; inflate the i.i.d. SE by the chain's
  // integrated autocorrelation (1 + 0.7)/(1 − 0.7).
  const double se = std::sqrt(exact * (1 - exact) / n * (1.7 / 0.3));
  EXPECT_LT(std::abs(freq - exact), 3 * se);
}

TEST(Coupled, SingleStateMeetsImmediately) {
  for (std::uint64_t s = 0; s < 20; ++s) EXPECT_EQ(coupled_sample(fx::uniform_pairs(2), 10, s).meeting_time, 1u);
}

TEST(Coupled, FirstStepMeetingProbability) {
  // Independent first draws: P(τ = 1) = Σ_z μ(z) π(z).
  const PairHMM h = fx::two_state_asymmetric();
  const Vector& mu = h.chain().mu();
  const Vector& pi = h.chain().pi();
  const double exact = mu.dot(pi);
  const std::size_t reps = 20000;
  double met = 0;
  for (std::size_t i = 0; i < reps; ++i) met += coupled_sample(h, 5, 1000 + i).meeting_time == 1;
  const double se = std::sqrt(exact * (1 - exact) / reps);
  EXPECT_LT(std::abs(met / reps - exact), 4 * se);
}

TEST(Coupled, SharedAfterMeeting) {
  const PairHMM h = fx::two_state_symmetric();
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto c = coupled_sample(h, 60, s);
    if (c.meeting_time > 60) continue;
    for (std::size_t i = c.meeting_time - 1; i < 60; ++i) {
      EXPECT_EQ(c.from_mu.z[i], c.from_pi.z[i]);
      EXPECT_EQ(c.from_mu.x[i], c.from_pi.x[i]);
      EXPECT_EQ(c.from_mu.y[i], c.from_pi.y[i]);
    }
    for (std::size_t i = 0; i + 1 < c.meeting_time; ++i) EXPECT_NE(c.from_mu.z[i], c.from_pi.z[i]);
  }
}

TEST(ExactLaw, UniformSingleState) {
  const PairHMM h = fx::uniform_pairs(2);
  for (std::size_t cu = 0; cu < 8; ++cu)
    for (std::size_t cv = 0; cv < 8; ++cv)
      EXPECT_NEAR(exact_law(h, oracle::decode(cu, 3, 2), oracle::decode(cv, 3, 2)), 1.0 / 64, 1e-15);
}

TEST(ExactLaw, Normalized) {
  for (const auto& h : small_fixtures()) {
    double total = 0;
    for_each_joint(h, 3, [&](auto, auto, std::size_t, std::size_t, double p) { total += p; });
    EXPECT_NEAR(total, 1.0, 1e-10);
  }
}

TEST(ExactLaw, MatchesPathEnumeration) {
  for (const auto& h : {fx::two_state_asymmetric(), fx::random_pair_hmm(3, 2, 5)}) {
    for (std::size_t n = 1; n <= 4; ++n) {
      const std::size_t words = oracle::ipow(2, n);
      for (std::size_t cu = 0; cu < words; ++cu)
        for (std::size_t cv = 0; cv < words; ++cv) {
          const Word u = oracle::decode(cu, n, 2), v = oracle::decode(cv, n, 2);
          EXPECT_NEAR(exact_law(h, u, v), oracle::path_law(h, u, v), 1e-12);
        }
    }
  }
}

TEST(ExactLaw, LengthMismatch) {
  const Word u{0, 1}, v{0};
  try {
    exact_law(fx::uniform_pairs(2), u, v);
    FAIL();
  } catch (const LabError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LengthMismatch);
  }
}

TEST(ForEachJoint, VisitsMatchExactLaw) {
  const PairHMM h = fx::random_pair_hmm(2, 3, 9);
  std::size_t visits = 0;
  for_each_joint(h, 2, [&](std::span<const Letter> u, std::span<const Letter> v, std::size_t uc,
                           std::size_t vc, double p) {
    ++visits;
    EXPECT_EQ(oracle::decode(uc, 2, 3), Word(u.begin(), u.end()));
    EXPECT_EQ(oracle::decode(vc, 2, 3), Word(v.begin(), v.end()));
    EXPECT_NEAR(p, oracle::path_law(h, Word(u.begin(), u.end()), Word(v.begin(), v.end())), 1e-14);
  });
  EXPECT_EQ(visits, 81u);
}

TEST(MarginalLaw, SymmetricSidesAgree) {
  for (const auto& h : {fx::two_state_symmetric(), fx::uniform_pairs(3), two_hmm_as_pair(fx::independent_two_hmm())}) {
    const std::size_t A = h.alphabet_size();
    for (std::size_t n = 1; n <= 4; ++n)
      for (std::size_t c = 0; c < oracle::ipow(A, n); ++c) {
        const Word u = oracle::decode(c, n, A);
        EXPECT_NEAR(marginal_law(h, u, Side::X), marginal_law(h, u, Side::Y), 1e-12);
      }
  }
}

TEST(MarginalLaw, UniformSingleState) {
  const Word u{0, 2, 1};
  EXPECT_NEAR(marginal_law(fx::uniform_pairs(3), u, Side::X), 1.0 / 27, 1e-15);
}

TEST(MarginalLaw, MatchesSumOverOtherWord) {
  const PairHMM h = fx::two_state_asymmetric();
  for (std::size_t n = 1; n <= 4; ++n) {
    const std::size_t words = oracle::ipow(2, n);
    const auto tx = marginal_table(h, n, Side::X);
    const auto ty = marginal_table(h, n, Side::Y);
    for (std::size_t cu = 0; cu < words; ++cu) {
      const Word u = oracle::decode(cu, n, 2);
      double sx = 0, sy = 0;
      for (std::size_t cv = 0; cv < words; ++cv) {
        sx += exact_law(h, u, oracle::decode(cv, n, 2));
        sy += exact_law(h, oracle::decode(cv, n, 2), u);
      }
      EXPECT_NEAR(marginal_law(h, u, Side::X), sx, 1e-12);
      EXPECT_NEAR(marginal_law(h, u, Side::Y), sy, 1e-12);
      EXPECT_NEAR(tx[cu], sx, 1e-12);
      EXPECT_NEAR(ty[cu], sy, 1e-12);
    }
  }
}

TEST(Mismatch, Examples) {
  EXPECT_NEAR(p_mismatch(fx::diagonal_uniform(3), 4), 0.0, 1e-15);
  const PairHMM b = fx::bernoulli_pair(1.0 / 3, 0.5);
  for (std::size_t i = 1; i <= 20; ++i) EXPECT_NEAR(p_mismatch(b, i), 0.5, 1e-15);
  const auto prof = mismatch_profile(fx::two_state_symmetric(), 30);
  for (double p : prof) EXPECT_NEAR(p, prof.front(), 1e-12);
}

TEST(Mismatch, NonStationaryMatchesPropagation) {
  const PairHMM h = fx::two_state_asymmetric();
  const auto prof = mismatch_profile(h, 25);
  const auto ref = oracle::mismatch_probs(h, 25);
  for (std::size_t i = 0; i < 25; ++i) {
    EXPECT_NEAR(prof[i], ref[i], 1e-13);
    EXPECT_NEAR(p_mismatch(h, i + 1), ref[i], 1e-13);
  }
}

TEST(ProductChain, UniformSingleState) {
  const ChainSpec c = product_chain(fx::uniform_pairs(2));
  ASSERT_EQ(c.size(), 4u);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(c.P()(i, j), 0.25, 1e-15);
}

TEST(ProductChain, RowsStochasticAndMixingEqual) {
  for (const auto& h : small_fixtures()) {
    const ChainSpec c = product_chain(h);
    for (Eigen::Index i = 0; i < c.P().rows(); ++i) EXPECT_NEAR(c.P().row(i).sum(), 1.0, 1e-12);
    for (long t = 1; t <= 10; ++t) EXPECT_NEAR(dbar(c, t), dbar(h.chain(), t), 1e-10);
  }
}

TEST(TwoHmm, SingleStateOuterProduct) {
  Vector mu(1);
  mu << 1.0;
  Matrix P(1, 1);
  P << 1.0;
  Matrix e(1, 2);
  e << 0.3, 0.7;
  const PairHMM pair = two_hmm_as_pair(TwoChainHMM{ChainSpec(mu, P), {"a", "b"}, e, true});
  ASSERT_EQ(pair.states(), 1u);
  EXPECT_NEAR(pair.emit(0)(0, 0), 0.09, 1e-15);
  EXPECT_NEAR(pair.emit(0)(0, 1), 0.21, 1e-15);
  EXPECT_NEAR(pair.emit(0)(1, 0), 0.21, 1e-15);
  EXPECT_NEAR(pair.emit(0)(1, 1), 0.49, 1e-15);
  EXPECT_TRUE(validate(pair).symmetric);
}

TEST(TwoHmm, FourStateProduct) {
  const PairHMM pair = two_hmm_as_pair(fx::independent_two_hmm());
  ASSERT_EQ(pair.states(), 4u);
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(pair.chain().P().row(i).sum(), 1.0, 1e-12);
  EXPECT_TRUE(pair.chain().starts_stationary());
  ASSERT_TRUE(pair.x_hidden().has_value());
}

TEST(Stationary, MatchProbability) {
  EXPECT_NEAR(stationary_match_probability(fx::uniform_pairs(2)), 0.5, 1e-15);
  EXPECT_NEAR(stationary_match_probability(fx::diagonal_uniform(4)), 1.0, 1e-15);
  // π = (2/3, 1/3); trace E0 = 0.8, trace E1 = 0.6.
  EXPECT_NEAR(stationary_match_probability(fx::two_state_symmetric()), 2.0 / 3 * 0.8 + 1.0 / 3 * 0.6, 1e-12);
}

TEST(Doeblin, MatchProbabilityFromModel) {
  const auto d = doeblin_constants(fx::two_state_symmetric(), 4);
  ASSERT_TRUE(d.p_match.has_value());
  EXPECT_GT(*d.p_match, 0.0);
  EXPECT_LE(*d.p_match, 1.0);
}
