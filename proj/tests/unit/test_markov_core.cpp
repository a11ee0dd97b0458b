#include "lcslab/error.hpp"
#include "lcslab/markov_core.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace lcslab;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix P(2, 2);
  P << a, b, c, d;
  return P;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

ChainSpec stationary_chain(const Matrix& P) { return ChainSpec(stationary_distribution(P), P); }

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const LabError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no LabError thrown";
  return ErrorKind::ConfigInvalid;
}

}  // namespace

TEST(Stationary, UniformRows) {
  const Vector pi = stationary_distribution(mat2(0.5, 0.5, 0.5, 0.5));
  EXPECT_NEAR(pi[0], 0.5, 1e-12);
  EXPECT_NEAR(pi[1], 0.5, 1e-12);
}

TEST(Stationary, TwoStateByHand) {
  // π₀·0.1 = π₁·0.2 and π₀ + π₁ = 1.
  const Vector pi = stationary_distribution(mat2(0.9, 0.1, 0.2, 0.8));
  EXPECT_NEAR(pi[0], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(pi[1], 1.0 / 3.0, 1e-12);
}

TEST(Stationary, IdentityHasTwoClosedClasses) {
  EXPECT_EQ(kind_of([] { stationary_distribution(mat2(1, 0, 0, 1)); }), ErrorKind::NotIrreducible);
}

TEST(Stationary, ChainCachesPi) {
  ChainSpec c(vec2(1, 0), mat2(0.9, 0.1, 0.2, 0.8));
  EXPECT_EQ(&c.pi(), &c.pi());
  EXPECT_FALSE(c.starts_stationary());
  EXPECT_TRUE(c.with_initial(c.pi()).starts_stationary());
}

TEST(ChainSpecShape, RejectsBadInput) {
  EXPECT_EQ(kind_of([] { ChainSpec(vec2(0.5, 0.5), Matrix::Identity(3, 3)); }),
            ErrorKind::DimensionMismatch);
  EXPECT_EQ(kind_of([] { ChainSpec(vec2(0.5, 0.5), mat2(0.5, 0.6, 0.5, 0.5)); }),
            ErrorKind::PreconditionViolated);
  EXPECT_EQ(kind_of([] { ChainSpec(vec2(0.7, 0.7), mat2(0.5, 0.5, 0.5, 0.5)); }),
            ErrorKind::PreconditionViolated);
}

TEST(Structure, TwoCycle) {
  const auto r = check_irreducible_aperiodic(mat2(0, 1, 1, 0));
  EXPECT_TRUE(r.irreducible);
  EXPECT_FALSE(r.aperiodic);
  EXPECT_EQ(r.period, 2);
}

TEST(Structure, UniformRows) {
  const auto r = check_irreducible_aperiodic(mat2(0.5, 0.5, 0.5, 0.5));
  EXPECT_TRUE(r.irreducible);
  EXPECT_TRUE(r.aperiodic);
  EXPECT_EQ(r.period, 1);
}

TEST(Structure, AbsorbingState) {
  EXPECT_FALSE(check_irreducible_aperiodic(mat2(1, 0, 0.5, 0.5)).irreducible);
}

TEST(Tv, Examples) {
  EXPECT_DOUBLE_EQ(tv_distance(vec2(0.3, 0.7), vec2(0.3, 0.7)), 0.0);
  EXPECT_DOUBLE_EQ(tv_distance(vec2(1, 0), vec2(0, 1)), 1.0);
  EXPECT_NEAR(tv_distance(vec2(0.7, 0.3), vec2(0.4, 0.6)), 0.3, 1e-15);
}

TEST(Dbar, Examples) {
  EXPECT_NEAR(dbar(stationary_chain(mat2(0.5, 0.5, 0.5, 0.5)), 3), 0.0, 1e-15);
  EXPECT_NEAR(dbar(ChainSpec(vec2(0.5, 0.5), mat2(0, 1, 1, 0)), 1), 1.0, 1e-15);
  EXPECT_NEAR(dbar(stationary_chain(mat2(0.9, 0.1, 0.2, 0.8)), 1), 0.7, 1e-12);
}

TEST(Dbar, GeometricTwoState) {
  const Matrix P = mat2(0.9, 0.1, 0.2, 0.8);
  const ChainSpec c = stationary_chain(P);
  for (long t = 1; t <= 30; ++t) {
    EXPECT_NEAR(dbar(c, t), oracle::naive_dbar(P, t), 1e-12) << t;
    EXPECT_NEAR(dbar(c, t), std::pow(0.7, static_cast<double>(t)), 1e-12) << t;
  }
}

TEST(MixingTime, Examples) {
  EXPECT_EQ(mixing_time(stationary_chain(mat2(0.5, 0.5, 0.5, 0.5)), 0.1), 1);
  EXPECT_EQ(mixing_time(stationary_chain(mat2(0.9, 0.1, 0.2, 0.8)), 0.5), 2);
  EXPECT_EQ(kind_of([] { mixing_time(ChainSpec(vec2(0.5, 0.5), mat2(0, 1, 1, 0)), 0.1); }),
            ErrorKind::NotMixing);
}

TEST(MixingTime, ExactIntegerOracle) {
  // d̄(t) = 0.7^t lands exactly on ε = 0.49 at t = 2.
  const ChainSpec c = stationary_chain(mat2(0.9, 0.1, 0.2, 0.8));
  for (int k = 1; k < 100; ++k) {
    EXPECT_EQ(mixing_time(c, k / 100.0), oracle::tau_of_point_seven(k)) << "eps = " << k << "/100";
  }
}

TEST(MixingTime, IterationCap) {
  MixingOptions opts;
  opts.iteration_cap = 5;
  EXPECT_EQ(kind_of([&] { mixing_time(stationary_chain(mat2(0.9, 0.1, 0.2, 0.8)), 0.01, opts); }),
            ErrorKind::IterationCap);
}

TEST(TauMin, IdenticalRows) {
  const auto r = tau_min(stationary_chain(mat2(0.3, 0.7, 0.3, 0.7)));
  EXPECT_NEAR(r.tau_min, 4.0, 1e-12);
  EXPECT_NEAR(r.epsilon, 0.0, 1e-15);
  EXPECT_NEAR(r.A, std::sqrt(2.0), 1e-12);
}

TEST(TauMin, TwoStateGrid) {
  double best = INFINITY;
  for (int k = 1; k < 100; ++k) {
    const double eps = k / 100.0;
    const double f = (2 - eps) / (1 - eps);
    best = std::min(best, static_cast<double>(oracle::tau_of_point_seven(k)) * f * f);
  }
  const auto r = tau_min(stationary_chain(mat2(0.9, 0.1, 0.2, 0.8)));
  EXPECT_NEAR(r.tau_min, best, 1e-12);
  EXPECT_NEAR(r.A, std::sqrt(best / 2), 1e-12);
}

TEST(TauMin, PeriodicFails) {
  EXPECT_THROW(tau_min(ChainSpec(vec2(0.5, 0.5), mat2(0, 1, 1, 0))), LabError);
}

TEST(Doeblin, Examples) {
  const auto u = doeblin_constants(stationary_chain(mat2(0.5, 0.5, 0.5, 0.5)), 4);
  EXPECT_EQ(u.k, 1);
  EXPECT_NEAR(u.eps, 0.5, 1e-15);
  EXPECT_NEAR(u.alpha, 0.5, 1e-15);
  EXPECT_NEAR(u.c, 4.0, 1e-12);

  const auto t = doeblin_constants(stationary_chain(mat2(0.9, 0.1, 0.2, 0.8)), 4);
  EXPECT_EQ(t.k, 1);
  EXPECT_NEAR(t.eps, 0.1, 1e-15);
  EXPECT_NEAR(t.alpha, 0.9, 1e-15);
  EXPECT_NEAR(t.c, 1 / 0.81, 1e-12);
  EXPECT_NEAR(t.tail_bound(3), t.c * 0.729, 1e-12);

  EXPECT_EQ(kind_of([] { doeblin_constants(ChainSpec(vec2(0.5, 0.5), mat2(0, 1, 1, 0)), 8); }),
            ErrorKind::NoPositivePower);
}

TEST(Doeblin, SparseNeedsSquare) {
  const auto d = doeblin_constants(stationary_chain(mat2(0, 1, 0.5, 0.5)), default_max_k(2));
  EXPECT_EQ(d.k, 2);
  EXPECT_NEAR(d.eps, 0.25, 1e-15);
}

TEST(MatrixPower, MatchesNaive) {
  Matrix P(3, 3);
  P << 0.2, 0.5, 0.3, 0.1, 0.1, 0.8, 0.6, 0.3, 0.1;
  for (long t : {1L, 2L, 7L, 16L}) {
    const Matrix R = matrix_power(P, t);
    const auto N = oracle::naive_power(P, t);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) EXPECT_NEAR(R(i, j), N[i][j], 1e-13);
  }
}
