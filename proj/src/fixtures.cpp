#include "lcslab/fixtures.hpp"

#include "lcslab/rng.hpp"

#include <string>

namespace lcslab::fixtures {

namespace {

std::vector<std::string> letters_of(std::size_t count) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(std::to_string(i));
  return out;
}

ChainSpec single_state() { return ChainSpec(Vector::Ones(1), Matrix::Ones(1, 1)); }

Matrix two_state_P() {
  Matrix P(2, 2);
  P << 0.9, 0.1, 0.2, 0.8;
  return P;
}

Vector two_state_pi() {
  Vector pi(2);
  pi << 2.0 / 3.0, 1.0 / 3.0;
  return pi;
}

}  // namespace

PairHMM uniform_pairs(std::size_t letters) {
  const auto A = static_cast<Eigen::Index>(letters);
  const double w = 1.0 / static_cast<double>(letters * letters);
  return PairHMM(single_state(), letters_of(letters), {Matrix::Constant(A, A, w)});
}

PairHMM diagonal_uniform(std::size_t letters) {
  const auto A = static_cast<Eigen::Index>(letters);
  Matrix E = Matrix::Identity(A, A) / static_cast<double>(letters);
  return PairHMM(single_state(), letters_of(letters), {E});
}

PairHMM bernoulli_pair(double p, double q) {
  Vector x(2), y(2);
  x << 1.0 - p, p;
  y << 1.0 - q, q;
  return PairHMM(single_state(), letters_of(2), {x * y.transpose()});
}

PairHMM disjoint_support() {
  Matrix E = Matrix::Zero(2, 2);
  E(0, 1) = 1.0;
  return PairHMM(single_state(), letters_of(2), {E});
}

PairHMM two_state_symmetric() {
  Matrix E0(2, 2), E1(2, 2);
  E0 << 0.4, 0.1, 0.1, 0.4;
  E1 << 0.1, 0.2, 0.2, 0.5;
  return PairHMM(ChainSpec(two_state_pi(), two_state_P()), letters_of(2), {E0, E1});
}

PairHMM two_state_asymmetric() {
  Matrix E0(2, 2), E1(2, 2);
  E0 << 0.5, 0.3, 0.0, 0.2;
  E1 << 0.1, 0.1, 0.4, 0.4;
  Vector mu(2);
  mu << 1.0, 0.0;
  return PairHMM(ChainSpec(mu, two_state_P()), letters_of(2), {E0, E1});
}

PairHMM sparse_two_state() {
  Matrix P(2, 2);
  P << 0.0, 1.0, 0.5, 0.5;
  Vector pi(2);
  pi << 1.0 / 3.0, 2.0 / 3.0;
  Matrix E0(2, 2), E1(2, 2);
  E0 << 0.35, 0.15, 0.15, 0.35;
  E1 << 0.2, 0.3, 0.3, 0.2;
  return PairHMM(ChainSpec(pi, P), letters_of(2), {E0, E1});
}

TwoChainHMM independent_two_hmm() {
  Matrix emit(2, 2);
  emit << 0.8, 0.2, 0.3, 0.7;
  return TwoChainHMM{ChainSpec(two_state_pi(), two_state_P()), letters_of(2), emit, true};
}

PairHMM near_independent(double delta) {
  constexpr int L = 3;
  Matrix Q(L, L);
  Q << 1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0 / 3, 0.2, 0.3, 0.5;
  const Vector first = (Vector(L) << 1.0 - delta, delta, 0.0).finished();
  const int S = L * L;
  Matrix P(S, S);
  Vector mu = Vector::Zero(S);
  std::vector<Matrix> emit;
  std::vector<std::size_t> swap(S), x_side(S);
  for (int x = 0; x < L; ++x) {
    for (int y = 0; y < L; ++y) {
      const int s = x * L + y;
      for (int x2 = 0; x2 < L; ++x2)
        for (int y2 = 0; y2 < L; ++y2) P(s, x2 * L + y2) = Q(x, x2) * Q(y, y2);
      if (x == y) mu[s] = first[x];
      Matrix E = Matrix::Zero(L, L);
      E(x, y) = 1.0;
      emit.push_back(E);
      swap[static_cast<std::size_t>(s)] = static_cast<std::size_t>(y * L + x);
      x_side[static_cast<std::size_t>(s)] = static_cast<std::size_t>(x);
    }
  }
  return PairHMM(ChainSpec(mu, P), letters_of(L), emit, swap).with_x_hidden(x_side);
}

PairHMM random_pair_hmm(std::size_t states, std::size_t letters, std::uint64_t seed) {
  const CounterRng rng(CounterRng::derive(seed, 7));
  std::uint64_t counter = 0;
  // Entries in [0.05, 1.05) keep every probability positive.
  const auto draw = [&] { return 0.05 + rng.uniform(counter++); };
  const auto S = static_cast<Eigen::Index>(states);
  const auto A = static_cast<Eigen::Index>(letters);
  Matrix P(S, S);
  Vector mu(S);
  for (Eigen::Index i = 0; i < S; ++i) {
    for (Eigen::Index j = 0; j < S; ++j) P(i, j) = draw();
    P.row(i) /= P.row(i).sum();
    mu[i] = draw();
  }
  mu /= mu.sum();
  std::vector<Matrix> emit;
  for (Eigen::Index z = 0; z < S; ++z) {
    Matrix E(A, A);
    for (Eigen::Index a = 0; a < A; ++a)
      for (Eigen::Index b = 0; b < A; ++b) E(a, b) = draw();
    emit.push_back(E / E.sum());
  }
  return PairHMM(ChainSpec(mu, P), letters_of(letters), emit);
}

}  // namespace lcslab::fixtures
