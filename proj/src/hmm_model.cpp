#include "lcslab/hmm_model.hpp"

#include "lcslab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lcslab {

namespace {

constexpr double kSymmetryTol = 1e-12;
// Forward recursion switches to per-step rescaling beyond this length.
constexpr std::size_t kScaleThreshold = 64;

// Cumulative table with every entry after the last positive mass pinned to
// 1, so rounding in the running sum can never select a zero-mass category.
template <typename Range>
void append_cdf(std::vector<double>& out, const Range& probs) {
  const std::size_t start = out.size();
  double acc = 0.0;
  std::size_t last_positive = 0;
  std::size_t i = 0;
  for (double p : probs) {
    acc += p;
    out.push_back(acc);
    if (p > 0.0) last_positive = i;
    ++i;
  }
  for (std::size_t j = start + last_positive; j < out.size(); ++j) out[j] = 1.0;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

void check_word(std::span<const Letter> w, std::size_t letters) {
  for (Letter c : w) {
    if (c >= letters) {
      throw LabError(ErrorKind::PreconditionViolated, "word letter outside the alphabet");
    }
  }
}

// Forward recursion; emission(i, z) is the probability that state z emits
// the observation at 0-based position i.
template <typename Emission>
double forward(const PairHMM& hmm, std::size_t n, Emission&& emission) {
  const auto& chain = hmm.chain();
  const auto S = static_cast<Eigen::Index>(chain.size());
  Vector alpha(S);
  for (Eigen::Index z = 0; z < S; ++z) alpha[z] = chain.mu()[z] * emission(0, z);
  const bool scale = n > kScaleThreshold;
  double log_scale = 0.0;
  Vector next(S);
  for (std::size_t i = 1; i < n; ++i) {
    if (scale) {
      const double s = alpha.sum();
      if (s <= 0.0) return 0.0;
      alpha /= s;
      log_scale += std::log(s);
    }
    next.noalias() = chain.P().transpose() * alpha;
    for (Eigen::Index z = 0; z < S; ++z) next[z] *= emission(i, z);
    alpha.swap(next);
  }
  const double total = alpha.sum();
  if (!scale) return total;
  if (total <= 0.0) return 0.0;
  return std::exp(log_scale + std::log(total));
}

// Distribution of Z_i for i = 1, 2, ... (1-based), i.e. μP^{i−1}.
class StateLaw {
 public:
  explicit StateLaw(const ChainSpec& chain) : P_(chain.P()), rho_(chain.mu()) {}
  const Vector& current() const noexcept { return rho_; }
  void advance() { rho_ = (rho_.transpose() * P_).transpose(); }

 private:
  const Matrix& P_;
  Vector rho_;
};

}  // namespace

std::size_t saturating_pow(std::size_t base, std::size_t exponent) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exponent; ++i) {
    if (base != 0 && out > std::numeric_limits<std::size_t>::max() / base) {
      return std::numeric_limits<std::size_t>::max();
    }
    out *= base;
  }
  return out;
}

// =============================================================================
// PairHMM
// =============================================================================

PairHMM::PairHMM(ChainSpec chain, std::vector<std::string> alphabet, std::vector<Matrix> emit,
                 std::optional<std::vector<std::size_t>> state_swap)
    : chain_(std::move(chain)), alphabet_(std::move(alphabet)), emit_(std::move(emit)),
      swap_(std::move(state_swap)) {
  const auto S = chain_.size();
  const auto A = static_cast<Eigen::Index>(alphabet_.size());
  if (A == 0) throw LabError(ErrorKind::DimensionMismatch, "alphabet is empty");
  if (alphabet_.size() > std::numeric_limits<Letter>::max()) {
    throw LabError(ErrorKind::AlphabetTooLarge, "alphabet exceeds the letter encoding");
  }
  if (emit_.size() != S) {
    throw LabError(ErrorKind::DimensionMismatch, "one emission matrix per hidden state required");
  }
  for (const auto& E : emit_) {
    if (E.rows() != A || E.cols() != A) {
      throw LabError(ErrorKind::DimensionMismatch, "emission matrices must be |A| x |A|");
    }
    if (E.minCoeff() < 0.0 || std::abs(E.sum() - 1.0) > kStochasticTol) {
      throw LabError(ErrorKind::PreconditionViolated, "emission matrices must be probability tables");
    }
  }
  if (swap_) {
    if (swap_->size() != S ||
        std::any_of(swap_->begin(), swap_->end(), [S](std::size_t s) { return s >= S; })) {
      throw LabError(ErrorKind::DimensionMismatch, "state_swap must permute the hidden states");
    }
  }
  emit_x_.resize(static_cast<Eigen::Index>(S), A);
  emit_y_.resize(static_cast<Eigen::Index>(S), A);
  for (std::size_t z = 0; z < S; ++z) {
    const auto zi = static_cast<Eigen::Index>(z);
    emit_x_.row(zi) = emit_[z].rowwise().sum().transpose();
    emit_y_.row(zi) = emit_[z].colwise().sum();
  }
}

PairHMM PairHMM::with_initial(Vector mu) const {
  PairHMM out(chain_.with_initial(std::move(mu)), alphabet_, emit_, swap_);
  out.x_hidden_ = x_hidden_;
  return out;
}

PairHMM PairHMM::with_x_hidden(std::vector<std::size_t> labels) const {
  if (labels.size() != states()) {
    throw LabError(ErrorKind::DimensionMismatch, "one X-side hidden label per state required");
  }
  PairHMM out = *this;
  out.x_hidden_ = std::move(labels);
  return out;
}

// =============================================================================
// Validation
// =============================================================================

namespace {

bool per_state_symmetric(const PairHMM& hmm) {
  for (const auto& E : hmm.emissions()) {
    if ((E - E.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) return false;
  }
  return true;
}

bool swap_symmetric(const PairHMM& hmm) {
  if (!hmm.state_swap()) return false;
  const auto& sigma = *hmm.state_swap();
  const auto& chain = hmm.chain();
  const std::size_t S = chain.size();
  for (std::size_t z = 0; z < S; ++z) {
    const auto sz = sigma[z];
    if (sigma[sz] != z) return false;
    if (std::abs(chain.mu()[sz] - chain.mu()[z]) > kSymmetryTol) return false;
    for (std::size_t w = 0; w < S; ++w) {
      if (std::abs(chain.P()(sz, sigma[w]) - chain.P()(z, w)) > kSymmetryTol) return false;
    }
    if ((hmm.emit(sz) - hmm.emit(z).transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
      return false;
    }
  }
  return true;
}

bool has_common_letter(const PairHMM& hmm) {
  const auto& chain = hmm.chain();
  const std::size_t S = chain.size();
  const std::size_t A = hmm.alphabet_size();
  // reach[i][j]: j reachable from i in one or more steps.
  std::vector<std::vector<char>> reach(S, std::vector<char>(S, 0));
  for (std::size_t i = 0; i < S; ++i)
    for (std::size_t j = 0; j < S; ++j) reach[i][j] = chain.P()(i, j) > 0.0;
  for (std::size_t m = 0; m < S; ++m)
    for (std::size_t i = 0; i < S; ++i)
      if (reach[i][m])
        for (std::size_t j = 0; j < S; ++j)
          if (reach[m][j]) reach[i][j] = 1;
  std::vector<char> visited(S, 0);
  for (std::size_t s = 0; s < S; ++s) {
    if (chain.mu()[s] <= 0.0) continue;
    visited[s] = 1;
    for (std::size_t j = 0; j < S; ++j)
      if (reach[s][j]) visited[j] = 1;
  }
  const auto& ex = hmm.marginal_emissions(Side::X);
  const auto& ey = hmm.marginal_emissions(Side::Y);
  for (std::size_t z = 0; z < S; ++z) {
    if (!visited[z]) continue;
    for (std::size_t a = 0; a < A; ++a) {
      if (hmm.emit(z)(a, a) > 0.0) return true;
      for (std::size_t w = 0; w < S; ++w) {
        if (!reach[z][w]) continue;
        if (ex(z, a) > 0.0 && ey(w, a) > 0.0) return true;
        if (ey(z, a) > 0.0 && ex(w, a) > 0.0) return true;
      }
    }
  }
  return false;
}

bool identical_one_letter_marginals(const PairHMM& hmm) {
  const auto& ex = hmm.marginal_emissions(Side::X);
  const auto& ey = hmm.marginal_emissions(Side::Y);
  StateLaw law(hmm.chain());
  for (std::size_t i = 0; i <= hmm.states(); ++i) {
    const Vector px = ex.transpose() * law.current();
    const Vector py = ey.transpose() * law.current();
    if ((px - py).cwiseAbs().maxCoeff() > kSymmetryTol) return false;
    law.advance();
  }
  return true;
}

}  // namespace

ValidationReport validate(const PairHMM& hmm) {
  ValidationReport report;
  report.stochastic = std::all_of(hmm.emissions().begin(), hmm.emissions().end(), [](const Matrix& E) {
    return E.minCoeff() >= 0.0 && std::abs(E.sum() - 1.0) <= kStochasticTol;
  });
  report.symmetric = per_state_symmetric(hmm) || swap_symmetric(hmm);
  report.common_letter = has_common_letter(hmm);
  report.identical_marginals = identical_one_letter_marginals(hmm);
  return report;
}

// =============================================================================
// Sampling
// =============================================================================

PathSampler::PathSampler(const PairHMM& hmm)
    : states_(hmm.states()), letters_(hmm.alphabet_size()) {
  const auto& chain = hmm.chain();
  append_cdf(mu_cdf_, to_std(chain.mu()));
  try {
    append_cdf(pi_cdf_, to_std(chain.pi()));
  } catch (const LabError&) {
    pi_cdf_.clear();
  }
  for (std::size_t z = 0; z < states_; ++z) {
    const Vector row = chain.P().row(static_cast<Eigen::Index>(z)).transpose();
    append_cdf(trans_cdf_, to_std(row));
  }
  for (std::size_t z = 0; z < states_; ++z) {
    const Matrix& E = hmm.emit(z);
    std::vector<double> flat;
    flat.reserve(letters_ * letters_);
    for (std::size_t a = 0; a < letters_; ++a)
      for (std::size_t b = 0; b < letters_; ++b) flat.push_back(E(a, b));
    append_cdf(emit_cdf_, flat);
  }
}

void PathSampler::sample(std::size_t n, std::uint64_t seed, Word& x, Word& y,
                         std::vector<std::uint32_t>* z) const {
  const CounterRng rng(path_key(seed));
  x.resize(n);
  y.resize(n);
  if (z) z->resize(n);
  std::size_t s = sample_cumulative(mu_cdf_, rng.uniform(0));
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) s = sample_cumulative(trans_row(s), rng.uniform(2 * i));
    const std::size_t pair = sample_cumulative(emit_row(s), rng.uniform(2 * i + 1));
    x[i] = static_cast<Letter>(pair / letters_);
    y[i] = static_cast<Letter>(pair % letters_);
    if (z) (*z)[i] = static_cast<std::uint32_t>(s);
  }
}

CoupledSample PathSampler::coupled(std::size_t n, std::uint64_t seed) const {
  if (pi_cdf_.empty()) {
    throw LabError(ErrorKind::NotIrreducible, "coupling needs a unique stationary distribution");
  }
  const CounterRng main(path_key(seed));
  const CounterRng companion(companion_key(seed));
  CoupledSample out;
  auto& a = out.from_mu;
  auto& b = out.from_pi;
  for (SamplePath* p : {&a, &b}) {
    p->seed = seed;
    p->z.resize(n);
    p->x.resize(n);
    p->y.resize(n);
  }
  std::size_t s = sample_cumulative(mu_cdf_, main.uniform(0));
  std::size_t sb = sample_cumulative(pi_cdf_, companion.uniform(0));
  bool met = false;
  out.meeting_time = n + 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      s = sample_cumulative(trans_row(s), main.uniform(2 * i));
      sb = met ? s : sample_cumulative(trans_row(sb), companion.uniform(2 * i));
    }
    if (!met && s == sb) {
      met = true;
      out.meeting_time = i + 1;
    }
    const std::size_t pa = sample_cumulative(emit_row(s), main.uniform(2 * i + 1));
    const std::size_t pb = met ? pa : sample_cumulative(emit_row(sb), companion.uniform(2 * i + 1));
    a.z[i] = static_cast<std::uint32_t>(s);
    b.z[i] = static_cast<std::uint32_t>(sb);
    a.x[i] = static_cast<Letter>(pa / letters_);
    a.y[i] = static_cast<Letter>(pa % letters_);
    b.x[i] = static_cast<Letter>(pb / letters_);
    b.y[i] = static_cast<Letter>(pb % letters_);
  }
  a.meeting_time = out.meeting_time;
  b.meeting_time = out.meeting_time;
  return out;
}

SamplePath sample_path(const PairHMM& hmm, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw LabError(ErrorKind::PreconditionViolated, "sample_path requires n >= 1");
  SamplePath path;
  path.seed = seed;
  PathSampler(hmm).sample(n, seed, path.x, path.y, &path.z);
  return path;
}

CoupledSample coupled_sample(const PairHMM& hmm, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw LabError(ErrorKind::PreconditionViolated, "coupled_sample requires n >= 1");
  return PathSampler(hmm).coupled(n, seed);
}

// =============================================================================
// Exact laws
// =============================================================================

double exact_law(const PairHMM& hmm, std::span<const Letter> u, std::span<const Letter> v) {
  if (u.size() != v.size()) {
    throw LabError(ErrorKind::LengthMismatch, "exact_law needs words of equal length");
  }
  if (u.empty()) throw LabError(ErrorKind::PreconditionViolated, "exact_law needs n >= 1");
  check_word(u, hmm.alphabet_size());
  check_word(v, hmm.alphabet_size());
  return forward(hmm, u.size(), [&](std::size_t i, Eigen::Index z) {
    return hmm.emit(static_cast<std::size_t>(z))(u[i], v[i]);
  });
}

double marginal_law(const PairHMM& hmm, std::span<const Letter> u, Side side) {
  if (u.empty()) throw LabError(ErrorKind::PreconditionViolated, "marginal_law needs n >= 1");
  check_word(u, hmm.alphabet_size());
  const Matrix& e = hmm.marginal_emissions(side);
  return forward(hmm, u.size(), [&](std::size_t i, Eigen::Index z) { return e(z, u[i]); });
}

std::vector<double> mismatch_profile(const PairHMM& hmm, std::size_t count) {
  const std::size_t S = hmm.states();
  Vector mismatch(static_cast<Eigen::Index>(S));
  for (std::size_t z = 0; z < S; ++z) {
    mismatch[static_cast<Eigen::Index>(z)] = std::max(0.0, 1.0 - hmm.emit(z).trace());
  }
  std::vector<double> out;
  out.reserve(count);
  StateLaw law(hmm.chain());
  for (std::size_t i = 1; i <= count; ++i) {
    out.push_back(law.current().dot(mismatch));
    law.advance();
  }
  return out;
}

double p_mismatch(const PairHMM& hmm, std::size_t i) {
  if (i < 1) throw LabError(ErrorKind::PreconditionViolated, "positions are 1-based");
  return mismatch_profile(hmm, i).back();
}

double stationary_match_probability(const PairHMM& hmm) {
  const Vector& pi = hmm.chain().pi();
  double p = 0.0;
  for (std::size_t z = 0; z < hmm.states(); ++z) {
    p += pi[static_cast<Eigen::Index>(z)] * hmm.emit(z).trace();
  }
  return p;
}

// =============================================================================
// Derived chains
// =============================================================================

ChainSpec product_chain(const PairHMM& hmm) {
  const auto& chain = hmm.chain();
  const std::size_t S = chain.size();
  const std::size_t A = hmm.alphabet_size();
  const std::size_t N = S * A * A;
  const auto idx = [A](std::size_t z, std::size_t x, std::size_t y) {
    return static_cast<Eigen::Index>((z * A + x) * A + y);
  };
  std::vector<std::string> names;
  names.reserve(N);
  Vector mu(static_cast<Eigen::Index>(N));
  for (std::size_t z = 0; z < S; ++z)
    for (std::size_t x = 0; x < A; ++x)
      for (std::size_t y = 0; y < A; ++y) {
        names.push_back(chain.states()[z] + "|" + hmm.alphabet()[x] + "|" + hmm.alphabet()[y]);
        mu[idx(z, x, y)] = chain.mu()[static_cast<Eigen::Index>(z)] * hmm.emit(z)(x, y);
      }
  Matrix P(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  for (std::size_t z = 0; z < S; ++z)
    for (std::size_t zn = 0; zn < S; ++zn) {
      const double move = chain.P()(z, zn);
      for (std::size_t xn = 0; xn < A; ++xn)
        for (std::size_t yn = 0; yn < A; ++yn) {
          const double to = move * hmm.emit(zn)(xn, yn);
          for (std::size_t x = 0; x < A; ++x)
            for (std::size_t y = 0; y < A; ++y) P(idx(z, x, y), idx(zn, xn, yn)) = to;
        }
    }
  return ChainSpec(std::move(names), std::move(mu), std::move(P));
}

PairHMM two_hmm_as_pair(const TwoChainHMM& two) {
  if (!two.independent) {
    throw LabError(ErrorKind::PreconditionViolated, "only independent two-chain models reduce to a pair model");
  }
  const auto& chain = two.chain;
  const std::size_t S = chain.size();
  const auto A = static_cast<Eigen::Index>(two.alphabet.size());
  if (two.emit.rows() != static_cast<Eigen::Index>(S) || two.emit.cols() != A) {
    throw LabError(ErrorKind::DimensionMismatch, "two-chain emission must be |S| x |A|");
  }
  for (Eigen::Index z = 0; z < two.emit.rows(); ++z) {
    if (two.emit.row(z).minCoeff() < 0.0 || std::abs(two.emit.row(z).sum() - 1.0) > kStochasticTol) {
      throw LabError(ErrorKind::PreconditionViolated, "emission rows must be probability vectors");
    }
  }
  const auto idx = [S](std::size_t a, std::size_t b) { return a * S + b; };
  std::vector<std::string> names;
  Vector mu(static_cast<Eigen::Index>(S * S));
  Matrix P(static_cast<Eigen::Index>(S * S), static_cast<Eigen::Index>(S * S));
  std::vector<Matrix> emit;
  std::vector<std::size_t> swap(S * S);
  std::vector<std::size_t> x_side(S * S);
  for (std::size_t a = 0; a < S; ++a)
    for (std::size_t b = 0; b < S; ++b) {
      const auto ia = static_cast<Eigen::Index>(a);
      const auto ib = static_cast<Eigen::Index>(b);
      names.push_back(chain.states()[a] + "," + chain.states()[b]);
      mu[static_cast<Eigen::Index>(idx(a, b))] = chain.mu()[ia] * chain.mu()[ib];
      for (std::size_t c = 0; c < S; ++c)
        for (std::size_t d = 0; d < S; ++d) {
          P(static_cast<Eigen::Index>(idx(a, b)), static_cast<Eigen::Index>(idx(c, d))) =
              chain.P()(ia, static_cast<Eigen::Index>(c)) * chain.P()(ib, static_cast<Eigen::Index>(d));
        }
      emit.push_back(two.emit.row(ia).transpose() * two.emit.row(ib));
      swap[idx(a, b)] = idx(b, a);
      x_side[idx(a, b)] = a;
    }
  return PairHMM(ChainSpec(std::move(names), std::move(mu), std::move(P)), two.alphabet,
                 std::move(emit), std::move(swap))
      .with_x_hidden(std::move(x_side));
}

DoeblinConstants doeblin_constants(const PairHMM& hmm, int max_k) {
  DoeblinConstants d = doeblin_constants(hmm.chain(), max_k);
  const Matrix Pk = matrix_power(hmm.chain().P(), d.k);
  const Matrix& ex = hmm.marginal_emissions(Side::X);
  const Matrix& ey = hmm.marginal_emissions(Side::Y);
  // (Pk · ey)(z, a) = P(Y_{k+1} = a | Z_1 = z)
  const Matrix ahead = Pk * ey;
  double p = 1.0;
  for (Eigen::Index z = 0; z < ex.rows(); ++z) {
    p = std::min(p, ex.row(z).dot(ahead.row(z)));
  }
  d.p_match = p;
  return d;
}

// =============================================================================
// Enumeration
// =============================================================================

void for_each_joint(const PairHMM& hmm, std::size_t n, const JointVisitor& visit,
                    std::optional<std::pair<Letter, Letter>> first) {
  if (n < 1) throw LabError(ErrorKind::PreconditionViolated, "for_each_joint needs n >= 1");
  const std::size_t A = hmm.alphabet_size();
  const std::size_t S = hmm.states();
  const auto Si = static_cast<Eigen::Index>(S);
  // Emission column for each letter pair.
  std::vector<Vector> column(A * A, Vector(Si));
  for (std::size_t a = 0; a < A; ++a)
    for (std::size_t b = 0; b < A; ++b)
      for (std::size_t z = 0; z < S; ++z) column[a * A + b][static_cast<Eigen::Index>(z)] = hmm.emit(z)(a, b);
  const Matrix Pt = hmm.chain().P().transpose();

  Word u(n), v(n);
  std::vector<Vector> pred(n, Vector(Si));
  Vector alpha(Si);
  pred[0] = hmm.chain().mu();

  const auto rec = [&](auto&& self, std::size_t depth, std::size_t ucode, std::size_t vcode) -> void {
    for (std::size_t a = 0; a < A; ++a) {
      for (std::size_t b = 0; b < A; ++b) {
        if (depth == 0 && first && (first->first != a || first->second != b)) continue;
        u[depth] = static_cast<Letter>(a);
        v[depth] = static_cast<Letter>(b);
        const std::size_t uc = ucode * A + a;
        const std::size_t vc = vcode * A + b;
        alpha = pred[depth].cwiseProduct(column[a * A + b]);
        if (depth + 1 == n) {
          visit(u, v, uc, vc, alpha.sum());
        } else {
          pred[depth + 1].noalias() = Pt * alpha;
          self(self, depth + 1, uc, vc);
        }
      }
    }
  };
  rec(rec, 0, 0, 0);
}

std::vector<double> marginal_table(const PairHMM& hmm, std::size_t n, Side side) {
  const std::size_t A = hmm.alphabet_size();
  const auto Si = static_cast<Eigen::Index>(hmm.states());
  const Matrix& e = hmm.marginal_emissions(side);
  const Matrix Pt = hmm.chain().P().transpose();
  std::vector<double> table(saturating_pow(A, n));
  std::vector<Vector> pred(n, Vector(Si));
  pred[0] = hmm.chain().mu();
  Vector alpha(Si);
  const auto rec = [&](auto&& self, std::size_t depth, std::size_t code) -> void {
    for (std::size_t a = 0; a < A; ++a) {
      const std::size_t c = code * A + a;
      alpha = pred[depth].cwiseProduct(e.col(static_cast<Eigen::Index>(a)));
      if (depth + 1 == n) {
        table[c] = alpha.sum();
      } else {
        pred[depth + 1].noalias() = Pt * alpha;
        self(self, depth + 1, c);
      }
    }
  };
  rec(rec, 0, 0);
  return table;
}

}  // namespace lcslab
