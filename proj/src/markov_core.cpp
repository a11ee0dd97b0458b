#include "lcslab/markov_core.hpp"

#include "lcslab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

namespace lcslab {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NotIrreducible: return "NotIrreducible";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotMixing: return "NotMixing";
    case ErrorKind::IterationCap: return "IterationCap";
    case ErrorKind::NoPositivePower: return "NoPositivePower";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::AlphabetTooLarge: return "AlphabetTooLarge";
    case ErrorKind::InvalidPartition: return "InvalidPartition";
    case ErrorKind::EnumerationCapExceeded: return "EnumerationCapExceeded";
    case ErrorKind::NeedTwoGridPoints: return "NeedTwoGridPoints";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

namespace {

// d̄ comparisons against ε carry this slack so that exact ties such as
// 0.7² = 0.49 resolve the way exact arithmetic would.
constexpr double kDbarTol = 1e-12;

void check_probability_vector(const Vector& v, const char* what) {
  if (v.size() == 0) {
    throw LabError(ErrorKind::DimensionMismatch, std::string(what) + " is empty");
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v[i] >= 0.0) || !std::isfinite(v[i])) {
      throw LabError(ErrorKind::PreconditionViolated,
                     std::string(what) + " has a negative or non-finite entry");
    }
  }
  if (std::abs(v.sum() - 1.0) > kStochasticTol) {
    throw LabError(ErrorKind::PreconditionViolated, std::string(what) + " does not sum to 1");
  }
}

void check_stochastic(const Matrix& P) {
  if (P.rows() != P.cols() || P.rows() == 0) {
    throw LabError(ErrorKind::DimensionMismatch, "transition matrix must be square and non-empty");
  }
  for (Eigen::Index r = 0; r < P.rows(); ++r) {
    check_probability_vector(P.row(r).transpose(), "transition row");
  }
}

using Reach = std::vector<std::vector<char>>;

Reach reachability(const Matrix& P) {
  const auto n = static_cast<std::size_t>(P.rows());
  Reach reach(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    reach[i][i] = 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (P(i, j) > 0.0) reach[i][j] = 1;
    }
  }
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!reach[i][m]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (reach[m][j]) reach[i][j] = 1;
      }
    }
  }
  return reach;
}

// Members of each closed communicating class.
std::vector<std::vector<std::size_t>> closed_classes(const Reach& reach) {
  const std::size_t n = reach.size();
  std::vector<char> seen(n, 0);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i]) continue;
    std::vector<std::size_t> cls;
    for (std::size_t j = 0; j < n; ++j) {
      if (reach[i][j] && reach[j][i]) {
        cls.push_back(j);
        seen[j] = 1;
      }
    }
    bool closed = true;
    for (std::size_t j = 0; j < n && closed; ++j) {
      if (reach[i][j] && !reach[j][i]) closed = false;
    }
    if (closed) out.push_back(std::move(cls));
  }
  return out;
}

// Period of the class containing `members` via BFS level gcd.
int class_period(const Matrix& P, const std::vector<std::size_t>& members) {
  const auto n = static_cast<std::size_t>(P.rows());
  std::vector<char> in(n, 0);
  for (auto m : members) in[m] = 1;
  std::vector<long> level(n, -1);
  std::queue<std::size_t> q;
  level[members.front()] = 0;
  q.push(members.front());
  long g = 0;
  while (!q.empty()) {
    const auto u = q.front();
    q.pop();
    for (std::size_t v = 0; v < n; ++v) {
      if (!in[v] || !(P(u, v) > 0.0)) continue;
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        q.push(v);
      } else {
        g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
      }
    }
  }
  return static_cast<int>(g);
}

void renormalize_rows(Matrix& M) {
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    const double s = M.row(r).sum();
    if (s > 0.0) M.row(r) /= s;
  }
}

// Unichain with an aperiodic recurrent class: the condition under which
// d̄(t) → 0.
void require_mixing(const Matrix& P) {
  const auto reach = reachability(P);
  const auto classes = closed_classes(reach);
  if (classes.size() != 1) {
    throw LabError(ErrorKind::NotMixing, "chain has " + std::to_string(classes.size()) +
                                             " closed classes; d̄(t) does not vanish");
  }
  if (class_period(P, classes.front()) != 1) {
    throw LabError(ErrorKind::NotMixing, "recurrent class is periodic");
  }
}

}  // namespace

// =============================================================================
// ChainSpec
// =============================================================================

ChainSpec::ChainSpec(std::vector<std::string> states, Vector mu, Matrix P)
    : states_(std::move(states)), mu_(std::move(mu)), P_(std::move(P)),
      cache_(std::make_shared<PiCache>()) {
  check_stochastic(P_);
  if (static_cast<Eigen::Index>(states_.size()) != P_.rows() || mu_.size() != P_.rows()) {
    throw LabError(ErrorKind::DimensionMismatch, "states, mu and P disagree on the state count");
  }
  check_probability_vector(mu_, "initial distribution");
}

ChainSpec::ChainSpec(Vector mu, Matrix P)
    : ChainSpec(
          [&] {
            std::vector<std::string> names;
            for (Eigen::Index i = 0; i < P.rows(); ++i) names.push_back("s" + std::to_string(i));
            return names;
          }(),
          std::move(mu), P) {}

const Vector& ChainSpec::pi() const {
  std::call_once(cache_->once, [this] {
    try {
      cache_->pi = stationary_distribution(P_);
    } catch (...) {
      cache_->error = std::current_exception();
    }
  });
  if (cache_->error) std::rethrow_exception(cache_->error);
  return cache_->pi;
}

bool ChainSpec::starts_stationary() const {
  return (mu_ - pi()).cwiseAbs().sum() <= kStochasticTol;
}

ChainSpec ChainSpec::with_initial(Vector mu) const { return ChainSpec(states_, std::move(mu), P_); }

double DoeblinConstants::tail_bound(double K) const {
  if (alpha == 0.0) return K >= 1.0 ? 0.0 : c;
  return c * std::pow(alpha, K);
}

// =============================================================================
// Operations
// =============================================================================

Vector stationary_distribution(const Matrix& P) {
  check_stochastic(P);
  const auto classes = closed_classes(reachability(P));
  if (classes.size() != 1) {
    throw LabError(ErrorKind::NotIrreducible,
                   "chain has " + std::to_string(classes.size()) + " closed communicating classes");
  }
  const Eigen::Index n = P.rows();
  Matrix A = P.transpose() - Matrix::Identity(n, n);
  A.row(n - 1).setOnes();
  Vector rhs = Vector::Zero(n);
  rhs[n - 1] = 1.0;
  Vector pi = A.fullPivLu().solve(rhs);
  for (Eigen::Index i = 0; i < n; ++i) pi[i] = std::max(pi[i], 0.0);
  pi /= pi.sum();
  const double residual = (pi.transpose() * P - pi.transpose()).cwiseAbs().sum();
  if (residual > kStationaryTol) {
    std::ostringstream msg;
    msg << "stationary solve residual " << residual << " exceeds tolerance";
    throw LabError(ErrorKind::NotIrreducible, msg.str());
  }
  return pi;
}

StructureReport check_irreducible_aperiodic(const Matrix& P) {
  StructureReport report;
  const auto reach = reachability(P);
  const auto classes = closed_classes(reach);
  report.closed_classes = static_cast<int>(classes.size());
  report.irreducible = classes.size() == 1 &&
                       classes.front().size() == static_cast<std::size_t>(P.rows());
  if (report.irreducible) {
    report.period = class_period(P, classes.front());
    report.aperiodic = report.period == 1;
  }
  return report;
}

double tv_distance(const Vector& mu, const Vector& nu) {
  if (mu.size() != nu.size()) {
    throw LabError(ErrorKind::DimensionMismatch, "tv_distance: vectors differ in length");
  }
  return 0.5 * (mu - nu).cwiseAbs().sum();
}

Matrix matrix_power(const Matrix& P, long t) {
  const Eigen::Index n = P.rows();
  Matrix result = Matrix::Identity(n, n);
  Matrix base = P;
  bool first = true;
  while (t > 0) {
    if (t & 1) {
      if (first) {
        result = base;
        first = false;
      } else {
        result = result * base;
        renormalize_rows(result);
      }
    }
    t >>= 1;
    if (t > 0) {
      base = base * base;
      renormalize_rows(base);
    }
  }
  return result;
}

double dbar_of_power(const Matrix& Pt) {
  double worst = 0.0;
  for (Eigen::Index x = 0; x < Pt.rows(); ++x) {
    for (Eigen::Index y = x + 1; y < Pt.rows(); ++y) {
      worst = std::max(worst, 0.5 * (Pt.row(x) - Pt.row(y)).cwiseAbs().sum());
    }
  }
  return std::min(worst, 1.0);
}

double dbar(const ChainSpec& chain, long t) {
  if (t < 1) throw LabError(ErrorKind::PreconditionViolated, "dbar requires t >= 1");
  return dbar_of_power(matrix_power(chain.P(), t));
}

namespace {

// d̄(1), d̄(2), ... until d̄(t) ≤ floor or the cap is hit.
std::vector<double> dbar_sequence(const Matrix& P, double floor, long cap) {
  std::vector<double> seq;
  Matrix Pt = P;
  for (long t = 1; t <= cap; ++t) {
    if (t > 1) {
      Pt = Pt * P;
      renormalize_rows(Pt);
    }
    seq.push_back(dbar_of_power(Pt));
    if (seq.back() <= floor + kDbarTol) return seq;
  }
  throw LabError(ErrorKind::IterationCap,
                 "d̄(t) still above " + std::to_string(floor) + " after " + std::to_string(cap) +
                     " steps");
}

// τ(0) is finite only when P^t = 1π exactly for some t ≤ |S|.
std::optional<long> exact_mixing_time(const Matrix& P) {
  Matrix Pt = P;
  for (long t = 1; t <= P.rows() + 1; ++t) {
    if (t > 1) {
      Pt = Pt * P;
      renormalize_rows(Pt);
    }
    if (dbar_of_power(Pt) <= kDbarTol) return t;
  }
  return std::nullopt;
}

long first_below(const std::vector<double>& seq, double eps) {
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq[i] <= eps + kDbarTol) return static_cast<long>(i) + 1;
  }
  return -1;
}

}  // namespace

long mixing_time(const ChainSpec& chain, double eps, const MixingOptions& opts) {
  if (!(eps >= 0.0 && eps < 1.0)) {
    throw LabError(ErrorKind::PreconditionViolated, "mixing_time requires eps in [0, 1)");
  }
  require_mixing(chain.P());
  if (eps == 0.0) {
    if (auto t = exact_mixing_time(chain.P())) return *t;
    throw LabError(ErrorKind::IterationCap, "d̄(t) never reaches 0: τ(0) is infinite");
  }
  return first_below(dbar_sequence(chain.P(), eps, opts.iteration_cap), eps);
}

MixingReport tau_min(const ChainSpec& chain, const MixingOptions& opts) {
  require_mixing(chain.P());
  if (opts.grid < 1) throw LabError(ErrorKind::PreconditionViolated, "ε-grid must be positive");
  const double smallest = 1.0 / opts.grid;
  const auto seq = dbar_sequence(chain.P(), smallest, opts.iteration_cap);

  MixingReport best;
  best.tau_min = std::numeric_limits<double>::infinity();
  for (int g = 0; g < opts.grid; ++g) {
    const double eps = static_cast<double>(g) / opts.grid;
    long tau = 0;
    if (g == 0) {
      const auto exact = exact_mixing_time(chain.P());
      if (!exact) continue;
      tau = *exact;
    } else {
      tau = first_below(seq, eps);
    }
    const double factor = (2.0 - eps) / (1.0 - eps);
    const double objective = static_cast<double>(tau) * factor * factor;
    if (objective < best.tau_min) {
      best.epsilon = eps;
      best.tau_eps = tau;
      best.tau_min = objective;
    }
  }
  best.A = std::sqrt(best.tau_min / 2.0);
  return best;
}

int default_max_k(std::size_t states) {
  const auto s = static_cast<int>(states);
  return (s - 1) * (s - 1) + 1;
}

DoeblinConstants doeblin_constants(const ChainSpec& chain, int max_k) {
  const Matrix& P = chain.P();
  Matrix Pk = P;
  for (int k = 1; k <= max_k; ++k) {
    if (k > 1) {
      Pk = Pk * P;
      renormalize_rows(Pk);
    }
    const double eps = Pk.minCoeff();
    if (eps > 0.0) {
      DoeblinConstants out;
      out.k = k;
      out.eps = std::min(eps, 1.0);
      if (out.eps >= 1.0) {
        // Single-state chain: the copies meet at time 1 with certainty.
        out.alpha = 0.0;
        out.c = 1.0;
      } else {
        out.alpha = std::pow(1.0 - out.eps, 1.0 / k);
        out.c = 1.0 / ((1.0 - out.eps) * (1.0 - out.eps));
      }
      return out;
    }
  }
  throw LabError(ErrorKind::NoPositivePower,
                 "no power P^k with k <= " + std::to_string(max_k) + " is entrywise positive");
}

}  // namespace lcslab
