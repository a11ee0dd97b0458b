#include "lcslab/runner.hpp"

#include "lcslab/estimators.hpp"
#include "lcslab/mixing.hpp"
#include "lcslab/partitions.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

namespace lcslab {

namespace {

namespace fs = std::filesystem;

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string cell(double x) { return format_double(x); }
std::string cell(bool b) { return b ? "true" : "false"; }
std::string cell(std::uint64_t x) { return std::to_string(x); }
std::string cell(long x) { return std::to_string(x); }
std::string cell(int x) { return std::to_string(x); }
std::string cell(const std::string& s) { return s; }

/// Rows are joined with ',' and terminated with '\n' regardless of platform.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : width_(header.size()) { line(header); }

  template <typename... Ts>
  void row(const Ts&... values) {
    line({cell(values)...});
  }

  void save(const fs::path& dir, const std::string& name, RunManifest& manifest) const {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    out << text_.str();
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    manifest.outputs.push_back(name);
  }

 private:
  void line(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw std::logic_error("CSV row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) text_ << (i ? "," : "") << cells[i];
    text_ << '\n';
  }

  std::size_t width_;
  std::ostringstream text_;
};

[[noreturn]] void invalid(const std::string& what) { throw LabError(ErrorKind::ConfigInvalid, what); }

const PairHMM& need_model(const RunConfig& cfg) {
  if (!cfg.model) invalid(std::string(to_string(cfg.command)) + " needs a model");
  return *cfg.model;
}

// Theorem-backed commands need a single closed class; asking for π surfaces
// NotIrreducible before any mixing or coupling check runs.
const PairHMM& need_irreducible_model(const RunConfig& cfg) {
  const PairHMM& hmm = need_model(cfg);
  hmm.chain().pi();
  return hmm;
}

std::size_t need_reps(const RunParams& p, std::size_t fallback) {
  const std::size_t reps = p.reps.value_or(fallback);
  if (reps < 2) invalid("reps must be at least 2");
  return reps;
}

std::vector<std::size_t> grid_or(const RunParams& p, std::vector<std::size_t> fallback) {
  if (!p.n_grid.empty()) return p.n_grid;
  if (p.n) return {*p.n};
  return fallback;
}

EstimatorOptions estimator_options(const RunParams& p) {
  EstimatorOptions o;
  o.threads = p.threads;
  o.cap = p.cap;
  return o;
}

void record_mixing(const MixingReport& m, RunManifest& manifest) {
  manifest.constants["A"] = m.A;
  manifest.constants["tau_min"] = m.tau_min;
  manifest.constants["tau_epsilon"] = m.epsilon;
  manifest.constants["tau_eps"] = static_cast<double>(m.tau_eps);
}

void record_doeblin(const DoeblinConstants& d, RunManifest& manifest) {
  manifest.constants["doeblin_k"] = d.k;
  manifest.constants["doeblin_eps"] = d.eps;
  manifest.constants["alpha"] = d.alpha;
  manifest.constants["c"] = d.c;
  if (d.p_match) manifest.constants["p_match"] = *d.p_match;
}

// Constants that do not depend on sampling; recorded whenever the hidden
// chain supports them.
void record_chain_constants(const PairHMM& hmm, RunManifest& manifest) {
  try {
    record_mixing(tau_min(hmm.chain()), manifest);
    record_doeblin(doeblin_constants(hmm, default_max_k(hmm.states())), manifest);
  } catch (const LabError&) {
  }
}

void run_simulate(const RunConfig& cfg, RunManifest& manifest) {
  const PairHMM& hmm = need_model(cfg);
  const auto grid = grid_or(cfg.params, {});
  if (grid.empty()) invalid("simulate needs n or n_grid");
  const std::size_t reps = need_reps(cfg.params, 1000);
  const auto opts = estimator_options(cfg.params);
  const std::uint64_t seed = *cfg.params.seed;

  CsvWriter mean({"n", "reps", "mean", "std_err", "exact"});
  for (std::size_t n : grid) {
    MeanLcEstimate m = mc_mean_lc(hmm, n, reps, CounterRng::derive(seed, 0x51, n), opts);
    std::string exact;
    const std::size_t A = hmm.alphabet_size();
    if (n <= 6 && saturating_pow(A * A, n) <= std::min<std::uint64_t>(cfg.params.cap, 1'000'000)) {
      exact = cell(exact_mean_lc(hmm, n, opts) / static_cast<double>(n));
    }
    mean.row(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(reps), m.mean, m.std_err, exact);
  }
  mean.save(cfg.out_dir, "mean.csv", manifest);

  const SamplePath path = sample_path(hmm, grid.front(), seed);
  CsvWriter out({"i", "z", "x", "y"});
  for (std::size_t i = 0; i < path.x.size(); ++i) {
    out.row(static_cast<std::uint64_t>(i + 1), hmm.chain().states()[path.z[i]],
            hmm.alphabet()[path.x[i]], hmm.alphabet()[path.y[i]]);
  }
  out.save(cfg.out_dir, "path.csv", manifest);
  record_chain_constants(hmm, manifest);
}

void run_beta(const RunConfig& cfg, RunManifest& manifest) {
  const PairHMM& hmm = need_model(cfg);
  const std::size_t n_max = cfg.params.n.value_or(3);
  BetaOptions bo;
  bo.cap = cfg.params.cap;
  bo.threads = cfg.params.threads;
  const BetaStarEstimate est = beta_star_estimate(hmm, n_max, bo);
  CsvWriter beta({"n", "beta_xy", "beta_zx_y", "cost"});
  for (const auto& r : est.sequence) {
    beta.row(static_cast<std::uint64_t>(r.n), r.beta_xy,
             r.beta_zx_y ? cell(*r.beta_zx_y) : std::string(), r.cost);
  }
  beta.save(cfg.out_dir, "beta.csv", manifest);

  CsvWriter h({"n", "h", "argmax_m"});
  for (std::size_t n = 1; n <= n_max; ++n) {
    const AsymmetryReport a = h_n(hmm, n);
    h.row(static_cast<std::uint64_t>(n), a.h, a.argmax_m);
  }
  h.save(cfg.out_dir, "h.csv", manifest);
  manifest.constants["beta_star_lower"] = est.beta_star_lower;
  manifest.constants["beta_star_conservative"] = est.beta_star_conservative;
}

void run_mixing(const RunConfig& cfg, RunManifest& manifest) {
  const PairHMM& hmm = need_irreducible_model(cfg);
  const ChainSpec& chain = hmm.chain();
  const MixingReport best = tau_min(chain);
  record_mixing(best, manifest);
  record_doeblin(doeblin_constants(hmm, default_max_k(hmm.states())), manifest);

  const std::size_t T = cfg.params.n.value_or(10);
  const ChainSpec product = product_chain(hmm);
  CsvWriter dbar_csv({"t", "dbar_hidden", "dbar_product"});
  for (std::size_t t = 1; t <= T; ++t) {
    const auto lt = static_cast<long>(t);
    dbar_csv.row(static_cast<std::uint64_t>(t), dbar(chain, lt), dbar(product, lt));
  }
  dbar_csv.save(cfg.out_dir, "dbar.csv", manifest);

  const MixingOptions mo;
  CsvWriter mix({"epsilon", "tau_eps", "objective"});
  for (int g = 0; g < mo.grid; ++g) {
    const double eps = static_cast<double>(g) / mo.grid;
    long tau = 0;
    try {
      tau = mixing_time(chain, eps, mo);
    } catch (const LabError& e) {
      if (e.kind() == ErrorKind::IterationCap && g == 0) continue;
      throw;
    }
    const double f = (2.0 - eps) / (1.0 - eps);
    mix.row(eps, tau, static_cast<double>(tau) * f * f);
  }
  mix.save(cfg.out_dir, "mixing.csv", manifest);
}

void run_partitions(const RunConfig& cfg, RunManifest& manifest) {
  const int k = cfg.params.k.value_or(2);
  const int n = static_cast<int>(cfg.params.n.value_or(2));
  PartitionOptions po;
  po.cap = cfg.params.partition_cap;
  const CountBoundReport report = count_bound_check(k, n, po);
  CsvWriter csv({"r", "count", "bound", "ok"});
  for (const auto& row : report.rows) csv.row(row.r, row.count, to_string(row.bound), row.ok);
  csv.save(cfg.out_dir, "partitions.csv", manifest);
  manifest.constants["k"] = k;
  manifest.constants["n"] = n;
  manifest.constants["total"] = static_cast<double>(report.total);
}

void run_hoeffding(const RunConfig& cfg, RunManifest& manifest) {
  const PairHMM& hmm = need_irreducible_model(cfg);
  const std::size_t n = cfg.params.n.value_or(100);
  const std::size_t reps = need_reps(cfg.params, 10'000);
  const HoeffdingReport r = hoeffding_tail_check(hmm, n, reps, cfg.params.t_grid, *cfg.params.seed,
                                                 estimator_options(cfg.params));
  CsvWriter csv({"t", "empirical", "bound", "ok"});
  for (const auto& row : r.rows) csv.row(row.t, row.empirical, row.bound, row.ok);
  csv.save(cfg.out_dir, "tail.csv", manifest);
  record_chain_constants(hmm, manifest);
  manifest.constants["center"] = r.center;
}

void run_coupling(const RunConfig& cfg, RunManifest& manifest) {
  const PairHMM& hmm = need_irreducible_model(cfg);
  const std::size_t n = cfg.params.n.value_or(50);
  const std::size_t reps = need_reps(cfg.params, 10'000);
  const CouplingReport r =
      coupling_decay_check(hmm, n, reps, *cfg.params.seed, estimator_options(cfg.params));
  CsvWriter csv({"K", "empirical", "bound", "ok"});
  for (const auto& row : r.rows) csv.row(static_cast<std::uint64_t>(row.K), row.empirical, row.bound, row.ok);
  csv.save(cfg.out_dir, "coupling.csv", manifest);
  record_doeblin(r.doeblin, manifest);
  if (r.log_slope) manifest.constants["log_slope"] = *r.log_slope;
}

SandwichReport sandwich_for(const RunConfig& cfg, RunManifest& manifest) {
  const PairHMM& hmm = need_irreducible_model(cfg);
  const auto grid = grid_or(cfg.params, {32, 128, 512, 2048});
  const std::size_t reps = need_reps(cfg.params, 1000);
  SandwichReport r = sandwich_check(hmm, grid, reps, *cfg.params.seed, estimator_options(cfg.params));
  record_mixing(r.mixing, manifest);
  record_doeblin(r.doeblin, manifest);
  manifest.constants["gamma_hat"] = r.gamma.gamma_hat;
  manifest.constants["gamma_used"] = r.gamma_used;
  manifest.constants["fekete_lower"] = r.gamma.fekete_lower;
  manifest.constants["C_hat"] = r.gamma.C_hat;
  manifest.constants["beta_star_lb"] = r.beta_star_lb;
  manifest.constants["beta_n"] = static_cast<double>(r.beta_n);
  manifest.constants["C"] = 2.0 * r.mixing.A * std::sqrt(10.0);
  return r;
}

void run_rate(const RunConfig& cfg, RunManifest& manifest) {
  const PairHMM& hmm = need_irreducible_model(cfg);
  const SandwichReport s = sandwich_for(cfg, manifest);
  RateInputs in;
  in.gamma_hat = s.gamma_used;
  in.beta_star_lb = s.beta_star_lb;
  in.mixing = s.mixing;
  in.doeblin = s.doeblin;
  CsvWriter csv({"n", "gamma_hat", "beta_star_lb", "C", "A", "c", "alpha", "stationary", "lower",
                 "upper", "h_n"});
  for (const auto& m : s.gamma.means) {
    if (m.n < 2) continue;
    const RateBoundReport r = rate_bound_evaluate(hmm, m.n, in);
    csv.row(static_cast<std::uint64_t>(r.n), r.gamma_hat, r.beta_star_lb, r.C, r.A, r.c, r.alpha,
            r.stationary, r.lower, r.upper, r.h_n ? cell(*r.h_n) : std::string());
  }
  csv.save(cfg.out_dir, "rate.csv", manifest);
  CsvWriter mean({"n", "reps", "mean", "std_err", "exact"});
  for (const auto& m : s.gamma.means) {
    mean.row(static_cast<std::uint64_t>(m.n), static_cast<std::uint64_t>(m.reps), m.mean, m.std_err,
             std::string());
  }
  mean.save(cfg.out_dir, "mean.csv", manifest);
}

void run_sandwich(const RunConfig& cfg, RunManifest& manifest) {
  const SandwichReport s = sandwich_for(cfg, manifest);
  CsvWriter csv({"n", "mean", "se", "lower", "upper", "inside"});
  for (const auto& row : s.rows) {
    csv.row(static_cast<std::uint64_t>(row.n), row.mean, row.se, row.lower, row.upper, row.inside);
  }
  csv.save(cfg.out_dir, "sandwich.csv", manifest);
}

void write_manifest(const fs::path& dir, const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["config_hash"] = m.config_hash;
  j["version"] = m.version;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["seed"] = m.seed;
  j["threads"] = m.threads;
  j["outputs"] = m.outputs;
  nlohmann::ordered_json constants = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.constants) {
    if (std::isfinite(v)) {
      constants[k] = v;
    } else {
      constants[k] = format_double(v);
    }
  }
  j["constants"] = constants;
  std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write manifest.json");
}

}  // namespace

RunManifest run(const RunConfig& config) {
  if (!config.params.seed) invalid("no seed given: pass --seed, set LAB_SEED or add \"seed\" to the config");
  if (config.params.threads < 1) invalid("threads must be at least 1");
  if (config.out_dir.empty()) invalid("no output directory given");
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) invalid("cannot create output directory " + config.out_dir.string() + ": " + ec.message());

  RunManifest manifest;
  manifest.command = std::string(to_string(config.command));
  manifest.config_hash = fnv1a_hex(config.source);
  manifest.seed = *config.params.seed;
  manifest.threads = config.params.threads;
  manifest.started = timestamp();
  switch (config.command) {
    case Command::simulate: run_simulate(config, manifest); break;
    case Command::beta: run_beta(config, manifest); break;
    case Command::mixing: run_mixing(config, manifest); break;
    case Command::partitions: run_partitions(config, manifest); break;
    case Command::hoeffding: run_hoeffding(config, manifest); break;
    case Command::coupling: run_coupling(config, manifest); break;
    case Command::rate: run_rate(config, manifest); break;
    case Command::sandwich: run_sandwich(config, manifest); break;
  }
  manifest.finished = timestamp();
  write_manifest(config.out_dir, manifest);
  return manifest;
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ConfigInvalid: return 2;
    case ErrorKind::EnumerationCapExceeded: return 3;
    case ErrorKind::NotIrreducible: return 4;
    case ErrorKind::NotMixing: return 5;
    case ErrorKind::IterationCap: return 6;
    case ErrorKind::NoPositivePower: return 7;
    case ErrorKind::LengthMismatch: return 8;
    case ErrorKind::AlphabetTooLarge: return 9;
    case ErrorKind::InvalidPartition: return 10;
    case ErrorKind::NeedTwoGridPoints: return 11;
    case ErrorKind::PreconditionViolated: return 12;
    case ErrorKind::DimensionMismatch: return 13;
  }
  return 1;
}

std::string error_json(std::string_view kind, const std::string& message) {
  nlohmann::json j;
  j["error"] = std::string(kind);
  j["message"] = message;
  return j.dump();
}

}  // namespace lcslab
