#include "lcslab/runner.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

namespace {

std::uint64_t parse_seed(const std::string& text, const char* source) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used, 10);
    if (used != text.size() || text.front() == '-') throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw lcslab::LabError(lcslab::ErrorKind::ConfigInvalid,
                           std::string(source) + " is not a nonnegative integer: " + text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments on longest common subsequences of hidden Markov pairs"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::string> seed;
  std::optional<std::size_t> reps;
  std::optional<std::size_t> n;
  std::vector<std::size_t> n_grid;
  std::optional<std::uint64_t> cap;
  std::optional<unsigned> threads;
  std::optional<int> k;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", "Monte Carlo mean of LC_n / n, plus one sample path"},
      {"beta", "Exact beta-mixing coefficients and h(n) for n = 1..N"},
      {"mixing", "d-bar sequence, mixing times and Doeblin constants"},
      {"partitions", "Counts of r-partitions against the binomial bound"},
      {"hoeffding", "Empirical upper tail of LC_n against the Hoeffding bound"},
      {"coupling", "Meeting-time tail of the coupling against c * alpha^K"},
      {"rate", "Rate-of-convergence bounds over an n grid"},
      {"sandwich", "Empirical means against the lower and upper rate bounds"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Model / run config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory")->required();
    sub->add_option("--seed", seed, "Base seed (overrides LAB_SEED and the config)");
    sub->add_option("--reps", reps, "Monte Carlo replicates");
    auto* n_opt = sub->add_option("--n", n, "Word length (block length for partitions)");
    sub->add_option("--n-grid", n_grid, "Comma-separated word lengths")->delimiter(',')->excludes(n_opt);
    sub->add_option("--cap", cap, "Enumeration cap (joint atoms, or partitions)");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--k", k, "Number of length-n blocks (partitions)")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lcslab::exit_code(lcslab::ErrorKind::ConfigInvalid);
  }

  try {
    const auto command = lcslab::parse_command(app.get_subcommands().front()->get_name());
    lcslab::RunConfig cfg = lcslab::load_run_config(command, config_path);
    cfg.out_dir = out_dir;
    if (const char* env = std::getenv("LAB_SEED"); env && *env) cfg.params.seed = parse_seed(env, "LAB_SEED");
    if (seed) cfg.params.seed = parse_seed(*seed, "--seed");
    if (reps) cfg.params.reps = *reps;
    if (n) {
      cfg.params.n = *n;
      cfg.params.n_grid.clear();
    }
    if (!n_grid.empty()) cfg.params.n_grid = n_grid;
    if (cap) {
      if (command == lcslab::Command::partitions) {
        cfg.params.partition_cap = *cap;
      } else {
        cfg.params.cap = *cap;
      }
    }
    if (threads) cfg.params.threads = *threads;
    if (k) cfg.params.k = *k;

    const auto manifest = lcslab::run(cfg);
    for (const auto& f : manifest.outputs) std::cout << (cfg.out_dir / f).string() << '\n';
    return 0;
  } catch (const lcslab::LabError& e) {
    std::cerr << lcslab::error_json(e.kind(), e.what()) << '\n';
    return lcslab::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << lcslab::error_json("Internal", e.what()) << '\n';
    return 1;
  }
}
