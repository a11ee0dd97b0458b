#pragma once

#include "lcslab/hmm_model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lcslab {

enum class Command { simulate, beta, mixing, partitions, hoeffding, coupling, rate, sandwich };

std::string_view to_string(Command c) noexcept;
/// Throws ConfigInvalid on unknown names.
Command parse_command(std::string_view name);

struct RunParams {
  std::optional<std::size_t> n;
  std::vector<std::size_t> n_grid;
  std::optional<std::size_t> reps;
  std::optional<std::uint64_t> seed;
  /// Joint-atom cap for exact enumeration.
  std::uint64_t cap = 100'000'000;
  /// Cap on enumerated partitions.
  std::uint64_t partition_cap = 10'000'000;
  unsigned threads = 1;
  /// Block count for the partitions command.
  std::optional<int> k;
  std::vector<double> t_grid;
};

struct RunConfig {
  Command command = Command::simulate;
  /// Canonical model description, reduced to a pair model. Only the
  /// partitions command runs without one.
  std::optional<PairHMM> model;
  /// Present when the config described two independent HMMs.
  std::optional<TwoChainHMM> two_chain;
  RunParams params;
  std::filesystem::path out_dir;
  /// Raw config text, hashed into the manifest.
  std::string source;
};

/**
 * Model JSON, either a pair model
 *   {"chain": {"states": [...], "mu": [...], "P": [[...]]},
 *    "alphabet": [...], "emit": {"<state>": [[...]], ...},
 *    "state_swap": [...], "x_hidden": [...]}   (last two optional)
 * or two independent HMMs
 *   {"independent": true, "chain": {...}, "alphabet": [...],
 *    "emit": {"<state>": [...], ...}}
 * optionally wrapped as {"two_hmm": {...}}.
 */
struct ParsedModel {
  PairHMM model;
  std::optional<TwoChainHMM> two_chain;
};
ParsedModel parse_model(std::string_view json_text);

/// Reads {"model": ..., "seed": ..., "params": {...}} or a bare model. The
/// model may be omitted in the wrapped form.
RunConfig load_run_config(Command command, const std::filesystem::path& file);
RunConfig parse_run_config(Command command, std::string_view json_text);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view text);

/// %.17g formatting.
std::string format_double(double x);

}  // namespace lcslab
