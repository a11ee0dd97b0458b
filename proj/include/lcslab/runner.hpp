#pragma once

#include "lcslab/config.hpp"
#include "lcslab/error.hpp"

#include <map>
#include <string>
#include <vector>

namespace lcslab {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::string version = kToolVersion;
  std::string started;
  std::string finished;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  /// Emitted CSV files, relative to the output directory.
  std::vector<std::string> outputs;
  /// Derived constants the command used (A, τ_min, ε, k, α, c, ...).
  std::map<std::string, double> constants;
};

/// Executes the command, writes its CSV files and manifest.json into
/// config.out_dir, and returns the manifest.
RunManifest run(const RunConfig& config);

/// Process exit status for a failure of the given kind; success is 0 and
/// anything that is not a LabError maps to 1.
int exit_code(ErrorKind kind) noexcept;

/// {"error": "<kind>", "message": "..."} on one line.
std::string error_json(std::string_view kind, const std::string& message);
inline std::string error_json(ErrorKind kind, const std::string& message) {
  return error_json(to_string(kind), message);
}

}  // namespace lcslab
