#include "lcslab/config.hpp"

#include "lcslab/error.hpp"

#include <json.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lcslab {

namespace {

using json = nlohmann::json;

[[noreturn]] void invalid(const std::string& what) { throw LabError(ErrorKind::ConfigInvalid, what); }

const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) invalid(std::string("missing field '") + key + "'");
  return obj.at(key);
}

std::vector<double> to_vector(const json& j, const char* what) {
  if (!j.is_array()) invalid(std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) invalid(std::string(what) + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Matrix to_matrix(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) invalid(std::string(what) + " must be a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  Matrix M;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto row = to_vector(j[static_cast<std::size_t>(r)], what);
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      M.resize(rows, cols);
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      invalid(std::string(what) + " has ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) M(r, c) = row[static_cast<std::size_t>(c)];
  }
  return M;
}

Vector to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<std::string> to_strings(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) invalid(std::string(what) + " must be a nonempty array");
  std::vector<std::string> out;
  for (const auto& x : j) {
    if (x.is_string()) {
      out.push_back(x.get<std::string>());
    } else if (x.is_number_integer()) {
      out.push_back(std::to_string(x.get<long long>()));
    } else {
      invalid(std::string(what) + " entries must be strings or integers");
    }
  }
  return out;
}

ChainSpec parse_chain(const json& j) {
  const auto mu = to_eigen(to_vector(field(j, "mu"), "chain.mu"));
  Matrix P = to_matrix(field(j, "P"), "chain.P");
  if (j.contains("states")) return ChainSpec(to_strings(j.at("states"), "chain.states"), mu, P);
  return ChainSpec(mu, P);
}

// Emissions given either as an array indexed by state or an object keyed by
// state name.
std::vector<json> per_state(const json& emit, const ChainSpec& chain) {
  std::vector<json> out;
  if (emit.is_array()) {
    if (emit.size() != chain.size()) invalid("emit needs one entry per hidden state");
    for (const auto& e : emit) out.push_back(e);
  } else if (emit.is_object()) {
    if (emit.size() != chain.size()) invalid("emit needs one entry per hidden state");
    for (const auto& name : chain.states()) {
      if (!emit.contains(name)) invalid("emit has no entry for state '" + name + "'");
      out.push_back(emit.at(name));
    }
  } else {
    invalid("emit must be an array or an object");
  }
  return out;
}

ParsedModel parse_model_json(const json& root) {
  const json& j = root.contains("two_hmm") ? root.at("two_hmm") : root;
  const bool two = root.contains("two_hmm") || j.value("independent", false);
  ChainSpec chain = parse_chain(field(j, "chain"));
  auto alphabet = to_strings(field(j, "alphabet"), "alphabet");
  const auto A = static_cast<Eigen::Index>(alphabet.size());
  const auto entries = per_state(field(j, "emit"), chain);
  if (two) {
    Matrix emit(static_cast<Eigen::Index>(chain.size()), A);
    for (std::size_t z = 0; z < entries.size(); ++z) {
      const auto row = to_vector(entries[z], "emit");
      if (static_cast<Eigen::Index>(row.size()) != A) invalid("emission vectors must have |A| entries");
      emit.row(static_cast<Eigen::Index>(z)) = to_eigen(row).transpose();
    }
    TwoChainHMM model{chain, alphabet, emit, true};
    return {two_hmm_as_pair(model), model};
  }
  std::vector<Matrix> emit;
  for (const auto& e : entries) emit.push_back(to_matrix(e, "emit"));
  std::optional<std::vector<std::size_t>> swap;
  if (j.contains("state_swap")) {
    swap.emplace();
    for (const auto& x : j.at("state_swap")) {
      if (!x.is_number_unsigned()) invalid("state_swap entries must be state indices");
      swap->push_back(x.get<std::size_t>());
    }
  }
  PairHMM model(chain, alphabet, emit, swap);
  if (j.contains("x_hidden")) {
    std::vector<std::size_t> labels;
    for (const auto& x : j.at("x_hidden")) {
      if (!x.is_number_unsigned()) invalid("x_hidden entries must be nonnegative integers");
      labels.push_back(x.get<std::size_t>());
    }
    model = model.with_x_hidden(std::move(labels));
  }
  return {std::move(model), std::nullopt};
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    invalid(std::string("config is not valid JSON: ") + e.what());
  }
}

std::size_t positive_size(const json& j, const char* what) {
  if (!j.is_number_unsigned() || j.get<std::uint64_t>() == 0) invalid(std::string(what) + " must be a positive integer");
  return j.get<std::size_t>();
}

void apply_params(const json& p, RunParams& out) {
  if (!p.is_object()) invalid("params must be an object");
  for (const auto& [key, value] : p.items()) {
    if (key == "n") {
      out.n = positive_size(value, "n");
    } else if (key == "n_grid") {
      if (!value.is_array() || value.empty()) invalid("n_grid must be a nonempty array");
      out.n_grid.clear();
      for (const auto& x : value) out.n_grid.push_back(positive_size(x, "n_grid entry"));
    } else if (key == "reps") {
      out.reps = positive_size(value, "reps");
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) invalid("seed must be a nonnegative integer");
      out.seed = value.get<std::uint64_t>();
    } else if (key == "cap") {
      out.cap = positive_size(value, "cap");
    } else if (key == "partition_cap") {
      out.partition_cap = positive_size(value, "partition_cap");
    } else if (key == "threads") {
      out.threads = static_cast<unsigned>(positive_size(value, "threads"));
    } else if (key == "k") {
      out.k = static_cast<int>(positive_size(value, "k"));
    } else if (key == "t_grid") {
      out.t_grid = to_vector(value, "t_grid");
    } else {
      invalid("unknown parameter '" + key + "'");
    }
  }
}

constexpr std::array<std::pair<Command, std::string_view>, 8> kCommands{{
    {Command::simulate, "simulate"},
    {Command::beta, "beta"},
    {Command::mixing, "mixing"},
    {Command::partitions, "partitions"},
    {Command::hoeffding, "hoeffding"},
    {Command::coupling, "coupling"},
    {Command::rate, "rate"},
    {Command::sandwich, "sandwich"},
}};

}  // namespace

std::string_view to_string(Command c) noexcept {
  for (const auto& [cmd, name] : kCommands)
    if (cmd == c) return name;
  return "unknown";
}

Command parse_command(std::string_view name) {
  for (const auto& [cmd, n] : kCommands)
    if (n == name) return cmd;
  invalid("unknown command '" + std::string(name) + "'");
}

namespace {

// Shape errors in a model description are configuration errors.
ParsedModel parse_model_checked(const json& root) {
  try {
    return parse_model_json(root);
  } catch (const LabError& e) {
    if (e.kind() == ErrorKind::DimensionMismatch || e.kind() == ErrorKind::PreconditionViolated) {
      invalid(e.what());
    }
    throw;
  }
}

}  // namespace

ParsedModel parse_model(std::string_view json_text) { return parse_model_checked(parse_json(json_text)); }

RunConfig parse_run_config(Command command, std::string_view json_text) {
  const json root = parse_json(json_text);
  if (!root.is_object()) invalid("config must be a JSON object");
  const bool wrapped = root.contains("model") || root.contains("params") || root.contains("seed");
  RunConfig cfg{command, std::nullopt, std::nullopt, {}, {}, std::string(json_text)};
  if (wrapped && !root.contains("model")) {
    if (root.contains("seed")) apply_params(json{{"seed", root.at("seed")}}, cfg.params);
    if (root.contains("params")) apply_params(root.at("params"), cfg.params);
    return cfg;
  }
  ParsedModel parsed = parse_model_checked(wrapped ? root.at("model") : root);
  cfg.model = std::move(parsed.model);
  cfg.two_chain = std::move(parsed.two_chain);
  if (wrapped) {
    if (root.contains("seed")) apply_params(json{{"seed", root.at("seed")}}, cfg.params);
    if (root.contains("params")) apply_params(root.at("params"), cfg.params);
  }
  return cfg;
}

RunConfig load_run_config(Command command, const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) invalid("cannot read config file " + file.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(command, text.str());
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace lcslab
