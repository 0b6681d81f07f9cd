#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pbcover/experiments.hpp"

namespace pbcover {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "1.0.0";

/// Invalid configuration; `path` is a JSON pointer into the document.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class RunKind { PbEval, Minimize, Sweep, Check, Hilbert };

std::string to_string(RunKind kind);
RunKind run_kind_from_string(const std::string& name);

struct RunConfig {
  RunKind kind = RunKind::PbEval;
  nlohmann::json document;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = "out";
  int threads = 1;
};

/// Validates against the versioned schema.  `kind` (a subcommand) and
/// `seed` override the document when given.
RunConfig parse_run_config(const nlohmann::json& document, std::optional<RunKind> kind = {},
                           std::optional<std::uint64_t> seed = {});
RunConfig load_run_config(const std::filesystem::path& path, std::optional<RunKind> kind = {},
                          std::optional<std::uint64_t> seed = {});

/// Surface, cover and partition described by a validated config.
struct Scenario {
  ChartedSurface surface;
  std::optional<DiscreteCover> discrete;
  std::optional<ContinuousCover> continuous;
  BumpProfile profile;
  FamilySpec family;
  EmbeddingOptions embedding;

  Partition partition() const;
};

Scenario build_scenario(const RunConfig& config);
PbOptions pb_options(const RunConfig& config);
OptimizerConfig optimizer_config(const RunConfig& config);

struct RunOutcome {
  int exit_code = 0;
  std::string message;
  std::vector<std::filesystem::path> files;
};

/// Exit 0 on success, 1 on input errors, 2 on failed checks.  Writes
/// result.json, tables, plot data and manifest.json under config.out.
RunOutcome run(const RunConfig& config);

/// sum_kl a_k b_l P_kl over the grid, one CSV row per point.
void write_bracket_heatmap(std::ostream& out, const BracketMatrixField& field, const PbReport& report);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace pbcover
