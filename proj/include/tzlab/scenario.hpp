#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tzlab/tolerances.hpp"
#include "tzlab/torus_weights.hpp"

namespace tzlab {

using json = nlohmann::ordered_json;

/// Configuration problem with a JSON pointer to the offending value.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, std::string message)
      : std::runtime_error(path.empty() ? message : path + ": " + message),
        path_(std::move(path)),
        message_(std::move(message)) {}
  const std::string& path() const { return path_; }
  const std::string& message() const { return message_; }

 private:
  std::string path_;
  std::string message_;
};

struct Preset {
  std::string id;
  std::vector<std::vector<std::int64_t>> weights;
  std::string description;
  IntVec default_varpi;
  bool evaluation_only = false;
  bool custom = false;
};

class PresetRegistry {
 public:
  /// Registry holding the built-in presets.
  static PresetRegistry builtin();
  void add(Preset p);  // throws ConfigError on duplicate id
  const Preset* find(const std::string& id) const;
  const std::vector<Preset>& all() const { return presets_; }

 private:
  std::vector<Preset> presets_;
};

enum class Task { Dims, KernelDiag, Asymptotics, Scaling, Localization, DimIntegral, Identities };

std::string task_name(Task t);
Task parse_task(const std::string& s, const std::string& path);

struct Scenario {
  std::string name;
  std::optional<std::string> preset;
  std::vector<std::vector<std::int64_t>> weights;  // resolved
  IntVec varpi;
  Task task = Task::Dims;
  json params = json::object();
  json source;  // the scenario object exactly as read

  /// Canonical JSON form; parse_scenario(to_json()) reproduces it.
  json to_json() const;
};

struct Config {
  std::vector<Scenario> scenarios;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string tolerance_profile = "default";
  json tolerance_overrides = json::object();
};

Scenario parse_scenario(const json& j, const PresetRegistry& reg, const std::string& path);
Config parse_config(const json& j, PresetRegistry& reg);
Config load_config(const std::string& file, PresetRegistry& reg);

struct Verdict {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string comparison;  // e.g. "<=", ">=", "within_sigma"
  std::string note;
};

struct RunContext {
  Tolerances tol;
  std::uint64_t seed = 20240611;
  int jobs = 0;
  std::string tolerance_profile = "default";
};

struct ScenarioOutcome {
  json report;
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
  std::vector<Verdict> verdicts;
  bool all_pass() const;
};

/// Runs one scenario; throws ConfigError for bad parameters.
ScenarioOutcome run_scenario(const Scenario& s, const RunContext& ctx);

std::string format_number(double v);
std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

/// Columns (k, exact, predicted, ratio, target, pass) for scaling reports,
/// (s, gamma, r2, closed_form, pass) for localization reports.
std::string emit_profile_table(const json& report);

std::string version_string();

}  // namespace tzlab
