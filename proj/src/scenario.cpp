#include "tzlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tzlab/errors.hpp"

namespace tzlab {

std::string version_string() { return "tzlab 0.1.0"; }

PresetRegistry PresetRegistry::builtin() {
  PresetRegistry r;
  r.add({"p1-standard", {{1, 1}}, "P^1, t.(z0,z1) = (t z0, t z1); Phi = 1, the classical level-k kernel (k+1)/pi", {1}});
  r.add({"p1-weighted-s2", {{1, 2}}, "P^1, t.(z0,z1) = (t z0, t^2 z1); Phi(P^1) = [1,2], stabilizer mu_2 at [0:1]", {1}});
  r.add({"p1-weighted-s3", {{1, 3}}, "P^1, t.(z0,z1) = (t z0, t^3 z1); Phi(P^1) = [1,3], stabilizer mu_3 at [0:1]", {1}});
  r.add({"veronese-conic",
         {{1, 3}},
         "conic in P^2 parametrized by the degree-2 Veronese map of P^1 with weights (1,2,3) on P^2; "
         "pulled back it is P^1 with weights (1,3) and level 2k, so use varpi = 2k",
         {2}});
  r.add({"p1-weights-22", {{2, 2}}, "P^1, t.(z0,z1) = (t^2 z0, t^2 z1); generic stabilizer mu_2, isotypes only for even k", {2}});
  r.add({"p2-weights-123", {{1, 2, 3}}, "P^2, weights (1,2,3); Phi(P^2) = [1,3]", {1}});
  r.add({"p3-weights-1234", {{1, 2, 3, 4}}, "P^3, weights (1,2,3,4); Phi(P^3) = [1,4]", {1}});
  r.add({"p4-weights-12345", {{1, 2, 3, 4, 5}}, "P^4, weights (1,2,3,4,5); Phi(P^4) = [1,5]", {1}});
  r.add({"p5-weights-123345", {{1, 2, 3, 3, 4, 5}}, "P^5, weights (1,2,3,3,4,5) on Pluecker coordinates (p01,p02,p03,p12,p13,p23)", {1}});
  r.add({"grassmann-g24",
         {{1, 2, 3, 3, 4, 5}},
         "G(2,4) in P^5 via Pluecker coordinates with weights (1,2,3,3,4,5); "
         "Phi = (|p01|^2+2|p02|^2+3|p03|^2+3|p12|^2+4|p13|^2+5|p23|^2)/|p|^2 on the Klein quadric; "
         "moment-map evaluation only (kernels would be those of the ambient P^5)",
         {1},
         true});
  r.add({"p1-t2", {{1, 0}, {0, 1}}, "P^1 with the T^2 action (t1 z0, t2 z1); isotype kvarpi is spanned by z0^{k varpi0} z1^{k varpi1}", {1, 1}});
  r.add({"p2-t2",
         {{1, 0, 1}, {0, 1, 1}},
         "P^2 with the T^2 action (t1 z0, t2 z1, t1 t2 z2); Phi never vanishes; dim of isotype k(varpi0,varpi1) "
         "is 1 + k min(varpi0,varpi1)",
         {1, 1}});
  return r;
}

void PresetRegistry::add(Preset p) {
  if (find(p.id)) throw ConfigError("/presets", "duplicate preset id '" + p.id + "'");
  presets_.push_back(std::move(p));
}

const Preset* PresetRegistry::find(const std::string& id) const {
  for (const auto& p : presets_)
    if (p.id == id) return &p;
  return nullptr;
}

std::string task_name(Task t) {
  switch (t) {
    case Task::Dims: return "dims";
    case Task::KernelDiag: return "kernel-diag";
    case Task::Asymptotics: return "asymptotics";
    case Task::Scaling: return "scaling";
    case Task::Localization: return "localization";
    case Task::DimIntegral: return "dim-integral";
    case Task::Identities: return "identities";
  }
  return "?";
}

Task parse_task(const std::string& s, const std::string& path) {
  for (Task t : {Task::Dims, Task::KernelDiag, Task::Asymptotics, Task::Scaling, Task::Localization, Task::DimIntegral,
                 Task::Identities})
    if (task_name(t) == s) return t;
  throw ConfigError(path, "unknown task '" + s +
                              "' (expected dims, kernel-diag, asymptotics, scaling, localization, dim-integral, identities)");
}

namespace {

std::vector<std::vector<std::int64_t>> parse_weights(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "weights must be a nonempty array of rows");
  std::vector<std::vector<std::int64_t>> rows;
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string rp = path + "/" + std::to_string(r);
    if (!j[r].is_array() || j[r].empty()) throw ConfigError(rp, "row must be a nonempty array of integers");
    std::vector<std::int64_t> row;
    for (std::size_t c = 0; c < j[r].size(); ++c) {
      if (!j[r][c].is_number_integer()) throw ConfigError(rp + "/" + std::to_string(c), "weight must be an integer");
      row.push_back(j[r][c].get<std::int64_t>());
    }
    if (!rows.empty() && row.size() != rows.front().size()) throw ConfigError(rp, "rows have different lengths");
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Scenario parse_scenario(const json& j, const PresetRegistry& reg, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "scenario must be an object");
  static const std::vector<std::string> known = {"name", "preset", "weights", "varpi", "task", "params"};
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError(path + "/" + key, "unknown key");
  Scenario s;
  s.source = j;
  if (!j.contains("name") || !j["name"].is_string()) throw ConfigError(path + "/name", "missing or non-string 'name'");
  s.name = j["name"].get<std::string>();
  if (s.name.empty() || s.name.find_first_of("/\\") != std::string::npos)
    throw ConfigError(path + "/name", "name must be nonempty and contain no path separators");
  const bool has_preset = j.contains("preset"), has_weights = j.contains("weights");
  if (has_preset == has_weights) throw ConfigError(path, "exactly one of 'preset' or 'weights' is required");
  if (has_preset) {
    if (!j["preset"].is_string()) throw ConfigError(path + "/preset", "preset must be a string");
    s.preset = j["preset"].get<std::string>();
    const Preset* p = reg.find(*s.preset);
    if (!p) throw ConfigError(path + "/preset", "unknown preset '" + *s.preset + "'");
    s.weights = p->weights;
  } else {
    s.weights = parse_weights(j["weights"], path + "/weights");
  }
  if (!j.contains("varpi")) throw ConfigError(path + "/varpi", "missing required key 'varpi'");
  const json& v = j["varpi"];
  if (!v.is_array() || v.size() != s.weights.size())
    throw ConfigError(path + "/varpi", "varpi must be an array of " + std::to_string(s.weights.size()) + " integers");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number_integer()) throw ConfigError(path + "/varpi/" + std::to_string(i), "varpi entries must be integers");
    s.varpi.push_back(v[i].get<std::int64_t>());
  }
  if (!j.contains("task") || !j["task"].is_string()) throw ConfigError(path + "/task", "missing or non-string 'task'");
  s.task = parse_task(j["task"].get<std::string>(), path + "/task");
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw ConfigError(path + "/params", "params must be an object");
    s.params = j["params"];
  }
  return s;
}

json Scenario::to_json() const {
  json j = json::object();
  j["name"] = name;
  if (preset) j["preset"] = *preset;
  else j["weights"] = weights;
  j["varpi"] = varpi;
  j["task"] = task_name(task);
  j["params"] = params;
  return j;
}

Config parse_config(const json& j, PresetRegistry& reg) {
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  static const std::vector<std::string> known = {"scenarios", "output_dir", "seed", "jobs", "tolerance_profile",
                                                 "tolerances", "presets"};
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("/" + key, "unknown key");
  Config c;
  if (j.contains("presets")) {
    const json& ps = j["presets"];
    if (!ps.is_array()) throw ConfigError("/presets", "presets must be an array");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const std::string p = "/presets/" + std::to_string(i);
      if (!ps[i].is_object() || !ps[i].contains("id") || !ps[i]["id"].is_string())
        throw ConfigError(p + "/id", "custom preset needs a string 'id'");
      if (!ps[i].contains("weights")) throw ConfigError(p + "/weights", "custom preset needs 'weights'");
      Preset pr;
      pr.id = ps[i]["id"].get<std::string>();
      pr.weights = parse_weights(ps[i]["weights"], p + "/weights");
      pr.description = ps[i].value("description", std::string("user-registered weight matrix"));
      pr.custom = true;
      if (reg.find(pr.id)) throw ConfigError(p + "/id", "duplicate preset id '" + pr.id + "'");
      reg.add(std::move(pr));
    }
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) throw ConfigError("/output_dir", "output_dir must be a string");
    c.output_dir = j["output_dir"].get<std::string>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("/seed", "seed must be a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("jobs")) {
    if (!j["jobs"].is_number_integer() || j["jobs"].get<std::int64_t>() < 0)
      throw ConfigError("/jobs", "jobs must be a nonnegative integer");
    c.jobs = j["jobs"].get<int>();
  }
  if (j.contains("tolerance_profile")) {
    if (!j["tolerance_profile"].is_string()) throw ConfigError("/tolerance_profile", "must be a string");
    c.tolerance_profile = j["tolerance_profile"].get<std::string>();
    try {
      (void)Tolerances::profile(c.tolerance_profile);
    } catch (const InputError& e) {
      throw ConfigError("/tolerance_profile", e.what());
    }
  }
  if (j.contains("tolerances")) {
    if (!j["tolerances"].is_object()) throw ConfigError("/tolerances", "tolerances must be an object");
    Tolerances probe;
    for (const auto& [key, val] : j["tolerances"].items()) {
      if (!val.is_number()) throw ConfigError("/tolerances/" + key, "tolerance must be a number");
      try {
        probe.set(key, val.get<double>());
      } catch (const InputError& e) {
        throw ConfigError("/tolerances/" + key, e.what());
      }
    }
    c.tolerance_overrides = j["tolerances"];
  }
  if (!j.contains("scenarios")) throw ConfigError("/scenarios", "missing required key 'scenarios'");
  const json& sc = j["scenarios"];
  if (!sc.is_array() || sc.empty()) throw ConfigError("/scenarios", "scenarios must be a nonempty array");
  for (std::size_t i = 0; i < sc.size(); ++i) {
    c.scenarios.push_back(parse_scenario(sc[i], reg, "/scenarios/" + std::to_string(i)));
    for (std::size_t q = 0; q + 1 < c.scenarios.size(); ++q)
      if (c.scenarios[q].name == c.scenarios.back().name)
        throw ConfigError("/scenarios/" + std::to_string(i) + "/name", "duplicate scenario name");
  }
  return c;
}

Config load_config(const std::string& file, PresetRegistry& reg) {
  std::ifstream in(file);
  if (!in) throw ConfigError("", "cannot open config file '" + file + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j, reg);
}

bool ScenarioOutcome::all_pass() const {
  for (const auto& v : verdicts)
    if (!v.pass) return false;
  return true;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return os.str();
}

}  // namespace tzlab
