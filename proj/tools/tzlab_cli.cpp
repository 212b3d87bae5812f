#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>

#include "tzlab/parallel.hpp"
#include "tzlab/scenario.hpp"

namespace fs = std::filesystem;
using namespace tzlab;

namespace {

std::string weights_text(const std::vector<std::vector<std::int64_t>>& w) {
  std::string s = "[";
  for (std::size_t r = 0; r < w.size(); ++r) {
    s += r ? ",[" : "[";
    for (std::size_t c = 0; c < w[r].size(); ++c) s += (c ? "," : "") + std::to_string(w[r][c]);
    s += "]";
  }
  return s + "]";
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

int cmd_run(const std::string& config_path, std::optional<std::string> out_flag, std::optional<std::uint64_t> seed_flag,
            std::optional<int> jobs_flag, std::optional<std::string> profile_flag) {
  PresetRegistry reg = PresetRegistry::builtin();
  Config cfg;
  RunContext rc;
  try {
    cfg = load_config(config_path, reg);
    rc.tolerance_profile = profile_flag.value_or(cfg.tolerance_profile);
    try {
      rc.tol = Tolerances::profile(rc.tolerance_profile);
    } catch (const std::exception& e) {
      throw ConfigError("/tolerance_profile", e.what());
    }
    for (const auto& [k, v] : cfg.tolerance_overrides.items()) rc.tol.set(k, v.get<double>());
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  if (seed_flag) rc.seed = *seed_flag;
  else if (cfg.seed) rc.seed = *cfg.seed;
  const int jobs = resolve_jobs(jobs_flag ? *jobs_flag : cfg.jobs.value_or(0));

  fs::path out_dir = "tzlab-out";
  if (const char* env = std::getenv("TZLAB_OUT_DIR"); env && *env) out_dir = env;
  if (cfg.output_dir) out_dir = *cfg.output_dir;
  if (out_flag) out_dir = *out_flag;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "config error: cannot create output directory " << out_dir << ": " << ec.message() << "\n";
    return 1;
  }

  const std::size_t n = cfg.scenarios.size();
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  rc.jobs = std::max(1, jobs / workers);
  std::vector<std::optional<ScenarioOutcome>> outcomes(n);
  std::vector<std::string> errors(n);
  std::mutex io_mu;
  parallel_for(n, workers, [&](std::size_t i) {
    const Scenario& s = cfg.scenarios[i];
    try {
      ScenarioOutcome o = run_scenario(s, rc);
      write_file(out_dir / (s.name + ".json"), o.report.dump(2) + "\n");
      write_file(out_dir / (s.name + ".csv"), csv_text(o.csv_header, o.csv_rows));
      std::lock_guard lk(io_mu);
      for (const auto& v : o.verdicts)
        std::cout << (v.pass ? "PASS " : "FAIL ") << s.name << " " << v.name << " value=" << format_number(v.value)
                  << " threshold=" << format_number(v.threshold) << " (" << v.comparison << ")\n";
      outcomes[i] = std::move(o);
    } catch (const ConfigError& e) {
      errors[i] = "/scenarios/" + std::to_string(i) + e.path() + ": " + e.message();
    }
  });
  bool config_failed = false, all_pass = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i].empty()) {
      std::cerr << "config error: " << errors[i] << "\n";
      config_failed = true;
    } else if (!outcomes[i]->all_pass()) {
      all_pass = false;
    }
  }
  if (config_failed) return 1;
  std::cout << (all_pass ? "all verdicts pass" : "verdict failure") << " (" << n << " scenarios, reports in "
            << out_dir.string() << ")\n";
  return all_pass ? 0 : 2;
}

int cmd_list(const std::optional<std::string>& config_path) {
  PresetRegistry reg = PresetRegistry::builtin();
  if (config_path) {
    try {
      load_config(*config_path, reg);
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 1;
    }
  }
  for (const auto& p : reg.all()) {
    std::cout << p.id << "  " << weights_text(p.weights);
    if (p.evaluation_only) std::cout << "  [evaluation-only]";
    if (p.custom) std::cout << "  [custom]";
    std::cout << "\n    " << p.description << "\n";
  }
  return 0;
}

int cmd_explain(const std::string& id, const std::optional<std::string>& config_path) {
  PresetRegistry reg = PresetRegistry::builtin();
  if (config_path) {
    try {
      load_config(*config_path, reg);
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 1;
    }
  }
  const Preset* p = reg.find(id);
  if (!p) {
    std::cerr << "unknown preset '" << id << "'\n";
    return 1;
  }
  const WeightedAction a = validate_action(IntMatrix::from_rows(p->weights));
  std::cout << "id: " << p->id << "\nweights: " << weights_text(p->weights) << "\nd: " << a.d << "\ng: " << a.g
            << "\ndefault varpi:";
  for (auto v : p->default_varpi) std::cout << " " << v;
  std::cout << "\nproper: " << (a.has_cert() ? "yes" : "no");
  if (a.cert) {
    std::cout << " (certificate";
    for (const auto& q : *a.cert) std::cout << " " << q.str();
    std::cout << ")";
  }
  std::cout << "\ngeneric stabilizer order: " << generic_stabilizer_order(a);
  if (p->evaluation_only) std::cout << "\nevaluation-only: yes";
  std::cout << "\n" << p->description << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equivariant Szego kernel checks on weighted projective torus actions"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  std::string config;
  std::optional<std::string> out, profile, list_config, explain_config;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string preset_id;

  auto* run = app.add_subcommand("run", "run every scenario in a config file");
  run->add_option("--config", config, "config JSON file")->required();
  run->add_option("--out", out, "output directory (overrides TZLAB_OUT_DIR and the config)");
  run->add_option("--seed", seed, "base seed for Monte Carlo tasks");
  run->add_option("--jobs", jobs, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  run->add_option("--tolerance-profile", profile, "tolerance profile")->check(CLI::IsMember({"default", "strict"}));

  auto* list = app.add_subcommand("list-presets", "list built-in presets (and custom ones from --config)");
  list->add_option("--config", list_config, "config JSON file with custom presets");

  auto* explain = app.add_subcommand("explain", "describe one preset");
  explain->add_option("preset", preset_id, "preset id")->required();
  explain->add_option("--config", explain_config, "config JSON file with custom presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  try {
    if (*run) return cmd_run(config, out, seed, jobs, profile);
    if (*list) return cmd_list(list_config);
    if (*explain) return cmd_explain(preset_id, explain_config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
