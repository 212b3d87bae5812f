#include <doctest.h>

#include <string>

#include "tzlab/errors.hpp"
#include "tzlab/scenario.hpp"

using namespace tzlab;

namespace {

std::string config_error_path(const json& j) {
  PresetRegistry reg = PresetRegistry::builtin();
  try {
    parse_config(j, reg);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

json one(json scenario) { return {{"scenarios", json::array({scenario})}}; }

RunContext quick_context() {
  RunContext rc;
  rc.jobs = 2;
  return rc;
}

const Verdict* find_verdict(const ScenarioOutcome& o, const std::string& name) {
  for (const auto& v : o.verdicts)
    if (v.name == name) return &v;
  return nullptr;
}

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("built-in presets carry the literature weight lists") {
    const auto reg = PresetRegistry::builtin();
    REQUIRE(reg.find("p4-weights-12345"));
    CHECK(reg.find("p4-weights-12345")->weights == std::vector<std::vector<std::int64_t>>{{1, 2, 3, 4, 5}});
    CHECK(reg.find("p2-weights-123")->weights == std::vector<std::vector<std::int64_t>>{{1, 2, 3}});
    CHECK(reg.find("p2-t2")->weights == std::vector<std::vector<std::int64_t>>{{1, 0, 1}, {0, 1, 1}});
    CHECK(reg.find("p1-t2")->weights == std::vector<std::vector<std::int64_t>>{{1, 0}, {0, 1}});
    CHECK(reg.find("grassmann-g24")->evaluation_only);
    CHECK(reg.find("veronese-conic")->default_varpi == IntVec{2});
    CHECK(reg.find("nope") == nullptr);
    for (const auto& p : reg.all()) CHECK_NOTHROW(validate_action(IntMatrix::from_rows(p.weights)));
  }

  TEST_CASE("custom presets are registered and echoed") {
    PresetRegistry reg = PresetRegistry::builtin();
    const auto cfg = parse_config({{"presets", {{{"id", "mine"}, {"weights", {{1, 4, 9}}}}}},
                                   {"scenarios", {{{"name", "a"}, {"preset", "mine"}, {"varpi", {2}}, {"task", "dims"}}}}},
                                  reg);
    REQUIRE(reg.find("mine"));
    CHECK(reg.find("mine")->custom);
    CHECK(cfg.scenarios[0].weights == std::vector<std::vector<std::int64_t>>{{1, 4, 9}});
    CHECK(config_error_path({{"presets", {{{"id", "p1-t2"}, {"weights", {{1, 1}}}}}}, {"scenarios", json::array()}}) ==
          "/presets/0/id");
  }

  TEST_CASE("configuration errors point into the document") {
    const json base = {{"name", "s"}, {"preset", "p1-standard"}, {"varpi", {1}}, {"task", "dims"}};
    CHECK(config_error_path(json::array()) == "");
    CHECK(config_error_path({{"scenarios", json::array()}}) == "/scenarios");
    CHECK(config_error_path({{"bogus", 1}, {"scenarios", json::array({base})}}) == "/bogus");
    json j = base;
    j.erase("varpi");
    CHECK(config_error_path(one(j)) == "/scenarios/0/varpi");
    j = base;
    j["varpi"] = {1.5};
    CHECK(config_error_path(one(j)) == "/scenarios/0/varpi/0");
    j = base;
    j["varpi"] = {1, 2};
    CHECK(config_error_path(one(j)) == "/scenarios/0/varpi");
    j = base;
    j["preset"] = "missing";
    CHECK(config_error_path(one(j)) == "/scenarios/0/preset");
    j = base;
    j["weights"] = {{1, 2}};
    CHECK(config_error_path(one(j)) == "/scenarios/0");
    j = base;
    j["task"] = "fly";
    CHECK(config_error_path(one(j)) == "/scenarios/0/task");
    j = base;
    j["extra"] = true;
    CHECK(config_error_path(one(j)) == "/scenarios/0/extra");
    j = base;
    j.erase("preset");
    j["weights"] = {{1, 2}, {3}};
    CHECK(config_error_path(one(j)) == "/scenarios/0/weights/1");
    CHECK(config_error_path({{"scenarios", {base, base}}}) == "/scenarios/1/name");
    CHECK(config_error_path({{"tolerances", {{"nonsense", 1}}}, {"scenarios", {base}}}) == "/tolerances/nonsense");
    CHECK(config_error_path({{"tolerance_profile", "loose"}, {"scenarios", {base}}}) == "/tolerance_profile");
    CHECK(config_error_path({{"seed", -3}, {"scenarios", {base}}}) == "/seed");
  }

  TEST_CASE("missing varpi names the key") {
    PresetRegistry reg = PresetRegistry::builtin();
    try {
      parse_config(one({{"name", "s"}, {"preset", "p1-standard"}, {"task", "dims"}}), reg);
      FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("'varpi'") != std::string::npos);
    }
  }

  TEST_CASE("scenario echo round-trips byte for byte") {
    PresetRegistry reg = PresetRegistry::builtin();
    const json src = one({{"name", "x"},
                          {"weights", {{1, 0, 1}, {0, 1, 1}}},
                          {"varpi", {2, 1}},
                          {"task", "asymptotics"},
                          {"params", {{"k_grid", {10, 20, 40}}, {"point", {{"simplex", {0.5, 0.25, 0.25}}}}}}});
    const Scenario s = parse_config(src, reg).scenarios[0];
    const std::string echo = s.to_json().dump();
    const Scenario t = parse_scenario(json::parse(echo), reg, "");
    CHECK(t.to_json().dump() == echo);
    const Scenario p = parse_scenario({{"name", "y"}, {"preset", "p2-t2"}, {"varpi", {1, 1}}, {"task", "dims"}}, reg, "");
    CHECK(parse_scenario(json::parse(p.to_json().dump()), reg, "").to_json().dump() == p.to_json().dump());
  }

  TEST_CASE("number formatting and CSV") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(2.0) == "2");
    CHECK(format_number(NAN) == "nan");
    CHECK(format_number(-INFINITY) == "-inf");
    CHECK(csv_text({"a", "b"}, {}) == "a,b\n");
    CHECK(csv_text({"a", "b"}, {{"1", "2"}, {"3", "4"}}) == "a,b\n1,2\n3,4\n");
  }

  TEST_CASE("dims task reproduces 1 + k") {
    PresetRegistry reg = PresetRegistry::builtin();
    const auto s = parse_scenario({{"name", "d"},
                                   {"preset", "p2-t2"},
                                   {"varpi", {2, 1}},
                                   {"task", "dims"},
                                   {"params", {{"k_grid", {{"from", 1}, {"to", 50}}}, {"expected_dims", {{"intercept", 1}, {"slope", 1}}}}}},
                                  reg, "");
    const auto o = run_scenario(s, quick_context());
    CHECK(o.all_pass());
    const auto& rows = o.report["results"]["rows"];
    REQUIRE(rows.size() == 50);
    for (const auto& r : rows) CHECK(r["dim"].get<std::int64_t>() == 1 + r["k"].get<std::int64_t>());
    CHECK(find_verdict(o, "brute_force_agreement")->pass);
  }

  TEST_CASE("asymptotics task for weights (1,2) reports B_1 = 2") {
    PresetRegistry reg = PresetRegistry::builtin();
    const auto s = parse_scenario({{"name", "a"},
                                   {"preset", "p1-weighted-s2"},
                                   {"varpi", {1}},
                                   {"task", "asymptotics"},
                                   {"params", {{"point", {{"simplex", {0, 1}}}}, {"k_grid", {{"from", 100}, {"to", 2000}, {"step", 100}}}, {"expected_B1", 2}}}},
                                  reg, "");
    const auto o = run_scenario(s, quick_context());
    REQUIRE(find_verdict(o, "expected_B1"));
    CHECK(find_verdict(o, "expected_B1")->pass);
    CHECK(o.all_pass());
    CHECK(o.report["results"]["fit"]["coefficients"][0].get<double>() == doctest::Approx(2.0).epsilon(1e-9));
    for (const auto& v : o.report["verdicts"]) CHECK(v.contains("threshold"));
  }

  TEST_CASE("bad parameters surface as configuration errors") {
    PresetRegistry reg = PresetRegistry::builtin();
    auto run = [&](json params, std::string task = "asymptotics") -> std::string {
      try {
        run_scenario(parse_scenario({{"name", "b"}, {"preset", "p1-t2"}, {"varpi", {1, 1}}, {"task", task}, {"params", params}}, reg, ""),
                     quick_context());
      } catch (const ConfigError& e) {
        return e.path();
      }
      return "<no error>";
    };
    CHECK(run({{"k_grid", {100, -5}}}) == "/params/k_grid/1");
    CHECK(run({{"k_grid", "many"}}) == "/params/k_grid");
    CHECK(run({{"point", {{"simplex", {0.9, 0.1}}}}}) == "/params/point");
    CHECK(run({{"point", "somewhere"}}) == "/params/point");
    CHECK(run(json::object(), "scaling") == "/params/v");
    CHECK(run({{"v", {1, 1}}}, "scaling") == "/params/v");
    CHECK(run(json::object(), "localization") == "/params/path");
  }

  TEST_CASE("reports are reproducible except for the timestamp") {
    PresetRegistry reg = PresetRegistry::builtin();
    const auto s = parse_scenario({{"name", "i"}, {"preset", "p1-weighted-s2"}, {"varpi", {1}}, {"task", "dim-integral"}, {"params", {{"samples", 20000}}}},
                                  reg, "");
    RunContext a = quick_context(), b = quick_context();
    b.jobs = 5;
    auto ra = run_scenario(s, a).report, rb = run_scenario(s, b).report;
    ra["provenance"].erase("timestamp");
    rb["provenance"].erase("timestamp");
    CHECK(ra.dump() == rb.dump());
  }

  TEST_CASE("profile tables") {
    PresetRegistry reg = PresetRegistry::builtin();
    const auto sc = parse_scenario({{"name", "p"},
                                    {"preset", "p1-t2"},
                                    {"varpi", {1, 1}},
                                    {"task", "scaling"},
                                    {"params", {{"point", {{"simplex", {0.5, 0.5}}}}, {"v", {0.5, -0.5}}, {"k_grid", {250, 500, 1000, 2000}}}}},
                                   reg, "");
    const auto o = run_scenario(sc, quick_context());
    const std::string csv = emit_profile_table(o.report);
    CHECK(csv.rfind("k,exact,predicted,ratio,target,pass\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    double prev = 1e9;
    for (const auto& r : o.report["results"]["rows"]) {
      const double gap = std::fabs(r["ratio"].get<double>() - r["target"].get<double>());
      CHECK(gap <= prev);
      prev = gap;
    }
    json empty = o.report;
    empty["results"]["rows"] = json::array();
    CHECK(emit_profile_table(empty) == "k,exact,predicted,ratio,target,pass\n");
    const auto lc = parse_scenario({{"name", "l"},
                                    {"preset", "p1-t2"},
                                    {"varpi", {1, 1}},
                                    {"task", "localization"},
                                    {"params", {{"path", {{"from", {0.1, 0.9}}, {"to", {0.9, 0.1}}, {"steps", 8}}}}}},
                                   reg, "");
    const auto lo = run_scenario(lc, quick_context());
    CHECK(lo.all_pass());
    const std::string lcsv = emit_profile_table(lo.report);
    CHECK(lcsv.rfind("s,gamma,r2,closed_form,pass\n", 0) == 0);
    // gamma is positive off the ray and vanishes at the midpoint s = 1/2
    const auto& rows = lo.report["results"]["rows"];
    CHECK(rows[0]["gamma"].get<double>() > 0);
    CHECK(std::fabs(rows[4]["gamma"].get<double>()) < 1e-6);
    CHECK(rows[8]["gamma"].get<double>() > 0);
    const auto dc = parse_scenario({{"name", "d"}, {"preset", "p1-standard"}, {"varpi", {1}}, {"task", "dims"}}, reg, "");
    CHECK_THROWS_AS(emit_profile_table(run_scenario(dc, quick_context()).report), InputError);
  }

  TEST_CASE("tolerance profiles") {
    const auto d = Tolerances::profile("default");
    const auto s = Tolerances::profile("strict");
    CHECK(s.leading_ratio <= d.leading_ratio);
    CHECK_THROWS_AS(Tolerances::profile("loose"), InputError);
    Tolerances t;
    t.set("tube_relative", 0.1);
    CHECK(t.tube_relative == 0.1);
    CHECK(t.as_map().at("tube_relative") == 0.1);
    CHECK_THROWS_AS(t.set("nope", 1), InputError);
  }
}
