#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <numbers>
#include <set>

#include "tzlab/errors.hpp"
#include "tzlab/exact_kernels.hpp"
#include "tzlab/parallel.hpp"
#include "tzlab/scenario.hpp"
#include "tzlab/verification_engine.hpp"

namespace tzlab {

namespace {

const std::string kParams = "/params";

struct Ctx {
  const Scenario& s;
  const RunContext& rc;
  WeightedAction a;
  std::string base;  // JSON pointer prefix of the scenario's params
  ScenarioOutcome out;

  std::uint64_t seed() const {
    if (s.params.contains("seed")) {
      if (!s.params["seed"].is_number_unsigned()) throw ConfigError(base + "/seed", "seed must be a nonnegative integer");
      return s.params["seed"].get<std::uint64_t>();
    }
    return rc.seed;
  }

  void verdict(const std::string& name, bool pass, double value, double threshold, const std::string& cmp,
               const std::string& note = "") {
    out.verdicts.push_back({name, pass, value, threshold, cmp, note});
  }
};

json log_real_json(const LogReal& v) {
  json j = json::object();
  j["sign"] = v.sign();
  j["log"] = v.is_zero() ? json(nullptr) : json(static_cast<double>(v.log_abs()));
  return j;
}

std::int64_t get_int(const json& p, const std::string& key, std::int64_t def, const std::string& path,
                     std::int64_t min_value) {
  if (!p.contains(key)) return def;
  if (!p[key].is_number_integer()) throw ConfigError(path + "/" + key, "must be an integer");
  const auto v = p[key].get<std::int64_t>();
  if (v < min_value) throw ConfigError(path + "/" + key, "must be at least " + std::to_string(min_value));
  return v;
}

double get_double(const json& p, const std::string& key, double def, const std::string& path) {
  if (!p.contains(key)) return def;
  if (!p[key].is_number()) throw ConfigError(path + "/" + key, "must be a number");
  return p[key].get<double>();
}

bool get_bool(const json& p, const std::string& key, bool def, const std::string& path) {
  if (!p.contains(key)) return def;
  if (!p[key].is_boolean()) throw ConfigError(path + "/" + key, "must be a boolean");
  return p[key].get<bool>();
}

std::vector<std::int64_t> get_k_grid(const json& p, const std::string& path, std::vector<std::int64_t> def) {
  if (!p.contains("k_grid")) return def;
  const json& g = p["k_grid"];
  const std::string gp = path + "/k_grid";
  std::vector<std::int64_t> ks;
  if (g.is_array()) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!g[i].is_number_integer() || g[i].get<std::int64_t>() <= 0)
        throw ConfigError(gp + "/" + std::to_string(i), "k must be a positive integer");
      ks.push_back(g[i].get<std::int64_t>());
    }
  } else if (g.is_object()) {
    const auto from = get_int(g, "from", 1, gp, 1);
    if (!g.contains("to")) throw ConfigError(gp + "/to", "missing required key 'to'");
    const auto to = get_int(g, "to", 1, gp, 1);
    const auto step = get_int(g, "step", 1, gp, 1);
    for (std::int64_t k = from; k <= to; k += step) ks.push_back(k);
  } else {
    throw ConfigError(gp, "k_grid must be an array or {from, to, step}");
  }
  if (ks.empty()) throw ConfigError(gp, "k_grid is empty");
  return ks;
}

std::vector<double> get_real_vector(const json& j, const std::string& path, std::size_t n) {
  if (!j.is_array() || j.size() != n) throw ConfigError(path, "expected an array of " + std::to_string(n) + " numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!j[i].is_number()) throw ConfigError(path + "/" + std::to_string(i), "must be a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

CVec get_complex_vector(const json& j, const std::string& path, std::size_t n) {
  if (!j.is_array() || j.size() != n)
    throw ConfigError(path, "expected an array of " + std::to_string(n) + " entries (numbers or [re, im])");
  CVec out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string ip = path + "/" + std::to_string(i);
    if (j[i].is_number()) out.emplace_back(j[i].get<double>(), 0.0);
    else if (j[i].is_array() && j[i].size() == 2 && j[i][0].is_number() && j[i][1].is_number())
      out.emplace_back(j[i][0].get<double>(), j[i][1].get<double>());
    else throw ConfigError(ip, "entry must be a number or [re, im]");
  }
  return out;
}

ProjectivePoint get_point(Ctx& c, const std::string& key, bool default_on_ray) {
  const json& p = c.s.params;
  const std::string path = c.base + "/" + key;
  const std::size_t n = c.a.d + 1;
  if (!p.contains(key)) {
    if (default_on_ray) return canonical_on_ray_point(c.a, c.s.varpi);
    return ProjectivePoint::from_simplex(std::vector<double>(n, 1.0 / n));
  }
  const json& j = p[key];
  try {
    if (j.is_string()) {
      if (j == "on_ray") return canonical_on_ray_point(c.a, c.s.varpi);
      if (j == "barycenter") return ProjectivePoint::from_simplex(std::vector<double>(n, 1.0 / n));
      throw ConfigError(path, "point must be \"on_ray\", \"barycenter\", {\"simplex\": [...]} or {\"coords\": [...]}");
    }
    if (j.is_object() && j.contains("simplex")) return ProjectivePoint::from_simplex(get_real_vector(j["simplex"], path + "/simplex", n));
    if (j.is_object() && j.contains("coords")) return ProjectivePoint::from_coords(get_complex_vector(j["coords"], path + "/coords", n));
  } catch (const InputError& e) {
    throw ConfigError(path, e.what());
  } catch (const PreconditionError& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(path, "point must be \"on_ray\", \"barycenter\", {\"simplex\": [...]} or {\"coords\": [...]}");
}

TangentVector get_tangent(Ctx& c, const ProjectivePoint& m, const std::string& key) {
  const std::string path = c.base + "/" + key;
  if (!c.s.params.contains(key)) throw ConfigError(path, "missing required key '" + key + "'");
  const CVec v = get_complex_vector(c.s.params[key], path, m.z.size());
  if (get_bool(c.s.params, "project", false, c.base)) return TangentVector::project(m, v);
  try {
    return TangentVector::make(m, v);
  } catch (const InputError& e) {
    throw ConfigError(path, std::string(e.what()) + " (set params.project = true to project)");
  }
}

IntVec scaled(const IntVec& v, std::int64_t k) {
  IntVec o = v;
  for (auto& x : o) x *= k;
  return o;
}

json point_json(const ProjectivePoint& m) {
  json z = json::array();
  for (const auto& c : m.z) z.push_back({c.real(), c.imag()});
  json j = json::object();
  j["coords"] = z;
  j["simplex"] = m.p;
  return j;
}

// ---------------------------------------------------------------- dims

std::int64_t brute_force_dim(const WeightedAction& a, const IntVec& varpi, std::int64_t n_lo, std::int64_t n_hi) {
  std::int64_t count = 0;
  for (std::int64_t n = std::max<std::int64_t>(n_lo, 0); n <= n_hi; ++n)
    for_each_composition(a.d, n, [&](const IntVec& alpha) {
      if (a.apply(alpha) == varpi) ++count;
    });
  return count;
}

long double monomial_count(int d, std::int64_t n) {
  return std::exp(std::lgamma(static_cast<long double>(n + d + 1)) - std::lgamma(static_cast<long double>(n + 1)) -
                  std::lgamma(static_cast<long double>(d + 1)));
}

void task_dims(Ctx& c) {
  const auto ks = get_k_grid(c.s.params, c.base, [] {
    std::vector<std::int64_t> v;
    for (int k = 1; k <= 20; ++k) v.push_back(k);
    return v;
  }());
  const bool brute = get_bool(c.s.params, "brute_force", true, c.base);
  const double brute_limit = get_double(c.s.params, "brute_force_limit", 5e7, c.base);
  std::vector<std::int64_t> dims(ks.size()), brutes(ks.size(), -1);
  std::vector<std::int64_t> nmin(ks.size()), nmax(ks.size());
  parallel_for(ks.size(), c.rc.jobs, [&](std::size_t i) {
    const IsotypeBasis b = isotype_basis(c.a, scaled(c.s.varpi, ks[i]));
    dims[i] = static_cast<std::int64_t>(b.size());
    nmin[i] = b.n_min;
    nmax[i] = b.n_max;
    if (brute) {
      long double work = 0;
      for (auto n = std::max<std::int64_t>(b.n_min, 0); n <= b.n_max; ++n) work += monomial_count(c.a.d, n);
      if (work <= brute_limit) brutes[i] = brute_force_dim(c.a, b.varpi, b.n_min, b.n_max);
    }
  });
  json rows = json::array();
  c.out.csv_header = {"k", "dim", "brute_force", "n_min", "n_max", "normalized_dim"};
  bool brute_ok = true;
  std::size_t brute_checked = 0;
  const double dfact = std::tgamma(c.a.d + 1.0);
  const int e = c.a.d + 1 - c.a.g;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double normalized = dfact * static_cast<double>(dims[i]) / std::pow(static_cast<double>(ks[i]), e);
    json r = json::object();
    r["k"] = ks[i];
    r["dim"] = dims[i];
    r["brute_force"] = brutes[i] >= 0 ? json(brutes[i]) : json(nullptr);
    r["n_min"] = nmin[i];
    r["n_max"] = nmax[i];
    r["normalized_dim"] = normalized;
    rows.push_back(r);
    c.out.csv_rows.push_back({std::to_string(ks[i]), std::to_string(dims[i]), brutes[i] >= 0 ? std::to_string(brutes[i]) : "",
                              std::to_string(nmin[i]), std::to_string(nmax[i]), format_number(normalized)});
    if (brutes[i] >= 0) {
      ++brute_checked;
      if (brutes[i] != dims[i]) brute_ok = false;
    }
  }
  c.out.report["results"]["rows"] = rows;
  if (brute_checked > 0)
    c.verdict("brute_force_agreement", brute_ok, static_cast<double>(brute_checked), 0.0, "exact",
              "number of k values checked against brute-force enumeration");
  if (c.s.params.contains("expected_dims")) {
    const json& ex = c.s.params["expected_dims"];
    const std::string ep = c.base + "/expected_dims";
    std::vector<std::int64_t> expect;
    if (ex.is_array()) {
      if (ex.size() != ks.size()) throw ConfigError(ep, "expected_dims must have one entry per k");
      for (std::size_t i = 0; i < ex.size(); ++i) {
        if (!ex[i].is_number_integer()) throw ConfigError(ep + "/" + std::to_string(i), "must be an integer");
        expect.push_back(ex[i].get<std::int64_t>());
      }
    } else if (ex.is_object()) {
      const auto a0 = get_int(ex, "intercept", 0, ep, INT64_MIN);
      const auto a1 = get_int(ex, "slope", 0, ep, INT64_MIN);
      for (auto k : ks) expect.push_back(a0 + a1 * k);
    } else {
      throw ConfigError(ep, "expected_dims must be an array or {intercept, slope}");
    }
    std::size_t mism = 0;
    for (std::size_t i = 0; i < ks.size(); ++i) mism += expect[i] != dims[i];
    c.verdict("expected_dims", mism == 0, static_cast<double>(mism), 0.0, "exact", "number of mismatching k");
  }
  if (c.a.g == 1) c.out.report["results"]["predicted_normalized_dim"] = predicted_dim_circle(c.a);
  if (get_bool(c.s.params, "check_growth_exponent", false, c.base)) {
    std::vector<std::pair<std::int64_t, double>> pts;
    const std::int64_t kmax = *std::max_element(ks.begin(), ks.end());
    for (std::size_t i = 0; i < ks.size(); ++i)
      if (ks[i] * 10 >= kmax && dims[i] > 0) pts.emplace_back(ks[i], static_cast<double>(dims[i]));
    const SlopeFit f = growth_exponent_fit(pts);
    c.out.report["results"]["growth_exponent"] = {{"slope", f.slope}, {"stderr", f.stderr_}, {"expected", e}};
    c.verdict("growth_exponent", std::fabs(f.slope - e) <= c.rc.tol.slope_abs, std::fabs(f.slope - e),
              c.rc.tol.slope_abs, "<=");
  }
}

// ---------------------------------------------------------------- kernel-diag

void task_kernel_diag(Ctx& c) {
  const auto ks = get_k_grid(c.s.params, c.base, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  const ProjectivePoint x = get_point(c, "point", false);
  const StabilizerGroup G = stabilizer(c.a, x.support);
  // Random torus element for the invariance check.
  std::mt19937_64 rng = chunk_rng(c.seed(), 0);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> theta(c.a.g);
  for (auto& t : theta) t = U(rng);
  CVec tz = x.z;
  for (int i = 0; i <= c.a.d; ++i) {
    double ph = 0.0;
    for (int j = 0; j < c.a.g; ++j) ph += c.a.W(j, i) * theta[j];
    tz[i] *= std::polar(1.0, 2.0 * std::numbers::pi * ph);
  }
  const ProjectivePoint tx = ProjectivePoint::from_coords(tz);
  std::vector<LogReal> vals(ks.size()), tvals(ks.size());
  std::vector<std::int64_t> chars(ks.size(), -1);
  parallel_for(ks.size(), c.rc.jobs, [&](std::size_t i) {
    const IntVec kv = scaled(c.s.varpi, ks[i]);
    vals[i] = isotype_kernel_diag(c.a, kv, x);
    tvals[i] = isotype_kernel_diag(c.a, kv, tx);
    if (!G.positive_dimensional && G.enumerated) chars[i] = character_sum(G, c.s.varpi, ks[i]).exact;
  });
  json rows = json::array();
  c.out.csv_header = {"k", "log_diag", "diag", "character_sum"};
  double worst_inv = 0.0;
  bool vanish_ok = true;
  std::size_t vanish_checked = 0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    json r = json::object();
    r["k"] = ks[i];
    r["diag"] = log_real_json(vals[i]);
    r["character_sum"] = chars[i] >= 0 ? json(chars[i]) : json(nullptr);
    rows.push_back(r);
    c.out.csv_rows.push_back({std::to_string(ks[i]),
                              vals[i].is_zero() ? "-inf" : format_number(static_cast<double>(vals[i].log_abs())),
                              format_number(vals[i].to_double()), chars[i] >= 0 ? std::to_string(chars[i]) : ""});
    if (vals[i].is_zero() != tvals[i].is_zero()) worst_inv = INFINITY;
    else if (!vals[i].is_zero())
      worst_inv = std::max(worst_inv, static_cast<double>(std::fabs(std::expm1(tvals[i].log_abs() - vals[i].log_abs()))));
    if (chars[i] == 0) {
      ++vanish_checked;
      if (!vals[i].is_zero()) vanish_ok = false;
    }
  }
  c.out.report["results"]["point"] = point_json(x);
  c.out.report["results"]["stabilizer_order"] = G.positive_dimensional ? json(nullptr) : json(G.order);
  c.out.report["results"]["rows"] = rows;
  c.verdict("torus_invariance", worst_inv <= c.rc.tol.identity_residual, worst_inv, c.rc.tol.identity_residual, "<=");
  if (vanish_checked > 0)
    c.verdict("stabilizer_vanishing", vanish_ok, static_cast<double>(vanish_checked), 0.0, "exact",
              "k with vanishing character sum must give an exactly zero diagonal");
}

// ---------------------------------------------------------------- asymptotics

void task_asymptotics(Ctx& c) {
  SweepPlan plan{c.a, c.s.varpi, get_point(c, "point", true), get_k_grid(c.s.params, c.base, default_k_grid()),
                 c.rc.jobs};
  RatioSeries rs;
  try {
    rs = ratio_sweep(plan);
  } catch (const PreconditionError& e) {
    throw ConfigError(c.base + "/point", e.what());
  }
  const int n = static_cast<int>(rs.rows.size());
  const auto L = get_int(c.s.params, "L", std::min(3, n - 3), c.base, 1);
  std::string model_s = c.s.params.value("model", std::string("inverse"));
  if (model_s != "inverse" && model_s != "half") throw ConfigError(c.base + "/model", "model must be inverse or half");
  const FitModel model = model_s == "inverse" ? FitModel::InversePowers : FitModel::HalfPowers;
  json rows = json::array();
  c.out.csv_header = {"k", "log_exact", "log_predicted", "ratio"};
  for (const auto& r : rs.rows) {
    rows.push_back({{"k", r.k},
                    {"exact", log_real_json(r.exact)},
                    {"predicted", log_real_json(r.predicted)},
                    {"ratio", r.ratio}});
    c.out.csv_rows.push_back({std::to_string(r.k), format_number(static_cast<double>(r.exact.log_abs())),
                              format_number(static_cast<double>(r.predicted.log_abs())), format_number(r.ratio)});
  }
  c.out.report["results"]["point"] = point_json(plan.point);
  c.out.report["results"]["rows"] = rows;
  c.out.report["results"]["skipped_k"] = rs.skipped;
  if (!rs.skipped.empty()) {
    const bool ok = verify_skipped_vanish(plan, rs.skipped);
    c.verdict("skipped_k_vanish", ok, static_cast<double>(std::min<std::size_t>(10, rs.skipped.size())), 0.0, "exact");
  }
  const RatioRow& last = rs.rows.back();
  const double dev = std::fabs(static_cast<double>(std::expm1(last.log_ratio)));
  c.verdict("leading_ratio", dev <= c.rc.tol.leading_ratio, dev, c.rc.tol.leading_ratio, "<=",
            "|ratio - 1| at the largest admissible k");
  if (n >= L + 3) {
    const FitResult f = fit_expansion(rs.rows, static_cast<int>(L), model, c.rc.tol.stability_rel_floor);
    json fj = json::object();
    fj["model"] = model_s;
    fj["L"] = L;
    fj["coefficients"] = f.coefficients;
    fj["stderrs"] = f.stderrs;
    fj["leading_ratio_limit"] = f.leading_ratio_limit;
    fj["residual_order_estimate"] = f.residual_order_estimate;
    fj["residual_rms"] = f.residual_rms;
    fj["stable"] = f.stable;
    fj["lower_half"] = f.lower_half;
    fj["upper_half"] = f.upper_half;
    c.out.report["results"]["fit"] = fj;
    if (std::isfinite(f.residual_order_estimate))
      c.verdict("residual_order", f.residual_order_estimate >= c.rc.tol.residual_order_min, f.residual_order_estimate,
                c.rc.tol.residual_order_min, ">=");
    c.verdict("fit_stability", f.stable, f.lower_half.empty() ? 0.0 : std::fabs(f.lower_half[0] - f.upper_half[0]),
              c.rc.tol.stability_rel_floor, "3sigma+floor");
    if (c.s.params.contains("expected_B1")) {
      const double b1 = get_double(c.s.params, "expected_B1", 0.0, c.base);
      const double err = std::fabs(f.coefficients[0] - b1);
      c.verdict("expected_B1", err <= c.rc.tol.exact_fit_coefficient, err, c.rc.tol.exact_fit_coefficient, "<=");
    }
  }
}

// ---------------------------------------------------------------- scaling

void task_scaling(Ctx& c) {
  const ProjectivePoint m = get_point(c, "point", true);
  const TangentVector v = get_tangent(c, m, "v");
  const auto ks = get_k_grid(c.s.params, c.base, {250, 500, 1000, 2000});
  json res = json::object();
  res["point"] = point_json(m);
  c.out.csv_header = {"k", "exact", "predicted", "ratio", "target", "pass"};
  try {
    if (c.a.g > 1) {
      const GaussianProfile gp = gaussian_profile(c.a, m, c.s.varpi, v);
      res["normal_defect"] = gp.normal_defect;
      res["not_normal_warning"] = gp.not_normal;
    }
    json rows = json::array();
    const bool offdiag = c.s.params.contains("v2");
    std::vector<ProfileRow> pr;
    double tol = c.rc.tol.profile_relative;
    if (offdiag) {
      const TangentVector v2 = get_tangent(c, m, "v2");
      pr = offdiag_modulus_sweep(c.a, m, c.s.varpi, v, v2, ks, c.rc.jobs);
      tol = c.rc.tol.offdiag_relative;
      res["kind"] = "offdiag_modulus";
    } else {
      pr = scaling_sweep(c.a, m, c.s.varpi, v, ks, c.rc.jobs);
      res["kind"] = "diagonal_profile";
    }
    for (std::size_t i = 0; i < pr.size(); ++i) {
      const LogReal base = isotype_kernel_diag(c.a, scaled(c.s.varpi, pr[i].k), m);
      const double lb = static_cast<double>(base.log_abs());
      const bool pass = std::fabs(pr[i].value / pr[i].target - 1.0) <= tol;
      rows.push_back({{"k", pr[i].k},
                      {"exact", lb + std::log(pr[i].value)},
                      {"predicted", lb + std::log(pr[i].target)},
                      {"ratio", pr[i].value},
                      {"target", pr[i].target},
                      {"pass", pass}});
    }
    res["rows"] = rows;
    const auto& last = pr.back();
    const double dev = std::fabs(last.value / last.target - 1.0);
    c.verdict(offdiag ? "offdiag_modulus" : "gaussian_profile", dev <= tol, dev, tol, "<=",
              "relative deviation at the largest k");
    if (!offdiag && get_bool(c.s.params, "check_quadratic", false, c.base)) {
      CVec v2 = v.v;
      for (auto& x : v2) x *= 2.0;
      const auto p2 = scaling_sweep(c.a, m, c.s.varpi, TangentVector{m, v2}, {last.k}, c.rc.jobs);
      const double q = std::log(p2.back().value) / std::log(last.value);
      res["quadratic_ratio"] = q;
      c.verdict("quadratic_scaling", std::fabs(q / 4.0 - 1.0) <= c.rc.tol.profile_relative, std::fabs(q / 4.0 - 1.0),
                c.rc.tol.profile_relative, "<=", "log ratio at 2v over log ratio at v, against 4");
    }
  } catch (const PreconditionError& e) {
    throw ConfigError(c.base, e.what());
  }
  c.out.report["results"] = res;
  for (const auto& r : res["rows"])
    c.out.csv_rows.push_back({std::to_string(r["k"].get<std::int64_t>()), format_number(r["exact"].get<double>()),
                              format_number(r["predicted"].get<double>()), format_number(r["ratio"].get<double>()),
                              format_number(r["target"].get<double>()), r["pass"].get<bool>() ? "true" : "false"});
}

// ---------------------------------------------------------------- localization

// For isotypes spanned by a single monomial k alpha_1 the decay rate per
// unit k is sum_i alpha_i log(q_i / p_i), q = alpha / |alpha|.
std::optional<double> single_monomial_rate(const WeightedAction& a, const IntVec& varpi, const ProjectivePoint& x) {
  for (std::int64_t k : {1, 2, 3}) {
    if (isotype_basis(a, scaled(varpi, k)).size() != 1) return std::nullopt;
  }
  const IsotypeBasis b = isotype_basis(a, varpi);
  const IntVec& al = b.entries.front().alpha;
  const double n = static_cast<double>(b.entries.front().degree);
  double g = 0.0;
  for (int i = 0; i <= a.d; ++i) {
    if (al[i] == 0) continue;
    if (x.p[i] == 0.0) return std::nullopt;
    g += static_cast<double>(al[i]) * std::log(static_cast<double>(al[i]) / n / x.p[i]);
  }
  return g;
}

void task_localization(Ctx& c) {
  const json& p = c.s.params;
  const std::string pp = c.base + "/path";
  if (!p.contains("path")) throw ConfigError(pp, "missing required key 'path'");
  const json& path = p["path"];
  const std::size_t n = c.a.d + 1;
  std::vector<std::pair<double, ProjectivePoint>> pts;
  try {
    if (path.is_object() && path.contains("from")) {
      const auto from = get_real_vector(path["from"], pp + "/from", n);
      if (!path.contains("to")) throw ConfigError(pp + "/to", "missing required key 'to'");
      const auto to = get_real_vector(path["to"], pp + "/to", n);
      const auto steps = get_int(path, "steps", 9, pp, 1);
      for (std::int64_t s = 0; s <= steps; ++s) {
        const double t = static_cast<double>(s) / static_cast<double>(steps);
        std::vector<double> q(n);
        for (std::size_t i = 0; i < n; ++i) q[i] = (1 - t) * from[i] + t * to[i];
        pts.emplace_back(t, ProjectivePoint::from_simplex(q));
      }
    } else if (path.is_object() && path.contains("points")) {
      const json& arr = path["points"];
      if (!arr.is_array() || arr.empty()) throw ConfigError(pp + "/points", "points must be a nonempty array");
      for (std::size_t i = 0; i < arr.size(); ++i)
        pts.emplace_back(static_cast<double>(i),
                         ProjectivePoint::from_simplex(get_real_vector(arr[i], pp + "/points/" + std::to_string(i), n)));
    } else {
      throw ConfigError(pp, "path must be {from, to, steps} or {points: [...]}");
    }
  } catch (const InputError& e) {
    throw ConfigError(pp, e.what());
  }
  const auto ks = get_k_grid(p, c.base, [] {
    std::vector<std::int64_t> v;
    for (int k = 50; k <= 1000; k += 50) v.push_back(k);
    return v;
  }());
  const auto rows = localization_sweep(c.a, c.s.varpi, pts, ks, c.rc.jobs, c.rc.tol.no_decay);
  json jr = json::array();
  c.out.csv_header = {"s", "gamma", "r2", "closed_form", "pass"};
  double worst_on = 0.0, worst_cf = 0.0, min_off = INFINITY;
  std::size_t n_on = 0, n_off = 0, n_cf = 0;
  bool off_ok = true;
  for (const auto& r : rows) {
    const double ang = ray_angle(moment_map(c.a, r.point), c.s.varpi);
    const bool on = ang < c.rc.tol.on_ray_angle;
    const auto cf = single_monomial_rate(c.a, c.s.varpi, r.point);
    bool pass;
    if (r.fit.degenerate) {
      pass = !on;
    } else if (on) {
      pass = r.fit.no_decay;
      worst_on = std::max(worst_on, std::fabs(r.fit.gamma));
    } else {
      pass = r.fit.decays;
      min_off = std::min(min_off, r.fit.gamma);
    }
    if (on) ++n_on;
    else {
      ++n_off;
      if (!pass) off_ok = false;
    }
    if (cf && !on && !r.fit.degenerate) {
      ++n_cf;
      const double rel = std::fabs(r.fit.gamma / *cf - 1.0);
      worst_cf = std::max(worst_cf, rel);
      if (rel > c.rc.tol.decay_relative) pass = false;
    }
    jr.push_back({{"s", r.s},
                  {"point", point_json(r.point)},
                  {"gamma", r.fit.degenerate ? json(nullptr) : json(r.fit.gamma)},
                  {"r2", r.fit.r2},
                  {"degenerate", r.fit.degenerate},
                  {"on_ray", on},
                  {"closed_form", cf ? json(*cf) : json(nullptr)},
                  {"pass", pass}});
    c.out.csv_rows.push_back({format_number(r.s), r.fit.degenerate ? "" : format_number(r.fit.gamma),
                              format_number(r.fit.r2), cf ? format_number(*cf) : "", pass ? "true" : "false"});
  }
  c.out.report["results"]["rows"] = jr;
  c.out.report["results"]["gamma_units"] = "per unit k";
  if (n_on > 0)
    c.verdict("on_ray_no_decay", worst_on < c.rc.tol.no_decay, worst_on, c.rc.tol.no_decay, "<",
              "largest |gamma| at on-ray points");
  if (n_off > 0)
    c.verdict("off_ray_decay", off_ok, std::isfinite(min_off) ? min_off : 0.0, 0.0, ">",
              "every off-ray point decays (gamma > 0, r2 >= 0.99) or vanishes identically");
  if (n_cf > 0)
    c.verdict("closed_form_rate", worst_cf <= c.rc.tol.decay_relative, worst_cf, c.rc.tol.decay_relative, "<=",
              "largest relative deviation from the single-monomial rate");
}

// ---------------------------------------------------------------- dim-integral

json quad_json(const QuadratureResult& q) {
  return {{"method", q.method}, {"estimate", q.estimate}, {"stderr", q.stderr_}, {"samples", q.samples}, {"hits", q.hits}};
}

void task_dim_integral(Ctx& c) {
  const std::uint64_t seed = c.seed();
  c.out.csv_header = {"method", "estimate", "stderr", "samples"};
  auto add_row = [&](const QuadratureResult& q) {
    c.out.csv_rows.push_back({q.method, format_number(q.estimate), format_number(q.stderr_), std::to_string(q.samples)});
  };
  if (c.a.g == 1) {
    const auto samples = static_cast<std::size_t>(get_int(c.s.params, "samples", 100000, c.base, 1000));
    const double ell = static_cast<double>(generic_stabilizer_order(c.a));
    const WeightedAction a = c.a;
    auto f = [a, ell](const std::vector<double>& p) {
      double phi = 0.0;
      for (int i = 0; i <= a.d; ++i) phi += static_cast<double>(a.W(0, i)) * p[i];
      return ell * std::pow(std::fabs(phi), -(a.d + 1));
    };
    const double exact = predicted_dim_circle(c.a);
    const auto qs = simplex_pushforward_integral(f, c.a.d, samples, seed, c.rc.jobs);
    const auto qz = sphere_integral(f, c.a.d, samples, seed ^ 0x9e3779b97f4a7c15ULL, c.rc.jobs);
    add_row(qs);
    add_row(qz);
    c.out.csv_rows.push_back({"closed_form", format_number(exact), "0", "0"});
    c.out.report["results"] = {{"closed_form", exact}, {"simplex", quad_json(qs)}, {"sphere", quad_json(qz)}};
    const double zs = std::fabs(qs.estimate - exact) / qs.stderr_;
    c.verdict("simplex_vs_closed_form", zs <= c.rc.tol.mc_sigma, zs, c.rc.tol.mc_sigma, "sigma<=");
    const double zz = sigma_distance(qs, qz);
    c.verdict("sphere_vs_simplex", zz <= c.rc.tol.mc_sigma, zz, c.rc.tol.mc_sigma, "sigma<=");
    return;
  }
  const auto samples = static_cast<std::size_t>(get_int(c.s.params, "samples", 1000000, c.base, 1000));
  const double eps = get_double(c.s.params, "epsilon", 0.02, c.base);
  if (!(eps > 0.0)) throw ConfigError(c.base + "/epsilon", "epsilon must be positive");
  const DimTorusPrediction pred = predicted_dim_torus_exponent(c.a, c.s.varpi);
  QuadratureResult q;
  try {
    q = tube_integral_over_Mvarpi(c.a, c.s.varpi, pred.integrand, eps, samples, seed, c.rc.jobs);
  } catch (const PreconditionError& e) {
    throw ConfigError(c.base, e.what());
  }
  add_row(q);
  const double constant = pred.constant_from_integral(q.estimate);
  // Exact leading coefficient: least squares of dim(k) on k^e, ..., k^0.
  const auto ks = get_k_grid(c.s.params, c.base, [] {
    std::vector<std::int64_t> v;
    for (int k = 20; k <= 200; k += 10) v.push_back(k);
    return v;
  }());
  const int e = static_cast<int>(pred.exponent_num);
  std::vector<double> dims(ks.size());
  parallel_for(ks.size(), c.rc.jobs, [&](std::size_t i) {
    dims[i] = static_cast<double>(isotype_dimension(c.a, scaled(c.s.varpi, ks[i])));
  });
  Eigen::MatrixXd X(ks.size(), e + 1);
  Eigen::VectorXd y(ks.size());
  const double kmax = static_cast<double>(*std::max_element(ks.begin(), ks.end()));
  for (std::size_t i = 0; i < ks.size(); ++i) {
    for (int j = 0; j <= e; ++j) X(i, j) = std::pow(static_cast<double>(ks[i]) / kmax, e - j);
    y(i) = dims[i];
  }
  const double exact_lead = X.colPivHouseholderQr().solve(y)(0) / std::pow(kmax, e);
  c.out.csv_rows.push_back({"exact_leading_coefficient", format_number(exact_lead), "0", "0"});
  c.out.report["results"] = {{"tube", quad_json(q)},
                             {"epsilon", eps},
                             {"exponent", e},
                             {"predicted_constant", constant},
                             {"predicted_constant_stderr", pred.constant_from_integral(q.stderr_)},
                             {"exact_leading_coefficient", exact_lead}};
  const double rel = std::fabs(constant / exact_lead - 1.0);
  c.verdict("tube_constant", rel <= c.rc.tol.tube_relative, rel, c.rc.tol.tube_relative, "<=",
            "tube Monte Carlo constant against the exact leading coefficient of dim");
}

// ---------------------------------------------------------------- identities

void task_identities(Ctx& c) {
  const std::uint64_t seed = c.seed();
  const auto npts = get_int(c.s.params, "points", 1000, c.base, 1);
  const auto nray = get_int(c.s.params, "ray_points", 200, c.base, 0);
  const auto npairs = get_int(c.s.params, "pairs", 100, c.base, 0);
  const auto maxdeg = get_int(c.s.params, "max_degree", 30, c.base, 0);
  auto rng = chunk_rng(seed, 1);
  json res = json::object();
  double gm = 0.0, bord = 0.0, circ = 0.0;
  std::size_t gm_n = 0, circ_n = 0;
  for (std::int64_t i = 0; i < npts; ++i) {
    const CVec z = sample_sphere(c.a.d, rng);
    const ProjectivePoint m = ProjectivePoint::from_coords(z);
    bord = std::max(bord, bordered_det_identity_residual(c.a, m, c.s.varpi));
    const GeometryReport r = geometry_report(c.a, m, c.s.varpi);
    if (r.locally_free) {
      gm = std::max(gm, gm_det_identity_residual(c.a, m, c.s.varpi));
      ++gm_n;
      if (c.a.g == 1) {
        circ = std::max(circ, circle_normalization_residual(c.a, m));
        ++circ_n;
      }
    }
  }
  const double tol = c.rc.tol.identity_residual;
  c.verdict("bordered_det_identity", bord <= tol, bord, tol, "<=");
  if (gm_n > 0) c.verdict("gm_det_identity", gm <= tol, gm, tol, "<=", std::to_string(gm_n) + " locally free points");
  if (circ_n > 0) c.verdict("circle_normalization", circ <= tol, circ, tol, "<=");
  if (c.a.g > 1 && nray > 0) {
    double worst = 0.0;
    std::vector<ProjectivePoint> pts;
    try {
      pts = sample_on_ray_points(c.a, c.s.varpi, static_cast<std::size_t>(nray), seed, true);
    } catch (const PreconditionError& e) {
      res["form_agreement_skipped"] = e.what();
    }
    for (const auto& m : pts) {
      // Compare at k = |T_m|, where the character factor is nonzero.
      const StabilizerGroup G = stabilizer(c.a, m.support);
      const LogReal B = predicted_leading_torus(c.a, m, c.s.varpi, G.order, TorusForm::Veff);
      const LogReal Ak = predicted_leading_torus(c.a, m, c.s.varpi, G.order, TorusForm::ScriptD);
      worst = std::max(worst, static_cast<double>(std::fabs(std::expm1(Ak.log_abs() - B.log_abs()))));
    }
    if (!pts.empty())
      c.verdict("form_agreement", worst <= c.rc.tol.form_agreement, worst, c.rc.tol.form_agreement, "<=",
                std::to_string(pts.size()) + " on-ray locally free points");
  }
  double lvl = 0.0;
  for (std::int64_t i = 0; i < npairs; ++i) {
    const auto x = ProjectivePoint::from_coords(sample_sphere(c.a.d, rng));
    const auto y = ProjectivePoint::from_coords(sample_sphere(c.a.d, rng));
    const int n = static_cast<int>(rng() % static_cast<std::uint64_t>(maxdeg + 1));
    lvl = std::max(lvl, level_kernel_residual(c.a.d, n, x, y));
  }
  if (npairs > 0) c.verdict("level_kernel_residual", lvl <= tol, lvl, tol, "<=");
  // Partition of degree-n monomials by weight, and level reconstruction.
  bool part_ok = true;
  double recon = 0.0;
  const auto xr = ProjectivePoint::from_coords(sample_sphere(c.a.d, rng));
  for (std::int64_t n = 0; n <= maxdeg; ++n) {
    std::set<IntVec> weights;
    for_each_composition(c.a.d, n, [&](const IntVec& al) { weights.insert(c.a.apply(al)); });
    std::int64_t total = 0;
    LogSumExp level;
    for (const auto& w : weights) {
      if (std::all_of(w.begin(), w.end(), [](auto v) { return v == 0; })) continue;
      for (const auto& m : isotype_basis(c.a, w).entries) total += m.degree == n;
      for (const auto& [deg, val] : isotype_kernel_diag_by_degree(c.a, w, xr))
        if (deg == n) level.add(val);
    }
    const auto expect = static_cast<std::int64_t>(std::llround(monomial_count(c.a.d, n)));
    if (n > 0 && total != expect) part_ok = false;
    if (n > 0) {
      const long double want = log_factorial(n + c.a.d) - c.a.d * kLogPi - log_factorial(n);
      recon = std::max(recon, static_cast<double>(std::fabs(std::expm1(level.result().log_abs() - want))));
    }
  }
  c.verdict("weight_partition", part_ok, static_cast<double>(maxdeg), 0.0, "exact",
            "degree-n monomials partitioned by weight sum to C(n+d,d) for 1 <= n <= max_degree");
  c.verdict("level_reconstruction", recon <= tol, recon, tol, "<=");
  res["max_residuals"] = {{"bordered_det", bord}, {"gm_det", gm}, {"circle_normalization", circ}, {"level_kernel", lvl},
                          {"level_reconstruction", recon}};
  c.out.report["results"] = res;
  c.out.csv_header = {"check", "value"};
  for (const auto& [k, v] : res["max_residuals"].items()) c.out.csv_rows.push_back({k, format_number(v.get<double>())});
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

ScenarioOutcome run_scenario(const Scenario& s, const RunContext& rc) {
  Ctx c{s, rc, {}, kParams, {}};
  try {
    c.a = validate_action(IntMatrix::from_rows(s.weights));
  } catch (const InputError& e) {
    throw ConfigError("/weights", e.what());
  }
  if (!c.a.has_cert() && s.task != Task::Identities)
    throw ConfigError("/weights", "unbounded isotype risk: 0 lies in the convex hull of the weights");
  if (std::all_of(s.varpi.begin(), s.varpi.end(), [](auto v) { return v == 0; }))
    throw ConfigError("/varpi", "varpi must be nonzero");
  c.out.report = json::object();
  c.out.report["scenario"] = s.to_json();
  json action = json::object();
  action["weights"] = s.weights;
  action["d"] = c.a.d;
  action["g"] = c.a.g;
  if (c.a.cert) {
    json cert = json::array();
    for (const auto& q : *c.a.cert) cert.push_back(q.str());
    action["certificate"] = cert;
  } else {
    action["certificate"] = nullptr;
  }
  c.out.report["action"] = action;
  c.out.report["results"] = json::object();
  try {
    switch (s.task) {
      case Task::Dims: task_dims(c); break;
      case Task::KernelDiag: task_kernel_diag(c); break;
      case Task::Asymptotics: task_asymptotics(c); break;
      case Task::Scaling: task_scaling(c); break;
      case Task::Localization: task_localization(c); break;
      case Task::DimIntegral: task_dim_integral(c); break;
      case Task::Identities: task_identities(c); break;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const InputError& e) {
    throw ConfigError(kParams, e.what());
  } catch (const PreconditionError& e) {
    throw ConfigError(kParams, e.what());
  }
  json verdicts = json::array();
  for (const auto& v : c.out.verdicts)
    verdicts.push_back({{"name", v.name},
                        {"pass", v.pass},
                        {"value", v.value},
                        {"threshold", v.threshold},
                        {"comparison", v.comparison},
                        {"note", v.note}});
  c.out.report["verdicts"] = verdicts;
  c.out.report["all_pass"] = c.out.all_pass();
  c.out.report["provenance"] = {{"seed", c.seed()},
                                {"version", version_string()},
                                {"tolerance_profile", rc.tolerance_profile},
                                {"tolerances", rc.tol.as_map()},
                                {"timestamp", utc_timestamp()}};
  if (s.task == Task::Scaling || s.task == Task::Localization) c.out.report["kind"] = task_name(s.task);
  return c.out;
}

std::string emit_profile_table(const json& report) {
  const std::string kind = report.value("kind", std::string());
  if (kind == "scaling") {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : report["results"]["rows"])
      rows.push_back({std::to_string(r["k"].get<std::int64_t>()), format_number(r["exact"].get<double>()),
                      format_number(r["predicted"].get<double>()), format_number(r["ratio"].get<double>()),
                      format_number(r["target"].get<double>()), r["pass"].get<bool>() ? "true" : "false"});
    return csv_text({"k", "exact", "predicted", "ratio", "target", "pass"}, rows);
  }
  if (kind == "localization") {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : report["results"]["rows"])
      rows.push_back({format_number(r["s"].get<double>()), r["gamma"].is_null() ? "" : format_number(r["gamma"].get<double>()),
                      format_number(r["r2"].get<double>()),
                      r["closed_form"].is_null() ? "" : format_number(r["closed_form"].get<double>()),
                      r["pass"].get<bool>() ? "true" : "false"});
    return csv_text({"s", "gamma", "r2", "closed_form", "pass"}, rows);
  }
  throw InputError("emit_profile_table: report is not a scaling or localization report");
}

}  // namespace tzlab
