// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "tzlab/asymptotic_predictions.hpp"
#include "tzlab/exact_kernels.hpp"
#include "tzlab/parallel.hpp"
#include "tzlab/scenario.hpp"
#include "tzlab/verification_engine.hpp"

using namespace tzlab;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Result {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "[FAIL] ") + what;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double log_rel(const LogReal& got, long double want) {
  return static_cast<double>(std::fabs(got.log_abs() - std::log(want)));
}

ProjectivePoint simplex(std::vector<double> p) { return ProjectivePoint::from_simplex(std::move(p)); }

// c1: classical reduction
Result c1(int jobs) {
  Result r;
  const auto a = validate_action(IntMatrix{{1, 1}});
  SweepPlan plan{a, {1}, simplex({0.3, 0.7}), {}, jobs};
  for (std::int64_t k = 1; k <= 2000; ++k) plan.k_grid.push_back(k);
  const auto rs = ratio_sweep(plan);
  double worst = 0;
  for (const auto& row : rs.rows) worst = std::max(worst, log_rel(row.exact, (row.k + 1) / kPi));
  r.require(worst <= 1e-12, "max log error " + fmt("%.3g", worst) + " <= 1e-12");
  std::vector<RatioRow> tail(rs.rows.begin() + 99, rs.rows.end());
  const auto f = fit_expansion(tail, 3);
  r.require(std::fabs(f.coefficients[0] - 1) <= 1e-9, "|B1 - 1| = " + fmt("%.3g", std::fabs(f.coefficients[0] - 1)) + " <= 1e-9");
  return r;
}

// c2: weighted circle case at a stabilized point
Result c2(int jobs) {
  Result r;
  const auto a = validate_action(IntMatrix{{1, 2}});
  const auto x = simplex({0, 1});
  std::vector<std::int64_t> ks;
  for (std::int64_t k = 1; k <= 4000; ++k) ks.push_back(k);
  std::vector<LogReal> vals(ks.size());
  parallel_for(ks.size(), jobs, [&](std::size_t i) { vals[i] = isotype_kernel_diag(a, {ks[i]}, x); });
  bool odd_zero = true;
  double worst = 0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const std::int64_t k = ks[i];
    if (k % 2) {
      odd_zero = odd_zero && vals[i].is_zero() && isotype_dimension(a, {k}) == static_cast<std::size_t>((k - 1) / 2 + 1);
    } else {
      const LogReal pred = predicted_leading_circle(a, x, k);
      const double ratio = static_cast<double>(std::exp(vals[i].log_abs() - pred.log_abs()));
      worst = std::max(worst, std::fabs(ratio - (1.0 + 2.0 / static_cast<double>(k))));
    }
  }
  r.require(odd_zero, "odd k: exact zero");
  r.require(worst <= 1e-10, "even k: max |ratio - (1 + 2/k)| = " + fmt("%.3g", worst) + " <= 1e-10");
  return r;
}

// c3: torus leading term
Result c3(int jobs) {
  Result r;
  const auto id = validate_action(IntMatrix{{1, 0}, {0, 1}});
  for (IntVec w : {IntVec{1, 1}, IntVec{2, 3}}) {
    const double s = static_cast<double>(w[0] + w[1]);
    SweepPlan plan{id, w, simplex({w[0] / s, w[1] / s}), default_k_grid(), jobs};
    const auto rs = ratio_sweep(plan);
    const double dev = std::fabs(rs.rows.back().ratio - 1);
    const double ord = residual_order(rs.rows);
    const std::string tag = "varpi=(" + std::to_string(w[0]) + "," + std::to_string(w[1]) + ")";
    r.require(rs.rows.back().k == 4000 && dev <= 5e-3, tag + " |ratio-1| at k=4000 " + fmt("%.3g", dev) + " <= 5e-3");
    r.require(ord >= 0.9, tag + " residual order " + fmt("%.4f", ord) + " >= 0.9");
  }
  return r;
}

// c4: form agreement and determinant identities
Result c4(int) {
  Result r;
  const auto t2 = validate_action(IntMatrix{{1, 0, 1}, {0, 1, 1}});
  const auto pts = sample_on_ray_points(t2, {1, 1}, 200, kSeed, true);
  double worst = 0;
  for (const auto& m : pts) {
    const auto a = predicted_leading_torus(t2, m, {1, 1}, 1000, TorusForm::ScriptD);
    const auto b = predicted_leading_torus(t2, m, {1, 1}, 1000, TorusForm::Veff);
    worst = std::max(worst, static_cast<double>(std::fabs(std::expm1(a.log_abs() - b.log_abs()))));
  }
  r.require(pts.size() == 200 && worst <= 1e-9, "forms at 200 on-ray points: " + fmt("%.3g", worst) + " <= 1e-9");
  auto rng = chunk_rng(kSeed, 4);
  const auto w123 = validate_action(IntMatrix{{1, 2, 3}});
  double gm = 0, circ = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto m = ProjectivePoint::from_coords(sample_sphere(2, rng));
    gm = std::max(gm, gm_det_identity_residual(t2, m, {1, 1}));
    circ = std::max(circ, circle_normalization_residual(w123, m));
  }
  r.require(gm <= 1e-10, "gm_det (T^2 on P^2) " + fmt("%.3g", gm) + " <= 1e-10");
  r.require(circ <= 1e-10, "circle normalization (weights 1,2,3) " + fmt("%.3g", circ) + " <= 1e-10");
  return r;
}

// c5: circle dimension asymptotics
Result c5(int jobs) {
  Result r;
  const auto a = validate_action(IntMatrix{{1, 2}});
  const double limit = predicted_dim_circle(a);
  r.require(limit == 0.5, "closed-form limit " + fmt("%.17g", limit) + " == 1/2");
  bool ok = true;
  double worst_scaled = 0;
  for (std::int64_t k = 1; k <= 10000; ++k) {
    const auto dim = static_cast<std::int64_t>(isotype_dimension(a, {k}));
    ok = ok && dim == k / 2 + 1;
    const double dev = std::fabs(static_cast<double>(dim) / static_cast<double>(k) - limit);
    worst_scaled = std::max(worst_scaled, dev * static_cast<double>(k) / 2.0);
  }
  r.require(ok, "dim = floor(k/2) + 1 for k <= 1e4");
  r.require(worst_scaled <= 1.0, "max |k^-1 dim - 1/2| / (2/k) = " + fmt("%.3g", worst_scaled) + " <= 1");
  const auto f = [](const std::vector<double>& p) { return std::pow(p[0] + 2 * p[1], -2.0); };
  const auto q = simplex_pushforward_integral(f, 1, 100000, kSeed, jobs);
  const double z = std::fabs(q.estimate - 0.5) / q.stderr_;
  r.require(z <= 3, "simplex MC " + fmt("%.6f", q.estimate) + " is " + fmt("%.2f", z) + " sigma from 1/2");
  return r;
}

// Brute force over the box 0 <= alpha_i <= min_j varpi_j / W_ji (nonnegative W).
std::int64_t box_count(const WeightedAction& a, const IntVec& varpi) {
  IntVec bound(a.d + 1);
  for (int i = 0; i <= a.d; ++i) {
    std::int64_t b = INT64_MAX;
    for (int j = 0; j < a.g; ++j)
      if (a.W(j, i) > 0) b = std::min(b, varpi[j] / a.W(j, i));
    bound[i] = b;
  }
  std::int64_t count = 0;
  IntVec acc(a.g, 0);
  std::function<void(int)> rec = [&](int i) {
    if (i > a.d) {
      count += acc == varpi;
      return;
    }
    for (std::int64_t t = 0; t <= bound[i]; ++t) {
      rec(i + 1);
      for (int j = 0; j < a.g; ++j) acc[j] += a.W(j, i);
    }
    for (int j = 0; j < a.g; ++j) acc[j] -= (bound[i] + 1) * a.W(j, i);
  };
  rec(0);
  return count;
}

// c6: torus dimension asymptotics
Result c6(int jobs) {
  Result r;
  const auto t2 = validate_action(IntMatrix{{1, 0, 1}, {0, 1, 1}});
  std::vector<std::int64_t> dims(200), brute(200);
  parallel_for(200, jobs, [&](std::size_t i) {
    const std::int64_t k = static_cast<std::int64_t>(i) + 1;
    dims[i] = static_cast<std::int64_t>(isotype_dimension(t2, {2 * k, k}));
    brute[i] = box_count(t2, {2 * k, k});
  });
  bool exact = true;
  for (std::size_t i = 0; i < 200; ++i) exact = exact && dims[i] == brute[i] && dims[i] == static_cast<std::int64_t>(i) + 2;
  r.require(exact, "dim = 1 + k = brute force for k <= 200");
  std::vector<std::pair<std::int64_t, double>> series;
  for (std::size_t i = 19; i < 200; ++i) series.emplace_back(static_cast<std::int64_t>(i) + 1, static_cast<double>(dims[i]));
  const auto sf = growth_exponent_fit(series);
  r.require(std::fabs(sf.slope - 1) <= 1e-3, "growth exponent " + fmt("%.6f", sf.slope) + " (|err| <= 1e-3)");
  const auto pred = predicted_dim_torus_exponent(t2, {2, 1});
  const auto q = tube_integral_over_Mvarpi(t2, {2, 1}, pred.integrand, 0.02, 1000000, kSeed, jobs);
  const double c = pred.constant_from_integral(q.estimate);
  r.require(std::fabs(c - 1) <= 0.05, "tube constant " + fmt("%.4f", c) + " +- " + fmt("%.4f", pred.constant_from_integral(q.stderr_)) +
                                          " vs exact slope 1 (5%)");
  return r;
}

// c7: localization
Result c7(int jobs) {
  Result r;
  const auto id = validate_action(IntMatrix{{1, 0}, {0, 1}});
  std::vector<std::pair<double, ProjectivePoint>> path;
  for (int i = 0; i <= 8; ++i) {
    const double p0 = 0.1 + 0.05 * i;
    path.emplace_back(p0, simplex({p0, 1 - p0}));
  }
  std::vector<std::int64_t> ks;
  for (std::int64_t k = 50; k <= 1000; k += 50) ks.push_back(k);
  const auto rows = localization_sweep(id, {1, 1}, path, ks, jobs);
  double worst = 0;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const double p0 = rows[i].s;
    worst = std::max(worst, std::fabs(rows[i].fit.gamma / -std::log(4 * p0 * (1 - p0)) - 1));
  }
  r.require(worst <= 0.01, "max relative gamma error on p0 = 0.10..0.45: " + fmt("%.3g", worst) + " <= 0.01");
  const double g5 = std::fabs(rows.back().fit.gamma);
  r.require(g5 < 1e-6, "|gamma(0.5)| = " + fmt("%.3g", g5) + " < 1e-6");
  return r;
}

// c8: Gaussian scaling profile
Result c8(int jobs) {
  Result r;
  const auto id = validate_action(IntMatrix{{1, 0}, {0, 1}});
  const auto m = simplex({0.5, 0.5});
  const double s = M_SQRT1_2;
  const auto v = TangentVector::make(m, {{s, 0}, {-s, 0}});
  const auto prof = scaling_sweep(id, m, {1, 1}, v, {2000}, jobs).back();
  const double dev = std::fabs(prof.value / std::exp(-4.0) - 1);
  r.require(dev <= 0.05, "ratio at k=2000 " + fmt("%.6g", prof.value) + " vs e^-4 (rel " + fmt("%.3g", dev) + " <= 0.05)");
  const auto v2 = TangentVector::make(m, {{2 * s, 0}, {-2 * s, 0}});
  const auto prof2 = scaling_sweep(id, m, {1, 1}, v2, {2000}, jobs).back();
  const double q = std::log(prof2.value) / std::log(prof.value);
  r.require(std::fabs(q / 4 - 1) <= 0.05, "exponent ratio for 2v " + fmt("%.4f", q) + " vs 4 (5%)");
  const auto u = TangentVector::make(m, {{-0.5 * s, 0}, {0.5 * s, 0}});
  const auto od = offdiag_modulus_sweep(id, m, {1, 1}, v, u, {4000}, jobs).back();
  const double odev = std::fabs(od.value / od.target - 1);
  r.require(odev <= 0.10, "off-diagonal modulus at k=4000 rel " + fmt("%.3g", odev) + " <= 0.10");
  return r;
}

// c9: partition and reconstruction for every preset
Result c9(int jobs) {
  Result r;
  const auto reg = PresetRegistry::builtin();
  bool part = true;
  double worst = 0;
  for (const auto& p : reg.all()) {
    const auto a = validate_action(IntMatrix::from_rows(p.weights));
    std::map<IntVec, bool> weights;
    for (std::int64_t n = 1; n <= 30; ++n) for_each_composition(a.d, n, [&](const IntVec& al) { weights[a.apply(al)] = true; });
    std::vector<IntVec> ws;
    for (const auto& [w, _] : weights) ws.push_back(w);
    std::vector<std::vector<std::int64_t>> hist(ws.size(), std::vector<std::int64_t>(31, 0));
    parallel_for(ws.size(), jobs, [&](std::size_t i) {
      for (const auto& m : isotype_basis(a, ws[i]).entries)
        if (m.degree <= 30) ++hist[i][m.degree];
    });
    for (std::int64_t n = 1; n <= 30; ++n) {
      std::int64_t total = 0;
      for (const auto& h : hist) total += h[n];
      const auto expect = static_cast<std::int64_t>(std::llround(std::exp(log_factorial(n + a.d) - log_factorial(n) - log_factorial(a.d))));
      if (total != expect) {
        part = false;
        r.require(false, p.id + " n=" + std::to_string(n) + ": " + std::to_string(total) + " != " + std::to_string(expect));
      }
    }
    auto rng = chunk_rng(kSeed, 9);
    for (int i = 0; i < 100; ++i) {
      const auto x = ProjectivePoint::from_coords(sample_sphere(a.d, rng));
      const auto y = ProjectivePoint::from_coords(sample_sphere(a.d, rng));
      worst = std::max(worst, level_kernel_residual(a.d, i % 31, x, y));
    }
  }
  r.require(part, std::to_string(reg.all().size()) + " presets: weight partition sums to C(n+d,d) for n <= 30");
  r.require(worst <= 1e-10, "level kernel residual " + fmt("%.3g", worst) + " <= 1e-10 on 100 pairs per preset");
  return r;
}

// c10: Monte Carlo oracles
Result c10(int jobs) {
  Result r;
  std::size_t tests = 0, outside = 0;
  double worst = 0;
  for (int d = 1; d <= 3; ++d) {
    std::vector<IntVec> alphas;
    for (int n = 0; n <= 8; ++n) for_each_composition(d, n, [&](const IntVec& al) { alphas.push_back(al); });
    const auto est = mc_norm_batch(d, alphas, 1000000, kSeed + d, jobs);
    for (const auto& e : est) {
      ++tests;
      const double diff = std::fabs(e.estimate.real() - e.expected);
      const double z = e.stderr_re > 0 ? diff / e.stderr_re : (diff == 0 ? 0 : INFINITY);
      worst = std::max(worst, z);
      outside += z > 3;
    }
  }
  r.require(outside == 0, std::to_string(tests) + " norms, " + std::to_string(outside) + " outside 3 sigma (max " +
                              fmt("%.2f", worst) + " sigma)");
  const std::vector<std::pair<std::string, std::function<double(const std::vector<double>&)>>> fs = {
      {"(1+p1)^-2", [](const std::vector<double>& p) { return std::pow(1 + p[1], -2.0); }},
      {"(p0+2p1+3p2)^-3", [](const std::vector<double>& p) { return std::pow(p[0] + 2 * p[1] + 3 * p[2], -3.0); }},
      {"exp(-p0) p1 p3", [](const std::vector<double>& p) { return std::exp(-p[0]) * p[1] * p[3]; }}};
  const int dims[] = {1, 2, 3};
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const auto a = simplex_pushforward_integral(fs[i].second, dims[i], 100000, kSeed + 10 + i, jobs);
    const auto b = sphere_integral(fs[i].second, dims[i], 100000, kSeed + 20 + i, jobs);
    const double z = sigma_distance(a, b);
    r.require(z <= 3, fs[i].first + " sphere vs simplex " + fmt("%.2f", z) + " sigma");
  }
  return r;
}

}  // namespace

int main() {
  const int jobs = resolve_jobs(0);
  struct Criterion {
    int id;
    const char* name;
    double limit_s;  // 0: no runtime bound
    Result (*run)(int);
  };
  const Criterion all[] = {{1, "exact classical reduction", 5, c1},
                           {2, "weighted circle case", 10, c2},
                           {3, "torus leading term", 20, c3},
                           {4, "form agreement and identities", 30, c4},
                           {5, "circle dimension asymptotics", 0, c5},
                           {6, "torus dimension asymptotics", 120, c6},
                           {7, "localization", 0, c7},
                           {8, "Gaussian scaling profile", 0, c8},
                           {9, "partition and reconstruction", 0, c9},
                           {10, "Monte Carlo oracles", 0, c10}};
  int failures = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Result res;
    try {
      res = c.run(jobs);
    } catch (const std::exception& e) {
      res.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0) res.require(secs < c.limit_s, "runtime " + fmt("%.2f", secs) + " s < " + fmt("%.0f", c.limit_s) + " s");
    else res.detail += "; runtime " + fmt("%.2f", secs) + " s";
    failures += !res.pass;
    std::printf("criterion %2d %-32s %s  %s\n", c.id, c.name, res.pass ? "PASS" : "FAIL", res.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of 10 criteria pass\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
