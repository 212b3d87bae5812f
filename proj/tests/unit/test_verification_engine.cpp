#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tzlab/errors.hpp"
#include "tzlab/verification_engine.hpp"

using namespace tzlab;

namespace {

std::vector<RatioRow> synthetic(const std::vector<double>& B, std::int64_t k0, std::int64_t k1, std::int64_t step) {
  std::vector<RatioRow> rows;
  for (std::int64_t k = k0; k <= k1; k += step) {
    double r = 1;
    for (std::size_t l = 0; l < B.size(); ++l) r += B[l] * std::pow(static_cast<double>(k), -static_cast<double>(l + 1));
    RatioRow row;
    row.k = k;
    row.ratio = r;
    row.log_ratio = std::log(static_cast<long double>(r));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_SUITE("verification_engine") {
  TEST_CASE("classical ratio is exactly 1 + 1/k") {
    SweepPlan plan{validate_action(IntMatrix{{1, 1}}), {1}, ProjectivePoint::from_simplex({0.3, 0.7}), {}, 2};
    for (std::int64_t k = 1; k <= 2000; k += 37) plan.k_grid.push_back(k);
    const auto rs = ratio_sweep(plan);
    CHECK(rs.skipped.empty());
    for (const auto& r : rs.rows) CHECK(std::fabs(r.ratio - (1.0 + 1.0 / r.k)) <= 1e-12 * (1.0 + 1.0 / r.k));
    const auto f = fit_expansion(rs.rows, 3);
    CHECK(std::fabs(f.coefficients[0] - 1) <= 1e-9);
    CHECK(std::fabs(f.coefficients[1]) <= 1e-6);
    CHECK(f.stable);
  }

  TEST_CASE("weights (1,2) at [0:1]: odd k skipped, ratio 1 + 2/k") {
    SweepPlan plan{validate_action(IntMatrix{{1, 2}}), {1}, ProjectivePoint::from_simplex({0, 1}), {}, 2};
    for (std::int64_t k = 1; k <= 400; ++k) plan.k_grid.push_back(k);
    const auto rs = ratio_sweep(plan);
    CHECK(rs.skipped.size() == 200);
    for (auto k : rs.skipped) CHECK(k % 2 == 1);
    CHECK(verify_skipped_vanish(plan, rs.skipped, 200));
    for (const auto& r : rs.rows) CHECK(std::fabs(r.ratio - (1.0 + 2.0 / r.k)) <= 1e-10);
    CHECK(fit_expansion(rs.rows, 2).coefficients[0] == doctest::Approx(2.0).epsilon(1e-9));
  }

  TEST_CASE("fit recovers exact coefficients") {
    const auto rows = synthetic({0.375, -1.25, 2.0}, 100, 4000, 100);
    const auto f = fit_expansion(rows, 3);
    CHECK(f.coefficients[0] == doctest::Approx(0.375).epsilon(1e-8));
    CHECK(f.coefficients[1] == doctest::Approx(-1.25).epsilon(1e-5));
    CHECK(f.stable);
    CHECK(residual_order(rows) == doctest::Approx(1.0).epsilon(0.01));
    CHECK_THROWS(fit_expansion(synthetic({1}, 10, 30, 10), 3));
  }

  TEST_CASE("fit flags instability when the model is wrong") {
    // a k^{-1/2} term cannot be absorbed by inverse powers
    std::vector<RatioRow> rows;
    for (std::int64_t k = 50; k <= 5000; k += 150) {
      RatioRow r;
      r.k = k;
      r.ratio = 1 + 3 / std::sqrt(static_cast<double>(k));
      r.log_ratio = std::log(r.ratio);
      rows.push_back(r);
    }
    CHECK_FALSE(fit_expansion(rows, 2).stable);
    const auto h = fit_expansion(rows, 2, FitModel::HalfPowers);
    CHECK(h.coefficients[0] == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(h.stable);
  }

  TEST_CASE("torus ratio converges at rate 1/k") {
    const auto id = validate_action(IntMatrix{{1, 0}, {0, 1}});
    for (IntVec w : {IntVec{1, 1}, IntVec{2, 3}}) {
      const double s = static_cast<double>(w[0] + w[1]);
      SweepPlan plan{id, w, ProjectivePoint::from_simplex({w[0] / s, w[1] / s}), default_k_grid(), 2};
      const auto rs = ratio_sweep(plan);
      CHECK(std::fabs(rs.rows.back().ratio - 1) < 5e-3);
      CHECK(residual_order(rs.rows) >= 0.9);
    }
    // varpi = (1,1): ratio = (2k+1)!/(k!)^2 * (pi k)^{1/2} / 4^k / ... has B_1 = 3/8
    SweepPlan plan{id, {1, 1}, ProjectivePoint::from_simplex({0.5, 0.5}), {}, 2};
    for (std::int64_t k = 200; k <= 4000; k += 200) plan.k_grid.push_back(k);
    CHECK(fit_expansion(ratio_sweep(plan).rows, 3).coefficients[0] == doctest::Approx(0.375).epsilon(1e-6));
  }

  TEST_CASE("scaling sweep: zero vector and Gaussian target") {
    const auto id = validate_action(IntMatrix{{1, 0}, {0, 1}});
    const auto m = ProjectivePoint::from_simplex({0.5, 0.5});
    for (const auto& r : scaling_sweep(id, m, {1, 1}, TangentVector::make(m, CVec(2)), {100, 1000})) CHECK(r.value == doctest::Approx(1.0));
    const auto v = TangentVector::make(m, {{M_SQRT1_2, 0}, {-M_SQRT1_2, 0}});
    const auto rows = scaling_sweep(id, m, {1, 1}, v, {250, 500, 1000, 2000});
    for (std::size_t i = 1; i < rows.size(); ++i)
      CHECK(std::fabs(rows[i].value - rows[i].target) <= std::fabs(rows[i - 1].value - rows[i - 1].target));
    CHECK(rows.back().value == doctest::Approx(std::exp(-4.0)).epsilon(0.05));
    const auto twice = TangentVector::make(m, {{2 * M_SQRT1_2, 0}, {-2 * M_SQRT1_2, 0}});
    const double q = std::log(scaling_sweep(id, m, {1, 1}, twice, {2000}).back().value) / std::log(rows.back().value);
    CHECK(q == doctest::Approx(4.0).epsilon(0.05));
  }

  TEST_CASE("off-diagonal sweep") {
    const auto id = validate_action(IntMatrix{{1, 0}, {0, 1}});
    const auto m = ProjectivePoint::from_simplex({0.5, 0.5});
    const auto v = TangentVector::make(m, {{0.5, 0}, {-0.5, 0}});
    const auto same = offdiag_modulus_sweep(id, m, {1, 1}, v, v, {1000});
    const auto diag = scaling_sweep(id, m, {1, 1}, v, {1000});
    CHECK(same[0].value == doctest::Approx(diag[0].value).epsilon(1e-9));
    const auto neg = TangentVector::make(m, {{-0.5, 0}, {0.5, 0}});
    const auto opp = offdiag_modulus_sweep(id, m, {1, 1}, v, neg, {4000});
    CHECK(opp[0].target == doctest::Approx(std::exp(-2 * 2 * 0.5)).epsilon(1e-12));
    CHECK(opp[0].value == doctest::Approx(opp[0].target).epsilon(0.1));
    // stabilized point of the weights (1,3) action
    const auto w13 = validate_action(IntMatrix{{1, 3}});
    const auto x = ProjectivePoint::from_simplex({0, 1});
    const auto u1 = TangentVector::make(x, {{0.6, 0.2}, {0, 0}});
    const auto u2 = TangentVector::make(x, {{-0.1, 0.4}, {0, 0}});
    for (const auto& r : offdiag_modulus_sweep(w13, x, {1}, u1, u2, {3000, 3001, 3002}))
      CHECK(r.value == doctest::Approx(r.target).epsilon(0.1));
  }

  TEST_CASE("localization closed form") {
    const auto id = validate_action(IntMatrix{{1, 0}, {0, 1}});
    std::vector<std::pair<double, ProjectivePoint>> path;
    for (double p0 : {0.1, 0.25, 0.4, 0.5}) path.emplace_back(p0, ProjectivePoint::from_simplex({p0, 1 - p0}));
    path.emplace_back(1.0, ProjectivePoint::from_simplex({1, 0}));
    std::vector<std::int64_t> ks;
    for (std::int64_t k = 50; k <= 1000; k += 50) ks.push_back(k);
    const auto rows = localization_sweep(id, {1, 1}, path, ks);
    for (int i = 0; i < 3; ++i) {
      const double p0 = rows[i].s;
      CHECK(rows[i].fit.gamma == doctest::Approx(-std::log(4 * p0 * (1 - p0))).epsilon(0.01));
      CHECK(rows[i].fit.decays);
    }
    CHECK(rows[3].fit.no_decay);
    CHECK(std::fabs(rows[3].fit.gamma) < 1e-6);
    CHECK(rows[4].fit.degenerate);
  }

  TEST_CASE("quadrature oracles") {
    const auto one = [](const std::vector<double>&) { return 1.0; };
    const auto q1 = simplex_pushforward_integral(one, 2, 5000, 1);
    CHECK(q1.estimate == 1.0);
    CHECK(q1.stderr_ == 0.0);
    const auto f = [](const std::vector<double>& p) { return std::pow(1 + p[1], -2.0); };
    const auto qs = simplex_pushforward_integral(f, 1, 100000, 2);
    CHECK(std::fabs(qs.estimate - 0.5) <= 3 * qs.stderr_);
    const auto qz = sphere_integral(f, 1, 100000, 3);
    CHECK(sigma_distance(qs, qz) <= 3);
    const auto w = [](const std::vector<double>& p) { return std::pow(p[0] + 2 * p[1] + 3 * p[2], -3.0); };
    CHECK(sigma_distance(simplex_pushforward_integral(w, 2, 100000, 4), sphere_integral(w, 2, 100000, 5)) <= 3);
    // determinism across thread counts
    const auto a = simplex_pushforward_integral(w, 2, 60000, 6, 1);
    const auto b = simplex_pushforward_integral(w, 2, 60000, 6, 5);
    CHECK(a.estimate == b.estimate);
    CHECK(a.stderr_ == b.stderr_);
  }

  TEST_CASE("tube integral") {
    const auto w12 = validate_action(IntMatrix{{1, 2}});
    const auto one = [](const GeometryReport&) { return 1.0; };
    const auto g1 = tube_integral_over_Mvarpi(w12, {1}, one, 0.05, 20000, 1);
    CHECK(g1.method == "sphere_mc");
    CHECK(g1.estimate == doctest::Approx(M_PI));
    // the fiber over p = (1/2, 1/2) is a great circle of radius 1/2 in the
    // Fubini-Study metric of total volume pi
    const auto id = validate_action(IntMatrix{{1, 0}, {0, 1}});
    const auto q = tube_integral_over_Mvarpi(id, {1, 1}, one, 0.02, 1000000, 2);
    CHECK(q.method == "tube_mc");
    CHECK(std::fabs(q.estimate - M_PI) <= 4 * q.stderr_ + 0.01 * M_PI);
  }

  TEST_CASE("tube distance") {
    const auto t2 = validate_action(IntMatrix{{1, 0, 1}, {0, 1, 1}});
    const auto on = geometry_report_simplex(t2, {0.25, 0.25, 0.5}, {1, 1});
    CHECK(tube_distance(on, {1, 1}) < 1e-12);
    const auto off = geometry_report_simplex(t2, {0.3, 0.2, 0.5}, {1, 1});
    CHECK(tube_distance(off, {1, 1}) > 0);
    CHECK(std::isinf(tube_distance(off, {-1, -1})));
  }

  TEST_CASE("growth exponent") {
    std::vector<std::pair<std::int64_t, double>> s;
    for (std::int64_t k = 10; k <= 200; k += 10) s.emplace_back(k, 3.0 * k * k + 5 * k + 1);
    CHECK(growth_exponent_fit(s).slope == doctest::Approx(2.0).epsilon(1e-4));
    CHECK_THROWS(growth_exponent_fit({s.begin(), s.begin() + 3}));
  }

  TEST_CASE("points on the ray") {
    const auto t2 = validate_action(IntMatrix{{1, 0, 1}, {0, 1, 1}});
    const auto m = canonical_on_ray_point(t2, {2, 1});
    CHECK(ray_angle(moment_map(t2, m), {2, 1}) < 1e-12);
    for (const auto& x : sample_on_ray_points(t2, {3, 1}, 50, 4, true)) {
      CHECK(ray_angle(moment_map(t2, x), {3, 1}) < 1e-10);
      CHECK(x.support.size() == 3);
    }
    const auto a = sample_on_ray_points(t2, {3, 1}, 5, 9);
    const auto b = sample_on_ray_points(t2, {3, 1}, 5, 9);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].p == b[i].p);
  }
}
