#include "tzlab/verification_engine.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "tzlab/errors.hpp"
#include "tzlab/parallel.hpp"

namespace tzlab {

std::vector<std::int64_t> default_k_grid() { return {250, 500, 1000, 2000, 4000}; }

namespace {

bool is_unit_circle(const WeightedAction& a, const IntVec& varpi) { return a.g == 1 && varpi.size() == 1 && varpi[0] == 1; }

IntVec character_varpi(const WeightedAction& a, const IntVec& varpi) { return is_unit_circle(a, varpi) ? IntVec{1} : varpi; }

IntVec scaled(const IntVec& varpi, std::int64_t k) {
  IntVec out = varpi;
  for (auto& v : out) v *= k;
  return out;
}

ProjectivePoint displaced(const ProjectivePoint& m, const CVec& v, std::int64_t k) {
  const double s = 1.0 / std::sqrt(static_cast<double>(k));
  if (std::sqrt(norm_sq(v)) * s > 0.5) throw PreconditionError("displacement leaves the chart (|v|/sqrt(k) > 0.5)");
  CVec z = m.z;
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += v[i] * s;
  return ProjectivePoint::from_coords(z);
}

}  // namespace

std::vector<std::int64_t> admissible_k(const SweepPlan& plan, std::vector<std::int64_t>* skipped) {
  const StabilizerGroup G = stabilizer(plan.action, plan.point.support);
  const IntVec cv = character_varpi(plan.action, plan.varpi);
  std::vector<std::int64_t> out;
  for (auto k : plan.k_grid) {
    if (k <= 0) throw InputError("k must be positive");
    if (character_sum(G, cv, k).exact != 0) out.push_back(k);
    else if (skipped) skipped->push_back(k);
  }
  return out;
}

RatioSeries ratio_sweep(const SweepPlan& plan) {
  RatioSeries s;
  const auto ks = admissible_k(plan, &s.skipped);
  if (ks.empty()) throw PreconditionError("ratio_sweep: no admissible k in the grid");
  s.rows.resize(ks.size());
  const bool circle = is_unit_circle(plan.action, plan.varpi);
  parallel_for(ks.size(), plan.jobs, [&](std::size_t i) {
    RatioRow& r = s.rows[i];
    r.k = ks[i];
    r.exact = isotype_kernel_diag(plan.action, scaled(plan.varpi, r.k), plan.point);
    r.predicted = circle ? predicted_leading_circle(plan.action, plan.point, r.k)
                         : predicted_leading_torus(plan.action, plan.point, plan.varpi, r.k);
    if (r.exact.is_zero() || r.predicted.is_zero()) {
      r.log_ratio = -std::numeric_limits<long double>::infinity();
      r.ratio = 0.0;
    } else {
      r.log_ratio = r.exact.log_abs() - r.predicted.log_abs();
      r.ratio = static_cast<double>(std::exp(r.log_ratio));
    }
  });
  return s;
}

bool verify_skipped_vanish(const SweepPlan& plan, const std::vector<std::int64_t>& skipped, std::size_t count) {
  const std::size_t n = std::min(count, skipped.size());
  for (std::size_t i = 0; i < n; ++i) {
    // Spread the checks over the skipped list.
    const std::int64_t k = skipped[i * skipped.size() / n];
    if (!isotype_kernel_diag(plan.action, scaled(plan.varpi, k), plan.point).is_zero()) return false;
  }
  return true;
}

namespace {

struct LsqOut {
  Eigen::VectorXd coef;
  Eigen::VectorXd se;
  double rms = 0.0;
};

LsqOut least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Eigen::Index n = X.rows(), p = X.cols();
  Eigen::VectorXd sc = X.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < p; ++j)
    if (sc(j) == 0.0) sc(j) = 1.0;
  const Eigen::MatrixXd Xs = X * sc.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
  if (qr.rank() < p) throw PreconditionError("least squares: rank-deficient design");
  LsqOut out;
  const Eigen::VectorXd bs = qr.solve(y);
  out.coef = bs.cwiseQuotient(sc);
  const Eigen::VectorXd res = y - X * out.coef;
  out.rms = std::sqrt(res.squaredNorm() / static_cast<double>(n));
  out.se = Eigen::VectorXd::Zero(p);
  if (n > p) {
    const double s2 = res.squaredNorm() / static_cast<double>(n - p);
    const Eigen::MatrixXd XtX = Xs.transpose() * Xs;
    const Eigen::MatrixXd cov = XtX.inverse() * s2;
    for (Eigen::Index j = 0; j < p; ++j) out.se(j) = std::sqrt(std::max(0.0, cov(j, j))) / sc(j);
  }
  return out;
}

// Rows scaled by k^{step} so the leading coefficient is O(1).
LsqOut fit_rows(const std::vector<RatioRow>& rows, int L, FitModel model, bool free_constant) {
  const double step = model == FitModel::InversePowers ? 1.0 : 0.5;
  const int p = L + (free_constant ? 1 : 0);
  Eigen::MatrixXd X(rows.size(), p);
  Eigen::VectorXd y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double k = static_cast<double>(rows[i].k);
    const double w = std::pow(k, step);
    int c = 0;
    if (free_constant) X(i, c++) = w;
    for (int l = 1; l <= L; ++l) X(i, c++) = w * std::pow(k, -step * l);
    const double dev = static_cast<double>(std::expm1(rows[i].log_ratio));
    y(i) = w * (free_constant ? dev + 1.0 : dev);
  }
  return least_squares(X, y);
}

}  // namespace

double residual_order(const std::vector<RatioRow>& series) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : series) {
    const double dev = std::fabs(static_cast<double>(std::expm1(r.log_ratio)));
    if (dev > 0.0 && std::isfinite(dev)) pts.emplace_back(std::log(static_cast<double>(r.k)), std::log(dev));
  }
  if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0, my = 0;
  for (auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= pts.size();
  my /= pts.size();
  double sxy = 0, sxx = 0;
  for (auto& [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  return -sxy / sxx;
}

FitResult fit_expansion(const std::vector<RatioRow>& series, int L, FitModel model, double stability_floor) {
  if (L < 1) throw InputError("fit_expansion: L must be at least 1");
  if (static_cast<int>(series.size()) < L + 3) throw PreconditionError("fit_expansion: need at least L + 3 points");
  for (const auto& r : series)
    if (!std::isfinite(static_cast<double>(r.log_ratio))) throw PreconditionError("fit_expansion: zero ratio in series");
  FitResult f;
  f.model = model;
  const LsqOut full = fit_rows(series, L, model, false);
  for (int l = 0; l < L; ++l) {
    f.coefficients.push_back(full.coef(l));
    f.stderrs.push_back(full.se(l));
  }
  f.residual_rms = full.rms;
  f.leading_ratio_limit = fit_rows(series, L, model, true).coef(0);
  f.residual_order_estimate = residual_order(series);

  const std::size_t half = (series.size() + 1) / 2;
  const std::vector<RatioRow> lo(series.begin(), series.begin() + half), hi(series.begin() + half, series.end());
  const int Lh = std::min<int>(L, static_cast<int>(hi.size()) - 1);
  if (Lh >= 1) {
    const LsqOut a = fit_rows(lo, Lh, model, false), b = fit_rows(hi, Lh, model, false);
    for (int l = 0; l < Lh; ++l) {
      f.lower_half.push_back(a.coef(l));
      f.upper_half.push_back(b.coef(l));
      f.lower_stderr.push_back(a.se(l));
      f.upper_stderr.push_back(b.se(l));
    }
    const double diff = std::fabs(a.coef(0) - b.coef(0));
    const double sig = std::hypot(a.se(0), b.se(0));
    f.stable = diff <= 3.0 * sig + stability_floor * std::max(std::fabs(full.coef(0)), 1e-12);
  }
  return f;
}

std::vector<ProfileRow> scaling_sweep(const WeightedAction& a, const ProjectivePoint& m, const IntVec& varpi,
                                      const TangentVector& v, const std::vector<std::int64_t>& k_grid, int jobs) {
  double target = 1.0;
  if (a.g > 1) target = gaussian_profile(a, m, varpi, v).value;
  std::vector<ProfileRow> rows(k_grid.size());
  parallel_for(k_grid.size(), jobs, [&](std::size_t i) {
    const std::int64_t k = k_grid[i];
    if (k <= 0) throw InputError("k must be positive");
    const ProjectivePoint xk = displaced(m, v.v, k);
    const IntVec kv = scaled(varpi, k);
    const LogReal base = isotype_kernel_diag(a, kv, m);
    const LogReal moved = isotype_kernel_diag(a, kv, xk);
    rows[i].k = k;
    rows[i].target = target;
    rows[i].value = base.is_zero() ? std::numeric_limits<double>::quiet_NaN()
                                   : static_cast<double>(std::exp(moved.log_abs() - base.log_abs()));
  });
  return rows;
}

double offdiag_target(const WeightedAction& a, const ProjectivePoint& m, const IntVec& varpi, const TangentVector& v1,
                      const TangentVector& v2, std::int64_t k) {
  const StabilizerGroup G = stabilizer(a, m.support);
  if (!G.enumerated) throw PreconditionError("stabilizer not enumerable");
  const IntVec cv = character_varpi(a, varpi);
  std::complex<double> sum{0.0, 0.0};
  for (std::size_t e = 0; e < G.elements.size(); ++e) {
    const auto th = G.angle(e);
    double kvt = 0.0;
    for (int j = 0; j < a.g; ++j) kvt += static_cast<double>(cv[j]) * th[j];
    kvt = std::remainder(kvt * static_cast<double>(k % G.denominator), 1.0);
    CVec rot = v1.v;
    for (int i = 0; i <= a.d; ++i) {
      double wt = 0.0;
      for (int j = 0; j < a.g; ++j) wt += static_cast<double>(a.W(j, i)) * th[j];
      rot[i] *= std::polar(1.0, -2.0 * std::numbers::pi * wt);
    }
    const TangentVector rv{v1.base, rot};
    const ScalingInvariants si = scaling_invariants(a, m, varpi, rv, v2, std::make_pair(0.0, 0.0));
    const cplx q = a.g == 1 ? *si.E : si.H;
    sum += std::polar(1.0, 2.0 * std::numbers::pi * kvt) * std::exp(q);
  }
  return std::abs(sum);
}

std::vector<ProfileRow> offdiag_modulus_sweep(const WeightedAction& a, const ProjectivePoint& m,
                                              const IntVec& varpi, const TangentVector& v1, const TangentVector& v2,
                                              const std::vector<std::int64_t>& k_grid, int jobs) {
  const StabilizerGroup G = stabilizer(a, m.support);
  const bool trivial = !G.positive_dimensional && G.order == 1;
  const bool circle = is_unit_circle(a, varpi);
  std::vector<ProfileRow> rows(k_grid.size());
  parallel_for(k_grid.size(), jobs, [&](std::size_t i) {
    const std::int64_t k = k_grid[i];
    if (k <= 0) throw InputError("k must be positive");
    const IntVec kv = scaled(varpi, k);
    const ProjectivePoint x1 = displaced(m, v1.v, k), x2 = displaced(m, v2.v, k);
    const KernelValue K = isotype_kernel(a, kv, x1, x2);
    LogReal norm;
    if (trivial) norm = isotype_kernel_diag(a, kv, m);
    else if (circle) {
      const Eigen::VectorXd Phi = moment_map(a, m);
      norm = LogReal::from_log(a.d * (std::log(static_cast<long double>(k)) - kLogPi) -
                               (a.d + 1) * std::log(std::fabs(static_cast<long double>(Phi(0)))));
    } else {
      norm = predicted_leading_torus_no_character(a, m, varpi, k);
    }
    rows[i].k = k;
    rows[i].value = K.value.is_zero() ? 0.0 : static_cast<double>(std::exp(K.value.modulus.log_abs() - norm.log_abs()));
    rows[i].target = offdiag_target(a, m, varpi, v1, v2, k);
  });
  return rows;
}

std::vector<LocalizationRow> localization_sweep(const WeightedAction& a, const IntVec& varpi,
                                                const std::vector<std::pair<double, ProjectivePoint>>& path,
                                                const std::vector<std::int64_t>& k_grid, int jobs,
                                                double no_decay_threshold) {
  const std::size_t nk = k_grid.size();
  std::vector<LogReal> vals(path.size() * nk);
  parallel_for(vals.size(), jobs, [&](std::size_t idx) {
    const std::size_t pi = idx / nk, ki = idx % nk;
    vals[idx] = isotype_kernel_diag(a, scaled(varpi, k_grid[ki]), path[pi].second);
  });
  std::vector<LocalizationRow> out;
  for (std::size_t pi = 0; pi < path.size(); ++pi) {
    std::vector<std::pair<std::int64_t, LogReal>> series;
    for (std::size_t ki = 0; ki < nk; ++ki) series.emplace_back(k_grid[ki], vals[pi * nk + ki]);
    out.push_back({path[pi].second, path[pi].first, decay_envelope_fit(series, a.d, no_decay_threshold)});
  }
  return out;
}

namespace {

struct Acc {
  long double s = 0, s2 = 0;
  std::size_t hits = 0;
};

template <class Sample>
QuadratureResult run_mc(std::size_t samples, std::uint64_t seed, int jobs, Sample&& sample) {
  if (samples < 1000) throw InputError("Monte Carlo needs at least 1000 samples");
  const std::size_t chunks = (samples + kMcChunk - 1) / kMcChunk;
  std::vector<Acc> part(chunks);
  parallel_for(chunks, jobs, [&](std::size_t c) {
    auto rng = chunk_rng(seed, c);
    const std::size_t lo = c * kMcChunk, hi = std::min(samples, lo + kMcChunk);
    Acc acc;
    for (std::size_t s = lo; s < hi; ++s) {
      bool hit = false;
      const double y = sample(rng, hit);
      acc.s += y;
      acc.s2 += static_cast<long double>(y) * y;
      if (hit) ++acc.hits;
    }
    part[c] = acc;
  });
  Acc tot;
  for (const auto& a : part) {
    tot.s += a.s;
    tot.s2 += a.s2;
    tot.hits += a.hits;
  }
  const long double n = static_cast<long double>(samples);
  const long double m = tot.s / n;
  QuadratureResult r;
  r.estimate = static_cast<double>(m);
  r.stderr_ = static_cast<double>(std::sqrt(std::max(0.0L, tot.s2 / n - m * m) / (n - 1)));
  r.samples = samples;
  r.hits = tot.hits;
  return r;
}

std::vector<double> sample_simplex(int d, std::mt19937_64& rng) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> p(d + 1);
  double s = 0.0;
  for (auto& x : p) {
    x = ex(rng);
    s += x;
  }
  for (auto& x : p) x /= s;
  return p;
}

std::vector<double> sphere_p(int d, std::mt19937_64& rng) {
  const CVec z = sample_sphere(d, rng);
  std::vector<double> p(d + 1);
  for (int i = 0; i <= d; ++i) p[i] = std::norm(z[i]);
  return p;
}

}  // namespace

QuadratureResult simplex_pushforward_integral(const SimplexFunction& f, int d, std::size_t samples,
                                              std::uint64_t seed, int jobs) {
  auto r = run_mc(samples, seed, jobs, [&](std::mt19937_64& rng, bool&) { return f(sample_simplex(d, rng)); });
  r.method = "simplex_pushforward";
  return r;
}

QuadratureResult sphere_integral(const SimplexFunction& f, int d, std::size_t samples, std::uint64_t seed, int jobs) {
  auto r = run_mc(samples, seed, jobs, [&](std::mt19937_64& rng, bool&) { return f(sphere_p(d, rng)); });
  r.method = "sphere_mc";
  return r;
}

double sigma_distance(const QuadratureResult& a, const QuadratureResult& b) {
  const double s = std::hypot(a.stderr_, b.stderr_);
  const double diff = std::fabs(a.estimate - b.estimate);
  if (s == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / s;
}

double tube_distance(const GeometryReport& r, const IntVec& varpi) {
  Eigen::VectorXd w(varpi.size());
  for (std::size_t j = 0; j < varpi.size(); ++j) w(j) = static_cast<double>(varpi[j]);
  w.normalize();
  const double along = r.Phi.dot(w);
  if (along <= 0.0 || !r.scriptD) return std::numeric_limits<double>::infinity();
  const Eigen::VectorXd perp = r.Phi - along * w;
  const Eigen::VectorXd phi = r.kerBasis.transpose() * perp;
  return 0.5 * std::sqrt(std::max(0.0, phi.dot(r.D.ldlt().solve(phi))));
}

QuadratureResult tube_integral_over_Mvarpi(const WeightedAction& a, const IntVec& varpi, const GeometryFunction& F,
                                           double epsilon, std::size_t samples, std::uint64_t seed, int jobs) {
  if (!(epsilon > 0.0)) throw InputError("tube epsilon must be positive");
  const int d = a.d, g = a.g;
  const double vol_M = std::pow(std::numbers::pi, d) / std::tgamma(d + 1.0);
  if (g == 1) {
    auto r = run_mc(samples, seed, jobs, [&](std::mt19937_64& rng, bool&) {
      return vol_M * F(geometry_report_simplex(a, sphere_p(d, rng), varpi));
    });
    r.method = "sphere_mc";
    r.hits = samples;
    return r;
  }
  const int k = g - 1;
  auto ball = [k](double r) { return std::pow(std::numbers::pi, k / 2.0) * std::pow(r, k) / std::tgamma(k / 2.0 + 1.0); };
  const double b1 = ball(epsilon), b2 = ball(epsilon / 2.0);
  auto r = run_mc(samples, seed, jobs, [&](std::mt19937_64& rng, bool& hit) {
    const auto p = sphere_p(d, rng);
    const GeometryReport gr = geometry_report_simplex(a, p, varpi);
    const double dist = tube_distance(gr, varpi);
    if (!(dist < epsilon)) return 0.0;
    hit = true;
    const double f = F(gr);
    const double inner = dist < epsilon / 2.0 ? 1.0 / b2 : 0.0;
    return vol_M * f * (4.0 * inner - 1.0 / b1) / 3.0;
  });
  if (r.hits == 0) throw PreconditionError("tube is empty after sampling; raise epsilon or the sample count");
  r.method = "tube_mc";
  return r;
}

SlopeFit growth_exponent_fit(const std::vector<std::pair<std::int64_t, double>>& series) {
  std::vector<std::pair<double, double>> pts;
  for (auto [k, y] : series)
    if (y > 0.0) pts.emplace_back(static_cast<double>(k), std::log(y));
  if (pts.size() < 6) throw PreconditionError("growth_exponent_fit: need at least 6 positive points");
  Eigen::MatrixXd X(pts.size(), 4);
  Eigen::VectorXd y(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double k = pts[i].first;
    X(i, 0) = 1.0;
    X(i, 1) = std::log(k);
    X(i, 2) = 1.0 / k;
    X(i, 3) = 1.0 / (k * k);
    y(i) = pts[i].second;
  }
  const LsqOut o = least_squares(X, y);
  return {o.coef(1), o.se(1)};
}

}  // namespace tzlab

namespace tzlab {

std::optional<std::vector<double>> project_to_ray(const WeightedAction& a, const IntVec& varpi,
                                                  const std::vector<double>& p) {
  const int n = a.d + 1;
  Eigen::VectorXd w(a.g);
  for (int j = 0; j < a.g; ++j) w(j) = static_cast<double>(varpi[j]);
  if (w.norm() == 0.0) throw PreconditionError("varpi = 0");
  w.normalize();
  Eigen::MatrixXd Wm(a.g, n);
  for (int j = 0; j < a.g; ++j)
    for (int i = 0; i < n; ++i) Wm(j, i) = static_cast<double>(a.W(j, i));
  const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(a.g, a.g) - w * w.transpose();
  // Constraints A p = b: sum p = 1 and P W p = 0.
  Eigen::MatrixXd A(1 + a.g, n);
  A.row(0).setOnes();
  A.bottomRows(a.g) = P * Wm;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(1 + a.g);
  b(0) = 1.0;
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(p.data(), n);
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  x -= cod.solve(A * x - b);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    if (x(i) < -1e-14) return std::nullopt;
    out[i] = std::max(0.0, x(i));
  }
  if ((Wm * x).dot(w) <= 0.0) return std::nullopt;
  return out;
}

ProjectivePoint canonical_on_ray_point(const WeightedAction& a, const IntVec& varpi) {
  const std::vector<double> bary(a.d + 1, 1.0 / (a.d + 1));
  if (auto q = project_to_ray(a, varpi, bary)) {
    ProjectivePoint m = ProjectivePoint::from_simplex(*q);
    if (ray_angle(moment_map(a, m), varpi) < kOnRayTolerance) return m;
  }
  auto pts = sample_on_ray_points(a, varpi, 1, 0x5eed);
  return pts.front();
}

std::vector<ProjectivePoint> sample_on_ray_points(const WeightedAction& a, const IntVec& varpi, std::size_t n,
                                                  std::uint64_t seed, bool require_locally_free) {
  std::vector<ProjectivePoint> out;
  auto rng = chunk_rng(seed, 0);
  std::exponential_distribution<double> ex(1.0);
  std::size_t tries = 0;
  while (out.size() < n) {
    if (++tries > 10000 * (n + 10)) throw PreconditionError("M_varpi appears empty (no on-ray points found)");
    std::vector<double> p(a.d + 1);
    double s = 0.0;
    for (auto& x : p) s += (x = ex(rng));
    for (auto& x : p) x /= s;
    auto q = project_to_ray(a, varpi, p);
    if (!q) continue;
    ProjectivePoint m = ProjectivePoint::from_simplex(*q);
    if (ray_angle(moment_map(a, m), varpi) >= kOnRayTolerance) continue;
    if (require_locally_free) {
      const GeometryReport r = geometry_report_simplex(a, m.p, varpi);
      if (!r.locally_free || !r.transversal) continue;
      // Stay away from the boundary, where the stabilizer jumps.
      if (m.support.size() != m.p.size()) continue;
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace tzlab
