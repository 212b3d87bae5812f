#include "tzlab/asymptotic_predictions.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "tzlab/errors.hpp"

namespace tzlab {

LogReal LeadingTerm::at(std::int64_t k) const {
  const std::int64_t cf = character_factor ? character_factor(k) : 1;
  if (cf == 0) return {};
  return prefactor * LogReal::from_log(power_of_k * std::log(static_cast<long double>(k))) *
         LogReal::from_value(static_cast<long double>(cf));
}

namespace {

long double varpi_norm(const IntVec& varpi) {
  long double s = 0.0L;
  for (auto v : varpi) s += static_cast<long double>(v) * static_cast<long double>(v);
  return std::sqrt(s);
}

// (|varpi| k / pi)^d |Phi|^{-(d+1)} charsum, shared by the circle formula
// and the g = 1 torus formula so that the two agree bit for bit.
LogReal circle_core(int d, long double log_varpi_norm, long double phi, std::int64_t k, std::int64_t charsum) {
  if (charsum == 0) return {};
  const long double l = d * (log_varpi_norm + std::log(static_cast<long double>(k)) - kLogPi) -
                        (d + 1) * std::log(std::fabs(phi)) + std::log(static_cast<long double>(charsum));
  return LogReal::from_log(l);
}

void require_positive_k(std::int64_t k) {
  if (k <= 0) throw InputError("k must be positive");
}

}  // namespace

LogReal predicted_leading_circle(const WeightedAction& a, const ProjectivePoint& m, std::int64_t k) {
  if (a.g != 1) throw PreconditionError("predicted_leading_circle: requires g = 1");
  require_positive_k(k);
  const Eigen::VectorXd Phi = moment_map(a, m);
  if (Phi(0) == 0.0) throw PreconditionError("predicted_leading_circle: Phi(m) = 0");
  const StabilizerGroup G = stabilizer(a, m.support);
  return circle_core(a.d, 0.0L, Phi(0), k, character_sum(G, IntVec{1}, k).exact);
}

LeadingTerm leading_term_circle(const WeightedAction& a, const ProjectivePoint& m) {
  if (a.g != 1) throw PreconditionError("leading_term_circle: requires g = 1");
  const Eigen::VectorXd Phi = moment_map(a, m);
  LeadingTerm t;
  t.prefactor = LogReal::from_log(-a.d * kLogPi - (a.d + 1) * std::log(std::fabs(static_cast<long double>(Phi(0)))));
  t.power_of_k = a.d;
  auto G = std::make_shared<StabilizerGroup>(stabilizer(a, m.support));
  t.character_factor = [G](std::int64_t k) { return character_sum(*G, IntVec{1}, k).exact; };
  t.description = "circle: (k/pi)^d Phi^-(d+1) sum_{T_m} g^k";
  return t;
}

namespace {

struct TorusParts {
  GeometryReport geo;
  StabilizerGroup G;
  long double wn = 0;
};

TorusParts torus_parts(const WeightedAction& a, const ProjectivePoint& m, const IntVec& varpi) {
  TorusParts t;
  t.wn = varpi_norm(varpi);
  t.geo = geometry_report(a, m, varpi);
  if (ray_angle(t.geo.Phi, varpi) >= kOnRayTolerance) throw PreconditionError("not on M_varpi");
  if (!t.geo.transversal) throw PreconditionError("transversality fails at m");
  t.G = stabilizer(a, m.support);
  return t;
}

long double torus_log_no_character(const WeightedAction& a, const TorusParts& t, std::int64_t k, TorusForm form) {
  const int g = a.g, d = a.d;
  const long double e = d + (1.0L - g) / 2.0L;
  const long double lk = std::log(t.wn) + std::log(static_cast<long double>(k)) - kLogPi;
  const long double lphi = std::log(static_cast<long double>(t.geo.Phi.norm()));
  if (form == TorusForm::ScriptD) {
    return -(g - 1) * (0.5L * std::log(2.0L) + kLogPi) + e * lk - std::log(static_cast<long double>(*t.geo.scriptD)) -
           (e + 1) * lphi;
  }
  if (!t.geo.Veff) throw PreconditionError("V_eff form requires a locally free point");
  return e * lk - std::log(static_cast<long double>(t.G.order)) + 0.5L * (g + 1) * std::log(2.0L) + kLogPi -
         std::log(static_cast<long double>(*t.geo.Veff)) -
         0.5L * std::log(static_cast<long double>(*t.geo.phi_dual_norm_sq)) - e * lphi;
}

}  // namespace

LogReal predicted_leading_torus(const WeightedAction& a, const ProjectivePoint& m, const IntVec& varpi,
                                std::int64_t k, TorusForm form) {
  require_positive_k(k);
  if (a.g == 1 && form == TorusForm::ScriptD) {
    const Eigen::VectorXd Phi = moment_map(a, m);
    if (ray_angle(Phi, varpi) >= kOnRayTolerance) throw PreconditionError("not on M_varpi");
    const StabilizerGroup G = stabilizer(a, m.support);
    return circle_core(a.d, std::log(varpi_norm(varpi)), Phi(0), k, character_sum(G, varpi, k).exact);
  }
  const TorusParts t = torus_parts(a, m, varpi);
  const std::int64_t cs = character_sum(t.G, varpi, k).exact;
  if (cs == 0) return {};
  return LogReal::from_log(torus_log_no_character(a, t, k, form) + std::log(static_cast<long double>(cs)));
}

LogReal predicted_leading_torus_no_character(const WeightedAction& a, const ProjectivePoint& m,
                                             const IntVec& varpi, std::int64_t k) {
  require_positive_k(k);
  const TorusParts t = torus_parts(a, m, varpi);
  return LogReal::from_log(torus_log_no_character(a, t, k, TorusForm::ScriptD));
}

LeadingTerm leading_term_torus(const WeightedAction& a, const ProjectivePoint& m, const IntVec& varpi,
                               TorusForm form) {
  const TorusParts t = torus_parts(a, m, varpi);
  LeadingTerm lt;
  const long double e = a.d + (1.0L - a.g) / 2.0L;
  // Value at k = 1 without character, divided by 1^e.
  lt.prefactor = LogReal::from_log(torus_log_no_character(a, t, 1, form));
  lt.power_of_k = e;
  auto G = std::make_shared<StabilizerGroup>(t.G);
  lt.character_factor = [G, varpi](std::int64_t k) { return character_sum(*G, varpi, k).exact; };
  lt.description = form == TorusForm::ScriptD ? "torus, scriptD form" : "torus, V_eff form";
  return lt;
}

double predicted_dim_circle(const WeightedAction& a) {
  if (a.g != 1) throw PreconditionError("predicted_dim_circle: requires g = 1");
  if (!a.has_cert()) throw UnboundedIsotypeError();
  long double prod = 1.0L;
  for (int i = 0; i <= a.d; ++i) prod *= std::fabs(static_cast<long double>(a.W(0, i)));
  return static_cast<double>(static_cast<long double>(generic_stabilizer_order(a)) / prod);
}

double DimTorusPrediction::constant_from_integral(double integral) const {
  return std::pow(varpi_norm / std::numbers::pi, static_cast<double>(exponent_num)) *
         std::pow(2.0 * std::numbers::pi, -(g - 1)) * integral;
}

DimTorusPrediction predicted_dim_torus_exponent(const WeightedAction& a, const IntVec& varpi) {
  if (!a.has_cert()) throw UnboundedIsotypeError();
  DimTorusPrediction p;
  p.exponent_num = a.d + 1 - a.g;
  p.g = a.g;
  p.varpi_norm = static_cast<double>(varpi_norm(varpi));
  if (p.varpi_norm == 0.0) throw PreconditionError("varpi = 0");
  const int power = a.d + 2 - a.g;
  p.integrand = [power](const GeometryReport& r) {
    if (!r.scriptD) return 0.0;
    return std::pow(r.Phi.norm(), -power) / *r.scriptD;
  };
  return p;
}

GaussianProfile gaussian_profile(const WeightedAction& a, const ProjectivePoint& m, const IntVec& varpi,
                                 const TangentVector& v, double normal_tol) {
  const Eigen::VectorXd Phi = moment_map(a, m);
  if (ray_angle(Phi, varpi) >= kOnRayTolerance) throw PreconditionError("not on M_varpi");
  const double lambda = static_cast<double>(varpi_norm(varpi)) / Phi.norm();
  GaussianProfile out;
  out.value = std::exp(-2.0 * lambda * norm_sq(v.v));
  out.normal_defect = normal_defect(a, m, v.v);
  out.not_normal = out.normal_defect > normal_tol;
  return out;
}

DecayFit decay_envelope_fit(const std::vector<std::pair<std::int64_t, LogReal>>& series, int d,
                            double no_decay_threshold) {
  DecayFit f;
  std::vector<std::pair<double, double>> pts;
  bool any_nonzero = false;
  for (const auto& [k, v] : series) {
    if (v.is_zero()) continue;
    any_nonzero = true;
    const long double y = v.log_abs() + d * (kLogPi - std::log(static_cast<long double>(k)));
    pts.emplace_back(static_cast<double>(k), static_cast<double>(y));
  }
  if (!any_nonzero) {
    f.degenerate = true;
    f.decays = true;
    return f;
  }
  if (pts.size() < 8) throw PreconditionError("decay_envelope_fit: need at least 8 nonzero points");
  f.points = pts.size();
  const int n = static_cast<int>(pts.size());
  Eigen::MatrixXd X(n, 5);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const double k = pts[i].first;
    X(i, 0) = 1.0;
    X(i, 1) = std::log(k);
    X(i, 2) = 1.0 / k;
    X(i, 3) = 1.0 / (k * k);
    X(i, 4) = -k;
    y(i) = pts[i].second;
  }
  // Column scaling keeps the QR well conditioned.
  Eigen::VectorXd sc = X.colwise().norm().transpose();
  Eigen::MatrixXd Xs = X * sc.cwiseInverse().asDiagonal();
  const Eigen::VectorXd bs = Xs.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd b = bs.cwiseQuotient(sc);
  f.gamma = b(4);
  const Eigen::VectorXd res = y - X * b;
  const double mean = y.mean();
  const double ss_tot = (y.array() - mean).square().sum();
  f.r2 = ss_tot > 0.0 ? 1.0 - res.squaredNorm() / ss_tot : 1.0;
  f.no_decay = std::fabs(f.gamma) < no_decay_threshold;
  f.decays = f.gamma > no_decay_threshold && f.r2 >= 0.99;
  return f;
}

}  // namespace tzlab
