#include "tzlab/fubini_geometry.hpp"

#include <cmath>
#include <numbers>

#include "tzlab/errors.hpp"

namespace tzlab {

ProjectivePoint ProjectivePoint::from_coords(const CVec& z, double support_tol) {
  if (z.empty()) throw InputError("point has no coordinates");
  long double s = 0.0L;
  for (const auto& c : z) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw InputError("point has non-finite coordinates");
    s += static_cast<long double>(std::norm(c));
  }
  if (s == 0.0L) throw InputError("point is the zero vector");
  const double inv = static_cast<double>(1.0L / std::sqrt(s));
  ProjectivePoint m;
  for (std::size_t i = 0; i < z.size(); ++i) {
    m.z.push_back(z[i] * inv);
    m.p.push_back(static_cast<double>(static_cast<long double>(std::norm(z[i])) / s));
    if (std::abs(m.z.back()) > support_tol) m.support.push_back(static_cast<int>(i));
  }
  return m;
}

ProjectivePoint ProjectivePoint::from_simplex(const std::vector<double>& p, double support_tol) {
  CVec z;
  for (double x : p) {
    if (!(x >= 0.0)) throw InputError("simplex coordinates must be nonnegative");
    z.emplace_back(std::sqrt(x), 0.0);
  }
  return from_coords(z, support_tol);
}

cplx hermitian(const CVec& u, const CVec& v) {
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
  return s;
}

double norm_sq(const CVec& v) {
  double s = 0.0;
  for (const auto& c : v) s += std::norm(c);
  return s;
}

double omega(const CVec& u, const CVec& v) { return hermitian(u, v).imag(); }

TangentVector TangentVector::make(const ProjectivePoint& base, const CVec& v) {
  if (v.size() != base.z.size()) throw InputError("tangent vector has wrong length");
  const double scale = std::sqrt(norm_sq(v));
  if (std::abs(hermitian(base.z, v)) > 1e-12 * std::max(1.0, scale))
    throw InputError("tangent vector is not horizontal (<z, v> != 0)");
  return {base, v};
}

TangentVector TangentVector::project(const ProjectivePoint& base, const CVec& v) {
  if (v.size() != base.z.size()) throw InputError("tangent vector has wrong length");
  const cplx c = hermitian(base.z, v);
  CVec out = v;
  for (std::size_t i = 0; i < v.size(); ++i) out[i] -= c * base.z[i];
  return {base, out};
}

Eigen::VectorXd moment_map_simplex(const WeightedAction& a, const std::vector<double>& p) {
  Eigen::VectorXd Phi = Eigen::VectorXd::Zero(a.g);
  for (int j = 0; j < a.g; ++j)
    for (int i = 0; i <= a.d; ++i) Phi(j) += static_cast<double>(a.W(j, i)) * p[i];
  return Phi;
}

Eigen::VectorXd moment_map(const WeightedAction& a, const ProjectivePoint& m) {
  if (m.dim() != a.d) throw InputError("point dimension does not match the action");
  return moment_map_simplex(a, m.p);
}

double grassmann_preset_eval(const std::vector<cplx>& pl, double klein_tol) {
  if (pl.size() != 6) throw InputError("Pluecker vector must have 6 entries");
  double n = norm_sq(pl);
  if (n == 0.0) throw InputError("Pluecker vector is zero");
  const cplx klein = pl[0] * pl[5] - pl[1] * pl[4] + pl[2] * pl[3];
  if (std::abs(klein) > klein_tol * n) throw InputError("Pluecker relation p01 p23 - p02 p13 + p03 p12 = 0 violated");
  static const double w[6] = {1, 2, 3, 3, 4, 5};
  double s = 0.0;
  for (int i = 0; i < 6; ++i) s += w[i] * std::norm(pl[i]);
  return s / n;
}

Eigen::MatrixXd gram_C_simplex(const WeightedAction& a, const std::vector<double>& p) {
  const Eigen::VectorXd Phi = moment_map_simplex(a, p);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(a.g, a.g);
  // Centered form keeps PSD-ness under rounding.
  for (int i = 0; i <= a.d; ++i) {
    if (p[i] == 0.0) continue;
    Eigen::VectorXd u(a.g);
    for (int j = 0; j < a.g; ++j) u(j) = static_cast<double>(a.W(j, i)) - Phi(j);
    C.noalias() += p[i] * u * u.transpose();
  }
  return C;
}

Eigen::MatrixXd gram_C(const WeightedAction& a, const ProjectivePoint& m) {
  if (m.dim() != a.d) throw InputError("point dimension does not match the action");
  return gram_C_simplex(a, m.p);
}

Eigen::MatrixXd ker_phi_basis(const Eigen::VectorXd& Phi) {
  const int g = static_cast<int>(Phi.size());
  const double n = Phi.norm();
  if (n == 0.0) throw PreconditionError("ker_phi_basis: Phi = 0");
  std::vector<Eigen::VectorXd> basis;
  basis.push_back(Phi / n);
  Eigen::MatrixXd K(g, g - 1);
  int col = 0;
  for (int s = 0; s < g && col < g - 1; ++s) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(g, s);
    // Two passes of modified Gram-Schmidt.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) v -= b.dot(v) * b;
    const double vn = v.norm();
    if (vn < 1e-8) continue;
    v /= vn;
    basis.push_back(v);
    K.col(col++) = v;
  }
  return K;
}

CVec action_field(const WeightedAction& a, const ProjectivePoint& m, const Eigen::VectorXd& eta) {
  const Eigen::VectorXd Phi = moment_map(a, m);
  const double ephi = eta.dot(Phi);
  CVec out(m.z.size());
  for (int i = 0; i <= a.d; ++i) {
    double ew = 0.0;
    for (int j = 0; j < a.g; ++j) ew += eta(j) * static_cast<double>(a.W(j, i));
    out[i] = cplx(0.0, ew - ephi) * m.z[i];
  }
  return out;
}

int psd_rank(const Eigen::MatrixXd& S, double rel_tol) {
  if (S.size() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double top = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  int r = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) > rel_tol * std::max(top, 1.0)) ++r;
  return r;
}

double ray_angle(const Eigen::VectorXd& Phi, const IntVec& varpi) {
  Eigen::VectorXd w(varpi.size());
  for (std::size_t j = 0; j < varpi.size(); ++j) w(j) = static_cast<double>(varpi[j]);
  const double wn = w.norm();
  if (wn == 0.0 || Phi.norm() == 0.0) return std::numbers::pi;
  w /= wn;
  const double along = Phi.dot(w);
  const double perp = (Phi - along * w).norm();
  return std::atan2(perp, along);
}

GeometryReport geometry_report_simplex(const WeightedAction& a, const std::vector<double>& p, const IntVec& varpi) {
  if (static_cast<int>(varpi.size()) != a.g) throw InputError("varpi has wrong length");
  if (static_cast<int>(p.size()) != a.d + 1) throw InputError("point dimension does not match the action");
  double wn = 0.0;
  for (auto v : varpi) wn += static_cast<double>(v) * static_cast<double>(v);
  wn = std::sqrt(wn);
  if (wn == 0.0) throw PreconditionError("geometry_report: varpi = 0");
  GeometryReport r;
  r.Phi = moment_map_simplex(a, p);
  r.C = gram_C_simplex(a, p);
  r.kerBasis = ker_phi_basis(r.Phi);
  r.D = r.kerBasis.transpose() * r.C * r.kerBasis;
  r.lambda = wn / r.Phi.norm();
  r.rank_val = psd_rank(r.C);
  r.locally_free = r.rank_val == a.g;
  if (a.g == 1 || r.rank_val == a.g) {
    r.transversal = true;
  } else if (r.rank_val == a.g - 1) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.C);
    const Eigen::VectorXd xi = es.eigenvectors().col(0);
    r.transversal = std::abs(r.Phi.dot(xi)) > 1e-10 * r.Phi.norm();
  }
  if (r.transversal) {
    const double det = a.g == 1 ? 1.0 : r.D.determinant();
    if (det > 0.0) r.scriptD = std::sqrt(det);
    else r.transversal = false;
  }
  if (r.locally_free) r.phi_dual_norm_sq = r.Phi.dot(r.C.ldlt().solve(r.Phi));
  return r;
}

GeometryReport geometry_report(const WeightedAction& a, const ProjectivePoint& m, const IntVec& varpi) {
  if (m.dim() != a.d) throw InputError("point dimension does not match the action");
  GeometryReport r = geometry_report_simplex(a, m.p, varpi);
  const StabilizerGroup G = stabilizer(a, m.support);
  r.stabilizer_order = G.positive_dimensional ? 0 : G.order;
  if (r.locally_free && r.stabilizer_order > 0) {
    r.Veff = std::pow(2.0 * std::numbers::pi, a.g) * std::sqrt(r.C.determinant()) /
             static_cast<double>(r.stabilizer_order);
  } else {
    r.phi_dual_norm_sq.reset();
  }
  return r;
}

namespace {

double rel_diff(double x, double y) {
  const double s = std::max(std::abs(x), std::abs(y));
  return s == 0.0 ? 0.0 : std::abs(x - y) / s;
}

}  // namespace

double gm_det_identity_residual(const WeightedAction& a, const ProjectivePoint& m, const IntVec& varpi) {
  const GeometryReport r = geometry_report(a, m, varpi);
  if (!r.locally_free) throw PreconditionError("gm_det_identity_residual: C(m) is singular");
  const double lhs = *r.phi_dual_norm_sq * r.C.determinant();
  const double rhs = r.Phi.squaredNorm() * (a.g == 1 ? 1.0 : r.D.determinant());
  return rel_diff(lhs, rhs);
}

double bordered_det_identity_residual(const WeightedAction& a, const ProjectivePoint& m, const IntVec& varpi) {
  const GeometryReport r = geometry_report(a, m, varpi);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(a.g + 1, a.g + 1);
  B.block(0, 1, 1, a.g) = r.Phi.transpose();
  B.block(1, 0, a.g, 1) = r.Phi;
  B.block(1, 1, a.g, a.g) = r.C;
  const double lhs = -B.determinant();
  const double rhs = r.Phi.squaredNorm() * (a.g == 1 ? 1.0 : r.D.determinant());
  // Both sides vanish together off the transversal locus; compare on the
  // scale of |Phi|^2 |C|^{g-1}.
  const double scale = r.Phi.squaredNorm() * std::pow(std::max(r.C.norm(), 1e-300), a.g - 1);
  const double s = std::max({std::abs(lhs), std::abs(rhs), 1e-14 * scale});
  return s == 0.0 ? 0.0 : std::abs(lhs - rhs) / s;
}

double circle_normalization_residual(const WeightedAction& a, const ProjectivePoint& m) {
  if (a.g != 1) throw PreconditionError("circle_normalization_residual: requires g = 1");
  const GeometryReport r = geometry_report(a, m, IntVec{1});
  if (!r.Veff) throw PreconditionError("circle_normalization_residual: m is a fixed point");
  const double lhs = std::abs(r.Phi(0));
  const double rhs = *r.Veff * static_cast<double>(r.stabilizer_order) * std::sqrt(*r.phi_dual_norm_sq) /
                     (2.0 * std::numbers::pi);
  return rel_diff(lhs, rhs);
}

ScalingInvariants scaling_invariants(const WeightedAction& a, const ProjectivePoint& m, const IntVec& varpi,
                                     const TangentVector& v1, const TangentVector& v2,
                                     std::optional<std::pair<double, double>> thetas) {
  double wn = 0.0;
  for (auto v : varpi) wn += static_cast<double>(v) * static_cast<double>(v);
  const Eigen::VectorXd Phi = moment_map(a, m);
  const double lambda = std::sqrt(wn) / Phi.norm();
  ScalingInvariants out;
  out.H = lambda * cplx(-(norm_sq(v1.v) + norm_sq(v2.v)), -omega(v1.v, v2.v));
  if (a.g == 1 && thetas) {
    const double phi = Phi(0);
    const double r = (thetas->second - thetas->first) / phi;
    const CVec xi = action_field(a, m, Eigen::VectorXd::Ones(1));
    CVec sum(xi.size()), diff(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) {
      sum[i] = v1.v[i] + v2.v[i];
      diff[i] = v1.v[i] - v2.v[i] - r * xi[i];
    }
    const cplx inner = cplx(0.0, r * omega(xi, sum) - omega(v1.v, v2.v));
    out.E = (inner - 0.5 * norm_sq(diff)) / phi;
  }
  return out;
}

CVec normal_projection(const WeightedAction& a, const ProjectivePoint& m, const CVec& v) {
  CVec out(v.size(), cplx{0.0, 0.0});
  if (a.g == 1) return out;
  const Eigen::VectorXd Phi = moment_map(a, m);
  const Eigen::MatrixXd K = ker_phi_basis(Phi);
  const int n = static_cast<int>(K.cols());
  std::vector<CVec> basis;
  for (int c = 0; c < n; ++c) {
    CVec xi = action_field(a, m, K.col(c));
    for (auto& x : xi) x *= cplx(0.0, 1.0);  // J
    basis.push_back(std::move(xi));
  }
  Eigen::MatrixXd G(n, n);
  Eigen::VectorXd rhs(n);
  for (int r = 0; r < n; ++r) {
    rhs(r) = hermitian(basis[r], v).real();
    for (int c = 0; c < n; ++c) G(r, c) = hermitian(basis[r], basis[c]).real();
  }
  const Eigen::VectorXd coef = G.completeOrthogonalDecomposition().solve(rhs);
  for (int c = 0; c < n; ++c)
    for (std::size_t i = 0; i < v.size(); ++i) out[i] += coef(c) * basis[c][i];
  return out;
}

double normal_defect(const WeightedAction& a, const ProjectivePoint& m, const CVec& v) {
  const double n = std::sqrt(norm_sq(v));
  if (n == 0.0) return 0.0;
  const CVec pr = normal_projection(a, m, v);
  CVec diff(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) diff[i] = v[i] - pr[i];
  return std::sqrt(norm_sq(diff)) / n;
}

}  // namespace tzlab
