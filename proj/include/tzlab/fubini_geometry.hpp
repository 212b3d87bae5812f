#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "tzlab/torus_weights.hpp"

namespace tzlab {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

inline constexpr double kDefaultSupportTol = 1e-12;

/// Point of S^{2d+1} (unit representative of m in P^d).
struct ProjectivePoint {
  CVec z;
  std::vector<double> p;      // |z_i|^2
  std::vector<int> support;   // i with |z_i| > support_tol

  int dim() const { return static_cast<int>(z.size()) - 1; }

  /// Normalizes z; throws InputError for a zero or non-finite vector.
  static ProjectivePoint from_coords(const CVec& z, double support_tol = kDefaultSupportTol);
  /// Real nonnegative representative z_i = sqrt(p_i / sum p).
  static ProjectivePoint from_simplex(const std::vector<double>& p, double support_tol = kDefaultSupportTol);
};

/// Horizontal tangent vector: <z, v> = 0.
struct TangentVector {
  ProjectivePoint base;
  CVec v;

  /// Validates horizontality to 1e-12 (relative to |v|).
  static TangentVector make(const ProjectivePoint& base, const CVec& v);
  /// Drops the component along z.
  static TangentVector project(const ProjectivePoint& base, const CVec& v);
};

/// <u, v> = sum conj(u_i) v_i
cplx hermitian(const CVec& u, const CVec& v);
double norm_sq(const CVec& v);
/// omega(u, v) = Im <u, v>
double omega(const CVec& u, const CVec& v);

Eigen::VectorXd moment_map(const WeightedAction& a, const ProjectivePoint& m);
Eigen::VectorXd moment_map_simplex(const WeightedAction& a, const std::vector<double>& p);

/// Moment map of the G(2,4) preset evaluated on Pluecker coordinates
/// (p01, p02, p03, p12, p13, p23).
double grassmann_preset_eval(const std::vector<cplx>& pl, double klein_tol = 1e-10);

/// C_jk = Cov_p(w_j, w_k).
Eigen::MatrixXd gram_C(const WeightedAction& a, const ProjectivePoint& m);
Eigen::MatrixXd gram_C_simplex(const WeightedAction& a, const std::vector<double>& p);

/// Orthonormal basis of {xi : Phi.xi = 0} as columns (g x (g-1)).
Eigen::MatrixXd ker_phi_basis(const Eigen::VectorXd& Phi);

/// xi_M(m) for eta in Lie(T^g): i((eta.w_i) - eta.Phi) z_i.
CVec action_field(const WeightedAction& a, const ProjectivePoint& m, const Eigen::VectorXd& eta);

struct GeometryReport {
  Eigen::VectorXd Phi;
  Eigen::MatrixXd C;
  Eigen::MatrixXd kerBasis;
  Eigen::MatrixXd D;
  std::optional<double> scriptD;
  std::optional<double> Veff;
  std::optional<double> phi_dual_norm_sq;  // Phi^T C^{-1} Phi on the locally free locus
  double lambda = 0.0;
  bool transversal = false;
  int rank_val = 0;
  bool locally_free = false;
  std::int64_t stabilizer_order = 0;       // 0 if positive dimensional
};

GeometryReport geometry_report(const WeightedAction& a, const ProjectivePoint& m, const IntVec& varpi);
/// Torus-invariant part only (everything except the stabilizer and V_eff).
GeometryReport geometry_report_simplex(const WeightedAction& a, const std::vector<double>& p, const IntVec& varpi);

/// Numerical rank of a symmetric PSD matrix.
int psd_rank(const Eigen::MatrixXd& S, double rel_tol = 1e-10);

/// |LHS - RHS| / max(|LHS|, |RHS|) for Phi^T C^{-1} Phi det C = |Phi|^2 det D.
double gm_det_identity_residual(const WeightedAction& a, const ProjectivePoint& m, const IntVec& varpi);
/// Same identity in bordered form, -det[[0, Phi^T], [Phi, C]] = |Phi|^2 det D,
/// which stays meaningful when C is singular.
double bordered_det_identity_residual(const WeightedAction& a, const ProjectivePoint& m, const IntVec& varpi);
/// g = 1: |Phi| = (2 pi)^{-1} V_eff |T_m| |Phi|_m.
double circle_normalization_residual(const WeightedAction& a, const ProjectivePoint& m);

struct ScalingInvariants {
  std::optional<cplx> E;  // circle case only
  cplx H;
};

/// H_m(v1, v2) = lambda [-i omega(v1, v2) - (|v1|^2 + |v2|^2)], plus E when
/// g = 1 and angular components are supplied.
ScalingInvariants scaling_invariants(const WeightedAction& a, const ProjectivePoint& m, const IntVec& varpi,
                                     const TangentVector& v1, const TangentVector& v2,
                                     std::optional<std::pair<double, double>> thetas = std::nullopt);

/// Orthogonal projection of v onto N_m = J val_m(ker Phi(m)).
CVec normal_projection(const WeightedAction& a, const ProjectivePoint& m, const CVec& v);
/// |v - proj_N v| / |v| (0 for v = 0).
double normal_defect(const WeightedAction& a, const ProjectivePoint& m, const CVec& v);

/// Angle between Phi(m) and varpi in radians.
double ray_angle(const Eigen::VectorXd& Phi, const IntVec& varpi);

}  // namespace tzlab
