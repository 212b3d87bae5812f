#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tzlab/asymptotic_predictions.hpp"
#include "tzlab/exact_kernels.hpp"
#include "tzlab/fubini_geometry.hpp"
#include "tzlab/log_real.hpp"
#include "tzlab/torus_weights.hpp"

namespace tzlab {

/// Geometric-ish default grid {250, 500, 1000, 2000, 4000}.
std::vector<std::int64_t> default_k_grid();

struct SweepPlan {
  WeightedAction action;
  IntVec varpi;
  ProjectivePoint point;
  std::vector<std::int64_t> k_grid;
  int jobs = 0;
};

struct RatioRow {
  std::int64_t k = 0;
  LogReal exact;
  LogReal predicted;
  double ratio = 0.0;       // exp(log exact - log predicted)
  long double log_ratio = 0.0L;
};

struct RatioSeries {
  std::vector<RatioRow> rows;
  std::vector<std::int64_t> skipped;  // k with vanishing character factor
};

/// Admissible k: those with nonzero character factor at the plan's point.
std::vector<std::int64_t> admissible_k(const SweepPlan& plan, std::vector<std::int64_t>* skipped = nullptr);

/// Exact diagonal over the predicted leading term; g = 1 with varpi = (1)
/// uses the circle formula, everything else the torus formula.
RatioSeries ratio_sweep(const SweepPlan& plan);

/// Evaluates the exact diagonal at up to `count` skipped k; true iff all are zero.
bool verify_skipped_vanish(const SweepPlan& plan, const std::vector<std::int64_t>& skipped, std::size_t count = 10);

enum class FitModel { InversePowers, HalfPowers };

struct FitResult {
  FitModel model = FitModel::InversePowers;
  double leading_ratio_limit = 1.0;  // constant of a free-constant refit
  std::vector<double> coefficients;  // B_1..B_L
  std::vector<double> stderrs;
  double residual_order_estimate = 0.0;
  double residual_rms = 0.0;
  bool stable = false;
  std::vector<double> lower_half;  // B_l from the lower half of the grid
  std::vector<double> upper_half;
  std::vector<double> lower_stderr;
  std::vector<double> upper_stderr;
};

/// Least squares of ratio(k) - 1 = sum_{l<=L} B_l k^{-l} (or k^{-l/2}).
/// `stability_floor` is the relative slack allowed on top of 3 combined
/// standard errors when comparing B_1 between the two halves of the grid.
FitResult fit_expansion(const std::vector<RatioRow>& series, int L, FitModel model = FitModel::InversePowers,
                        double stability_floor = 1e-3);

/// -slope of log|ratio - 1| against log k.
double residual_order(const std::vector<RatioRow>& series);

struct ProfileRow {
  std::int64_t k = 0;
  double value = 0.0;   // measured ratio
  double target = 0.0;  // predicted limit
};

/// diag(x_k) / diag(x) with x_k = (z + v/sqrt k) / |z + v/sqrt k|.
std::vector<ProfileRow> scaling_sweep(const WeightedAction& a, const ProjectivePoint& m, const IntVec& varpi,
                                      const TangentVector& v, const std::vector<std::int64_t>& k_grid, int jobs = 0);

/// |Pi(x + v1/sqrt k, x + v2/sqrt k)| normalized by diag(x) (trivial
/// stabilizer) or by the character-free leading term (otherwise), against the
/// stabilizer sum of exp(E) (g = 1) or exp(H_m) (g >= 2).
std::vector<ProfileRow> offdiag_modulus_sweep(const WeightedAction& a, const ProjectivePoint& m,
                                              const IntVec& varpi, const TangentVector& v1, const TangentVector& v2,
                                              const std::vector<std::int64_t>& k_grid, int jobs = 0);

/// Predicted modulus |sum_{t in T_m} chi(t)^k exp(Q(d mu_{t^-1} v1, v2))| for the
/// off-diagonal sweep (divided by |T_m| when normalizing by the diagonal).
double offdiag_target(const WeightedAction& a, const ProjectivePoint& m, const IntVec& varpi, const TangentVector& v1,
                      const TangentVector& v2, std::int64_t k);

struct LocalizationRow {
  ProjectivePoint point;
  double s = 0.0;
  DecayFit fit;
};

std::vector<LocalizationRow> localization_sweep(const WeightedAction& a, const IntVec& varpi,
                                                const std::vector<std::pair<double, ProjectivePoint>>& path,
                                                const std::vector<std::int64_t>& k_grid, int jobs = 0,
                                                double no_decay_threshold = 1e-6);

struct QuadratureResult {
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
  std::string method;  // sphere_mc, simplex_pushforward, tube_mc, exact
  std::size_t hits = 0;  // tube_mc: samples inside the outer tube
};

using SimplexFunction = std::function<double(const std::vector<double>&)>;

/// Uniform-simplex (Dirichlet(1,...,1)) Monte Carlo of f(p).
QuadratureResult simplex_pushforward_integral(const SimplexFunction& f, int d, std::size_t samples,
                                              std::uint64_t seed, int jobs = 0);
/// Sphere Monte Carlo of f(|z_0|^2, ..., |z_d|^2).
QuadratureResult sphere_integral(const SimplexFunction& f, int d, std::size_t samples, std::uint64_t seed,
                                 int jobs = 0);

/// |a - b| / sqrt(sa^2 + sb^2)
double sigma_distance(const QuadratureResult& a, const QuadratureResult& b);

using GeometryFunction = std::function<double(const GeometryReport&)>;

/// Integral of F over M_varpi against the induced volume, from the tube of
/// normal radius epsilon (total volume of P^d is pi^d / d!). Two-epsilon
/// Richardson (4 I(eps/2) - I(eps)) / 3 on shared samples.
QuadratureResult tube_integral_over_Mvarpi(const WeightedAction& a, const IntVec& varpi, const GeometryFunction& F,
                                           double epsilon, std::size_t samples, std::uint64_t seed, int jobs = 0);

/// Normal distance from m to M_varpi, first order: (1/2) sqrt(phi^T D^{-1} phi)
/// with phi the ker-Phi coordinates of the component of Phi orthogonal to varpi.
/// Infinite on the opposite ray or where D is singular.
double tube_distance(const GeometryReport& r, const IntVec& varpi);

struct SlopeFit {
  double slope = 0.0;
  double stderr_ = 0.0;
};

/// log y = a + s log k + c/k + e/k^2; returns s.
SlopeFit growth_exponent_fit(const std::vector<std::pair<std::int64_t, double>>& series);

}  // namespace tzlab

namespace tzlab {

/// Orthogonal projection of p onto the affine plane {sum p = 1, W p parallel
/// to varpi}; nullopt if the result leaves the simplex or points away from varpi.
std::optional<std::vector<double>> project_to_ray(const WeightedAction& a, const IntVec& varpi,
                                                  const std::vector<double>& p);

/// Canonical point of M_varpi: projection of the barycenter, falling back to
/// projected random simplex points (seeded) when that leaves the simplex.
ProjectivePoint canonical_on_ray_point(const WeightedAction& a, const IntVec& varpi);

/// n points of M_varpi from projected uniform simplex samples.
std::vector<ProjectivePoint> sample_on_ray_points(const WeightedAction& a, const IntVec& varpi, std::size_t n,
                                                  std::uint64_t seed, bool require_locally_free = false);

}  // namespace tzlab
