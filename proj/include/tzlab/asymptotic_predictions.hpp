#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tzlab/fubini_geometry.hpp"
#include "tzlab/log_real.hpp"
#include "tzlab/torus_weights.hpp"

namespace tzlab {

enum class TorusForm { ScriptD, Veff };

/// Leading term prefactor * k^power * charsum(k).
struct LeadingTerm {
  LogReal prefactor;           // everything except k^power and the character factor
  long double power_of_k = 0;  // d, d + (1-g)/2 or d + 1 - g
  std::function<std::int64_t(std::int64_t)> character_factor;
  std::string description;

  LogReal at(std::int64_t k) const;
};

/// (k/pi)^d Phi(m)^{-(d+1)} sum_{T_m} g^k.
LogReal predicted_leading_circle(const WeightedAction& a, const ProjectivePoint& m, std::int64_t k);
LeadingTerm leading_term_circle(const WeightedAction& a, const ProjectivePoint& m);

inline constexpr double kOnRayTolerance = 1e-8;

/// Torus leading term at m in M_varpi, in either of its two forms. For g = 1
/// this is the circle formula with |varpi| in place of 1.
LogReal predicted_leading_torus(const WeightedAction& a, const ProjectivePoint& m, const IntVec& varpi,
                                std::int64_t k, TorusForm form = TorusForm::ScriptD);
LeadingTerm leading_term_torus(const WeightedAction& a, const ProjectivePoint& m, const IntVec& varpi,
                               TorusForm form = TorusForm::ScriptD);
/// Same without the character factor (used to normalize off-diagonal sums).
LogReal predicted_leading_torus_no_character(const WeightedAction& a, const ProjectivePoint& m,
                                             const IntVec& varpi, std::int64_t k);

/// ell * int_simplex |w.p|^{-(d+1)} dp = ell / prod |w_i|; the limit of
/// d! k^{-d} dim H_k over k divisible by ell.
double predicted_dim_circle(const WeightedAction& a);

struct DimTorusPrediction {
  std::int64_t exponent_num = 0;  // d + 1 - g
  /// Integrand |Phi|^{-(d+2-g)} / scriptD over M_varpi.
  std::function<double(const GeometryReport&)> integrand;
  /// dim ~ prefactor(k) * integral; prefactor = (|varpi| k / pi)^{d+1-g} (2 pi)^{-(g-1)}.
  double constant_from_integral(double integral) const;
  double varpi_norm = 0.0;
  int g = 1;
};

DimTorusPrediction predicted_dim_torus_exponent(const WeightedAction& a, const IntVec& varpi);

struct GaussianProfile {
  double value = 1.0;      // exp(-2 lambda |v|^2)
  double normal_defect = 0.0;
  bool not_normal = false;  // warning flag
};

GaussianProfile gaussian_profile(const WeightedAction& a, const ProjectivePoint& m, const IntVec& varpi,
                                 const TangentVector& v, double normal_tol = 1e-8);

struct DecayFit {
  double gamma = 0.0;
  double r2 = 0.0;
  bool degenerate = false;  // all values zero
  bool decays = false;      // gamma > 0 and r2 >= 0.99
  bool no_decay = false;    // |gamma| below the no-decay threshold
  std::size_t points = 0;
};

/// Fits log(value (pi/k)^d) = a + b log k + c/k + e/k^2 - gamma k by least
/// squares and reports gamma with the coefficient of determination.
DecayFit decay_envelope_fit(const std::vector<std::pair<std::int64_t, LogReal>>& series, int d,
                            double no_decay_threshold = 1e-6);

}  // namespace tzlab
