#pragma once

#include <map>
#include <string>

namespace tzlab {

/// Every pass/fail threshold used by verdicts. `strict` tightens the
/// statistical and asymptotic ones; exact-arithmetic ones are already tight.
struct Tolerances {
  double exact_relative = 1e-12;       // log-space closed-form checks
  double exact_fit_coefficient = 1e-9; // fitted B_1 against an exact value
  double ratio_closed_form = 1e-10;    // ratio against a closed-form 1 + c/k
  double leading_ratio = 5e-3;         // torus leading term at the largest k
  double residual_order_min = 0.9;
  double form_agreement = 1e-9;
  double identity_residual = 1e-10;
  double mc_sigma = 3.0;
  double tube_relative = 0.05;
  double slope_abs = 1e-3;
  double decay_relative = 0.01;
  double no_decay = 1e-6;
  double profile_relative = 0.05;
  double offdiag_relative = 0.10;
  double stability_rel_floor = 1e-3;   // B_l agreement floor across sub-grids
  double on_ray_angle = 1e-8;

  static Tolerances profile(const std::string& name);
  std::map<std::string, double> as_map() const;
  /// Overrides fields by name; unknown names throw InputError.
  void set(const std::string& name, double value);
};

}  // namespace tzlab
