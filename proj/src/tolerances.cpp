#include "tzlab/tolerances.hpp"

#include "tzlab/errors.hpp"

namespace tzlab {

namespace {

template <class F>
void for_each_field(Tolerances& t, F&& f) {
  f("exact_relative", t.exact_relative);
  f("exact_fit_coefficient", t.exact_fit_coefficient);
  f("ratio_closed_form", t.ratio_closed_form);
  f("leading_ratio", t.leading_ratio);
  f("residual_order_min", t.residual_order_min);
  f("form_agreement", t.form_agreement);
  f("identity_residual", t.identity_residual);
  f("mc_sigma", t.mc_sigma);
  f("tube_relative", t.tube_relative);
  f("slope_abs", t.slope_abs);
  f("decay_relative", t.decay_relative);
  f("no_decay", t.no_decay);
  f("profile_relative", t.profile_relative);
  f("offdiag_relative", t.offdiag_relative);
  f("stability_rel_floor", t.stability_rel_floor);
  f("on_ray_angle", t.on_ray_angle);
}

}  // namespace

Tolerances Tolerances::profile(const std::string& name) {
  Tolerances t;
  if (name == "default") return t;
  if (name == "strict") {
    t.leading_ratio = 2.5e-3;
    t.tube_relative = 0.03;
    t.decay_relative = 5e-3;
    t.profile_relative = 0.03;
    t.offdiag_relative = 0.05;
    t.stability_rel_floor = 1e-4;
    return t;
  }
  throw InputError("unknown tolerance profile '" + name + "' (expected strict or default)");
}

std::map<std::string, double> Tolerances::as_map() const {
  std::map<std::string, double> out;
  Tolerances copy = *this;
  for_each_field(copy, [&](const char* n, double& v) { out[n] = v; });
  return out;
}

void Tolerances::set(const std::string& name, double value) {
  bool found = false;
  for_each_field(*this, [&](const char* n, double& v) {
    if (name == n) {
      v = value;
      found = true;
    }
  });
  if (!found) throw InputError("unknown tolerance '" + name + "'");
}

}  // namespace tzlab
