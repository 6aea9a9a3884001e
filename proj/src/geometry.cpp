#include "cpi/geometry.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "cpi/errors.hpp"
#include "cpi/vec.hpp"

namespace cpi {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw ValidationError(std::string(name) + " must be a positive finite length");
}

}  // namespace

void OpticalSetup::validate() const {
  require_positive(z_a, "z_a");
  require_positive(z_a_img, "z_a_img");
  require_positive(f, "f");
  require_positive(z_b, "z_b");
  require_positive(z_b_obj_lens, "z_b_obj_lens");
  require_positive(z_b_lens_sens, "z_b_lens_sens");
  require_positive(F_b, "F_b");
  require_positive(lambda, "lambda");
  require_positive(sigma, "sigma");

  const double lhs = 1.0 / (z_b + z_b_obj_lens) + 1.0 / z_b_lens_sens;
  const double rhs = 1.0 / F_b;
  if (std::abs(lhs - rhs) > 1e-9 * rhs)
    throw ValidationError("source-imaging condition violated: 1/(z_b + z_b') + 1/z_b'' != 1/F_b");
}

double OpticalSetup::wavenumber() const { return 2.0 * kPi / lambda; }

OpticalSetup OpticalSetup::with_object_distance(double new_z_b) const {
  OpticalSetup out = *this;
  const double lens_position = z_b + z_b_obj_lens;
  if (!(new_z_b > 0.0) || !(new_z_b < lens_position))
    throw ValidationError("object distance must lie between the source and lens L_b");
  out.z_b = new_z_b;
  out.z_b_obj_lens = lens_position - new_z_b;
  return out;
}

double OpticalSetup::source_imaging_focal(double z_b, double z_b_obj_lens, double z_b_lens_sens) {
  return 1.0 / (1.0 / (z_b + z_b_obj_lens) + 1.0 / z_b_lens_sens);
}

double zeta(double z_a, double z_a_img, double f) {
  const double inv_za = 1.0 / z_a;
  const double inv_img = 1.0 / z_a_img;
  const double inv_f = 1.0 / f;
  const double bracket = inv_za + inv_img - inv_f;
  const double scale = inv_za + inv_img + inv_f;
  if (std::abs(bracket) <= 4.0 * std::numeric_limits<double>::epsilon() * scale)
    return std::numeric_limits<double>::infinity();
  return 1.0 / bracket;
}

double solve_ghost_focus(double z_a, double z_a_img, double f) {
  const double inv = 1.0 / f - 1.0 / z_a_img;
  if (!(inv > 0.0))
    throw NoFocusError("sensor S_a at or inside the focal plane: ghost focus at infinity");
  const double z_bF = 1.0 / inv - z_a;
  if (!(z_bF > 0.0) || !std::isfinite(z_bF))
    throw NoFocusError("ghost focus plane lies behind the source");
  return z_bF;
}

double source_magnification(const OpticalSetup& setup) {
  return setup.z_b_lens_sens / (setup.z_b + setup.z_b_obj_lens);
}

double misfocus_alpha(const OpticalSetup& setup) {
  const double inv = 1.0 / setup.f - 1.0 / (setup.z_a + setup.z_b);
  if (!(inv > 0.0)) throw NoFocusError("ghost image of the object does not focus at a finite plane");
  const double z_img_true = 1.0 / inv;
  return z_img_true / setup.z_a_img;
}

double object_distance_for_alpha(const OpticalSetup& setup, double alpha) {
  if (!(alpha > 0.0)) throw ValidationError("alpha must be positive");
  const double z_img = alpha * setup.z_a_img;
  return solve_ghost_focus(setup.z_a, z_img, setup.f);
}

DerivedGeometry derive(const OpticalSetup& setup) {
  DerivedGeometry g;
  g.zeta = zeta(setup.z_a, setup.z_a_img, setup.f);
  g.z_bF = solve_ghost_focus(setup.z_a, setup.z_a_img, setup.f);
  g.m = ghost_magnification(setup.z_a, setup.z_a_img, g.z_bF);
  g.M_src = source_magnification(setup);
  g.alpha = misfocus_alpha(setup);
  return g;
}

bool is_at_focus(const OpticalSetup& setup, double rel_tol) {
  const double z_bF = solve_ghost_focus(setup.z_a, setup.z_a_img, setup.f);
  return std::abs(setup.z_b - z_bF) <= rel_tol * z_bF;
}

}  // namespace cpi
