#include "cpi/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "cpi/errors.hpp"

namespace cpi {

void SensorSpec::validate() const {
  if (!(pixel > 0.0) || !std::isfinite(pixel)) throw ValidationError("sensor pixel must be positive");
  if (count_a < 1 || count_b < 1) throw ValidationError("sensor pixel counts must be at least 1");
}

double effective_lens_diameter(const PumpProfile& pump, double z_a, double z_b) {
  if (!(z_b > 0.0)) throw ValidationError("z_b must be positive");
  return pump.effective_diameter() * (1.0 + z_a / z_b);
}

double dof_ratio_cpi(const SensorSpec& sensor, double d_s) {
  if (!(d_s > 0.0)) throw ValidationError("lens diameter must be positive");
  return sensor.pixel / d_s * sensor.count_b;
}

double dof_ratio_standard(double pixel, int n_u, double d_s) {
  if (!(pixel > 0.0) || n_u < 1 || !(d_s > 0.0)) throw ValidationError("standard plenoptic inputs must be positive");
  return pixel / d_s * (static_cast<double>(n_u) * n_u);
}

int required_nu_standard(double target_ratio, double pixel, double d_s) {
  if (!(target_ratio > 0.0)) throw ValidationError("target ratio must be positive");
  // Relative slack keeps exact squares (N_b = N_u^2) from rounding up.
  const double goal = target_ratio * (1.0 - 1e-12);
  int n = std::max(1, static_cast<int>(std::ceil(std::sqrt(target_ratio * d_s / pixel))));
  while (n > 1 && dof_ratio_standard(pixel, n - 1, d_s) >= goal) --n;
  while (dof_ratio_standard(pixel, n, d_s) < goal) ++n;
  return n;
}

bool refocusable(double alpha, double dx, double du) {
  if (alpha == 0.0) throw AlphaZero("misfocus ratio alpha is zero");
  if (!(du > 0.0)) throw ValidationError("angular resolution du must be positive");
  return std::abs(1.0 - 1.0 / alpha) < dx / du;
}

double spot_object(double m, double z_bF, double lambda, double pump_diameter) {
  return m * (lambda / (2.0 * kPi)) * z_bF / pump_diameter;
}

double spot_source(double M, double z_b, double lambda, double feature) {
  return M * (lambda / (2.0 * kPi)) * z_b / feature;
}

DofReport compare_report(const OpticalSetup& setup, const PumpProfile& pump, const SensorSpec& sensor,
                         double object_feature) {
  setup.validate();
  sensor.validate();
  if (!(object_feature > 0.0)) throw ValidationError("object feature size must be positive");
  DofReport r;
  const DerivedGeometry g = derive(setup);
  r.source_diameter = pump.effective_diameter();
  r.effective_lens_diameter = effective_lens_diameter(pump, setup.z_a, setup.z_b);
  r.ratio_cpi = dof_ratio_cpi(sensor, r.effective_lens_diameter);
  r.n_u_required = required_nu_standard(r.ratio_cpi, sensor.pixel, r.effective_lens_diameter);
  r.ratio_std = dof_ratio_standard(sensor.pixel, r.n_u_required, r.effective_lens_diameter);
  r.resolution_loss_factor = r.n_u_required;
  r.dx_std_single = sensor.pixel * r.n_u_required;
  r.dx_std_double = 2.0 * sensor.pixel * r.n_u_required;
  r.dx_cpi = 2.0 * sensor.pixel;
  r.du_cpi = 2.0 * r.effective_lens_diameter / sensor.count_b;
  r.spot_object = spot_object(g.m, g.z_bF, setup.lambda, r.source_diameter);
  r.spot_object_lens = spot_object(g.m, g.z_bF, setup.lambda, r.effective_lens_diameter);
  r.spot_source = spot_source(g.M_src, setup.z_b, setup.lambda, object_feature);
  r.alpha = g.alpha;
  r.alpha_discriminant = std::abs(1.0 - 1.0 / g.alpha);
  r.feature_image_size = g.m * object_feature;
  r.refocusable_pixel = refocusable(g.alpha, r.dx_cpi, r.du_cpi);
  r.refocusable_feature = refocusable(g.alpha, r.feature_image_size, r.du_cpi);
  return r;
}

std::string format_report(const DofReport& r) {
  std::string out;
  char line[160];
  auto row = [&](const char* name, double v, const char* unit) {
    std::snprintf(line, sizeof line, "%-44s %12.6g %s\n", name, v, unit);
    out += line;
  };
  auto flag = [&](const char* name, bool v) {
    std::snprintf(line, sizeof line, "%-44s %12s\n", name, v ? "yes" : "no");
    out += line;
  };
  row("pump diameter D'_s (2*sqrt(2)*sigma)", r.source_diameter, "mm");
  row("effective lens diameter D_s", r.effective_lens_diameter, "mm");
  row("CPI depth-of-field ratio dx/du", r.ratio_cpi, "");
  row("standard plenoptic ratio at N_u", r.ratio_std, "");
  row("N_u required for equal depth of field", r.n_u_required, "");
  row("resolution loss factor", r.resolution_loss_factor, "");
  row("dx standard (delta*N_u)", r.dx_std_single, "mm");
  row("dx standard (2*delta*N_u)", r.dx_std_double, "mm");
  row("dx CPI (2*delta)", r.dx_cpi, "mm");
  row("du CPI (2*D_s/N_b)", r.du_cpi, "mm");
  row("object-side spot (pump diameter D'_s)", r.spot_object * 1e3, "um");
  row("object-side spot (lens diameter D_s)", r.spot_object_lens * 1e3, "um");
  row("source-image spot", r.spot_source * 1e3, "um");
  row("misfocus alpha", r.alpha, "");
  row("|1 - 1/alpha|", r.alpha_discriminant, "");
  flag("refocusable at pixel scale (dx = 2*delta)", r.refocusable_pixel);
  row("feature size on sensor (m*d)", r.feature_image_size, "mm");
  flag("refocusable at feature scale (dx = m*d)", r.refocusable_feature);
  return out;
}

}  // namespace cpi
