#pragma once

#include <string>

#include "cpi/geometry.hpp"
#include "cpi/scene.hpp"

namespace cpi {

struct SensorSpec {
  double pixel = 0.0;  // mm
  int count_a = 0;
  int count_b = 0;

  void validate() const;
  int total() const { return count_a + count_b; }
  double width_a() const { return pixel * count_a; }
  double width_b() const { return pixel * count_b; }
};

struct DofReport {
  double source_diameter = 0.0;          // D'_s
  double effective_lens_diameter = 0.0;  // D_s
  double ratio_cpi = 0.0;
  double ratio_std = 0.0;
  int n_u_required = 0;
  double resolution_loss_factor = 0.0;
  // Standard plenoptic resolution under the two readings of its pixel
  // budget: delta * N_u and 2 * delta * N_u.
  double dx_std_single = 0.0;
  double dx_std_double = 0.0;
  double dx_cpi = 0.0;  // 2 * delta
  double du_cpi = 0.0;  // 2 * D_s / N_b
  double spot_object = 0.0;
  // Same estimate with D_s in place of D'_s.
  double spot_object_lens = 0.0;
  double spot_source = 0.0;
  double alpha = 0.0;
  double alpha_discriminant = 0.0;  // |1 - 1/alpha|
  bool refocusable_pixel = false;
  bool refocusable_feature = false;
  double feature_image_size = 0.0;  // m * feature
};

double effective_lens_diameter(const PumpProfile& pump, double z_a, double z_b);
double dof_ratio_cpi(const SensorSpec& sensor, double d_s);
double dof_ratio_standard(double pixel, int n_u, double d_s);
int required_nu_standard(double target_ratio, double pixel, double d_s);
// |1 - 1/alpha| < dx / du.
bool refocusable(double alpha, double dx, double du);
double spot_object(double m, double z_bF, double lambda, double pump_diameter);
double spot_source(double M, double z_b, double lambda, double feature);

DofReport compare_report(const OpticalSetup& setup, const PumpProfile& pump, const SensorSpec& sensor,
                         double object_feature);
std::string format_report(const DofReport& report);

}  // namespace cpi
