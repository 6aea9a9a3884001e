#pragma once

// Setup parameters of the two-arm correlation plenoptic camera and the scalar
// geometry derived from them. All lengths are in millimeters.
//
// Arm a: source -> (z_a) -> lens L_a (focal f) -> (z_a_img) -> sensor S_a.
// Arm b: source -> (z_b) -> object -> (z_b_obj_lens) -> lens L_b (focal F_b)
//        -> (z_b_lens_sens) -> sensor S_b, with L_b imaging the source on S_b.

namespace cpi {

struct OpticalSetup {
  double z_a = 0.0;
  double z_a_img = 0.0;
  double f = 0.0;
  double z_b = 0.0;
  double z_b_obj_lens = 0.0;
  double z_b_lens_sens = 0.0;
  double F_b = 0.0;
  double lambda = 0.0;  // mm
  double sigma = 0.0;   // pump width, mm

  // Throws ValidationError when a length is not positive or when L_b does not
  // image the source plane onto S_b (relative tolerance 1e-9).
  void validate() const;

  double wavenumber() const;

  // Same bench with the object moved to `z_b`; L_b stays where it is, so the
  // source-imaging condition and M are unchanged.
  OpticalSetup with_object_distance(double z_b) const;

  // Focal length of L_b that images the source on S_b for the given distances.
  static double source_imaging_focal(double z_b, double z_b_obj_lens, double z_b_lens_sens);

  friend bool operator==(const OpticalSetup&, const OpticalSetup&) = default;
};

struct DerivedGeometry {
  double zeta = 0.0;
  double z_bF = 0.0;
  double m = 0.0;
  double M_src = 0.0;
  double alpha = 0.0;
};

// (1/z_a + 1/z_a_img - 1/f)^-1. Returns +infinity when the bracket vanishes
// (collimated two-photon imaging).
double zeta(double z_a, double z_a_img, double f);

// Object distance z_bF with 1/(z_a + z_bF) + 1/z_a_img = 1/f. NoFocusError when
// the plane would sit at infinity or behind the source.
double solve_ghost_focus(double z_a, double z_a_img, double f);

inline double ghost_magnification(double z_a, double z_a_img, double z_bF) {
  return z_a_img / (z_a + z_bF);
}

double source_magnification(const OpticalSetup& setup);

// Ratio of the plane where the ghost image of the actual object focuses to
// the actual sensor distance z_a_img.
double misfocus_alpha(const OpticalSetup& setup);

// Object distance whose ghost image focuses at alpha * z_a_img.
double object_distance_for_alpha(const OpticalSetup& setup, double alpha);

DerivedGeometry derive(const OpticalSetup& setup);

bool is_at_focus(const OpticalSetup& setup, double rel_tol = 1e-9);

}  // namespace cpi
