#pragma once

#include <vector>

#include "cpi/correlation.hpp"
#include "cpi/evaluator.hpp"
#include "cpi/image.hpp"

namespace cpi {

// Coordinate substitution that undoes out-of-focus parallax:
// rho_a -> scale * rho_a + shift_coeff * rho_b.
struct RefocusMap {
  double scale = 1.0;
  double shift_coeff = 0.0;

  // Uses the solved two-photon focus of the setup. Within 1e-9 (relative) of
  // focus the map is exactly the identity.
  static RefocusMap for_setup(const OpticalSetup& setup);
  bool is_identity() const { return scale == 1.0 && shift_coeff == 0.0; }
};

Vec2 refocus_remap(Vec2 rho_a, Vec2 rho_b, const RefocusMap& map);

// Sum over the rho_b grid of Gamma at remapped rho_a, times pitch_b^dim.
Image refocused_image(const ApertureMask& mask, const PumpProfile& pump, const OpticalSetup& setup,
                      const SampledGrid& grid_a, const SampledGrid& grid_b, EvalPath path,
                      const QuadratureSpec& quad = {});
// Same sum without the remap (bucket-like integration of the misfocused map).
Image unrefocused_image(const ApertureMask& mask, const PumpProfile& pump, const OpticalSetup& setup,
                        const SampledGrid& grid_a, const SampledGrid& grid_b, EvalPath path,
                        const QuadratureSpec& quad = {});
// Integration with an explicit map; the two functions above call this.
Image integrate_correlation(const ApertureMask& mask, const PumpProfile& pump, const OpticalSetup& setup,
                            const SampledGrid& grid_a, const SampledGrid& grid_b, const RefocusMap& map,
                            EvalPath path, const QuadratureSpec& quad = {});

// Gamma(., rho_b) for one fixed point of the angular sensor.
Image viewpoint_image(const ApertureMask& mask, const PumpProfile& pump, const OpticalSetup& setup,
                      const SampledGrid& grid_a, Vec2 rho_b, EvalPath path, const QuadratureSpec& quad = {});

// Refocusing of an archived one-dimensional map: Gamma is linearly
// interpolated along rho_a (rho_b samples are exact); reads outside the
// rho_a range are zero.
Image refocus_tabulated(const CorrelationMap& map, const RefocusMap& remap);

Image normalize(const Image& image, Normalization mode);

// |A(-rho_a / m)|^2 sampled on the rho_a grid.
Image geometric_truth(const ApertureMask& mask, const OpticalSetup& setup, const SampledGrid& grid_a);

// Zero-mean, unit-variance correlation of two peak-normalized images on the
// same grid; 1 for identical shapes.
double cross_correlation(const Image& a, const Image& b);

// One-dimensional profile helpers.
double peak_position(const Image& image);
// Width between the outermost half-maximum crossings, linearly interpolated.
double fwhm(const Image& image);
// Value-weighted centroids of the contiguous runs above fraction * max.
std::vector<double> lobe_centroids(const Image& image, double fraction = 0.5);

}  // namespace cpi
