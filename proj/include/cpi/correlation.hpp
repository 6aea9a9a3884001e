#pragma once

#include <iosfwd>
#include <vector>

#include "cpi/evaluator.hpp"
#include "cpi/geometry.hpp"
#include "cpi/grid.hpp"
#include "cpi/image.hpp"
#include "cpi/scene.hpp"

namespace cpi {

enum class Provenance { oracle_quadrature, gaussian_fast, geometric };

struct TwoPhotonAmplitude {
  Complex value{};
  Provenance provenance = Provenance::gaussian_fast;
};

// Gamma(rho_a, rho_b) on a grid pair; values[i_a * grid_b.size() + j_b].
struct CorrelationMap {
  SampledGrid grid_a;
  SampledGrid grid_b;
  std::vector<double> values;
  OpticalSetup setup_snapshot;

  double at(std::size_t ia, std::size_t jb) const { return values[ia * grid_b.size() + jb]; }
};

// Bracket of the correlation phase, in units where the full phase is k * phi.
double phase_phi(Vec2 rho_o, Vec2 rho_s, Vec2 rho_a, Vec2 rho_b, const PhaseSpec& spec, double M);

TwoPhotonAmplitude amplitude_oracle(Vec2 rho_a, Vec2 rho_b, const ApertureMask& mask, const PumpProfile& pump,
                                    const OpticalSetup& setup, const QuadratureSpec& quad = {});
TwoPhotonAmplitude amplitude_gaussian_fast(Vec2 rho_a, Vec2 rho_b, const ApertureMask& mask, const PumpProfile& pump,
                                           const OpticalSetup& setup, const QuadratureSpec& quad = {});

// Bounds covering every pair of two grids.
EvalBounds grid_bounds(const SampledGrid& grid_a, const SampledGrid& grid_b);

CorrelationMap gamma_map(const ApertureMask& mask, const PumpProfile& pump, const OpticalSetup& setup,
                         const SampledGrid& grid_a, const SampledGrid& grid_b, EvalPath path,
                         const QuadratureSpec& quad = {});

// Focused coherent ghost image
// |int A(rho_o) h_tr[(k/z_bF)(rho_o + rho_a/m)] exp(-i (k/z_bF)(rho_b/M).rho_o)|^2.
// Throws NotAtFocus unless z_b equals the two-photon focus within 1e-9.
Image coherent_ghost_image(const ApertureMask& mask, const PumpProfile& pump, const OpticalSetup& setup_at_focus,
                           const SampledGrid& grid_a, Vec2 rho_b, const QuadratureSpec& quad = {});

// Sum over rho_b of the map times pitch_b^dim. Adds a truncated-envelope
// warning when the boundary rows exceed 1e-3 of the map peak.
Image incoherent_ghost_image(const CorrelationMap& map);

// Geometric-optics limit |A(rho_o*)|^2 |F(-rho_b/M)|^2.
double geometric_gamma(const ApertureMask& mask, const PumpProfile& pump, const OpticalSetup& setup, Vec2 rho_a,
                       Vec2 rho_b);

Vec2 stationary_object_point(Vec2 rho_a, Vec2 rho_b, const OpticalSetup& setup);
Vec2 stationary_source_point(Vec2 rho_b, double M);

inline constexpr double kEnvelopeWarnRatio = 1e-3;
std::string truncated_envelope_warning(double boundary, double peak);

// Plain-text archive of a one-dimensional map:
//   cpi-correlation-map 1
//   a <pitch_mm> <count> <center_mm>
//   b <pitch_mm> <count> <center_mm>
//   setup <z_a> <z_a_img> <f> <z_b> <z_b'> <z_b''> <F_b> <lambda> <sigma>
// followed by count_a rows of count_b values.
void write_correlation_map(std::ostream& out, const CorrelationMap& map);
CorrelationMap read_correlation_map(std::istream& in);

}  // namespace cpi
