#pragma once

#include <vector>

#include "cpi/geometry.hpp"
#include "cpi/grid.hpp"
#include "cpi/vec.hpp"

namespace cpi {

// Scalar monochromatic field sampled on a grid.
struct ComplexField {
  SampledGrid grid;
  std::vector<Complex> values;
  double wavenumber = 0.0;  // Omega / c, 1/mm
  // Product of the propagation prefactors applied so far.
  Complex prefactor{1.0, 0.0};

  ComplexField(SampledGrid g, std::vector<Complex> v, double k);
};

// G(x)_[y] = exp(i y |x|^2 / 2)
inline Complex quadratic_phase(Vec2 x, double curvature) { return std::polar(1.0, 0.5 * curvature * norm2(x)); }

// Fresnel propagation over `distance` onto `out_grid` by direct midpoint
// quadrature of the paraxial kernel, prefactor included. Throws
// UndersampledQuadrature when the kernel phase changes by pi or more between
// adjacent input samples.
ComplexField free_propagate(const ComplexField& field, double distance, const SampledGrid& out_grid);
inline ComplexField free_propagate(const ComplexField& field, double distance) {
  return free_propagate(field, distance, field.grid);
}
// Inverse of free_propagate: quadrature with the conjugate kernel.
ComplexField back_propagate(const ComplexField& field, double distance, const SampledGrid& out_grid);

// Thin ideal lens: multiplies by G(rho)_[-k/focal]. An infinite focal length
// is the identity; zero throws ZeroFocal.
ComplexField lens_phase(ComplexField field, double focal);

// Reduced arm-a factor inside the source integral:
// G(rho_s)_[(k/z_a)(1 - zeta/z_a)] * exp(-i k zeta/(z_a z_a') rho_s . rho_a).
Complex green_a_reduced(Vec2 rho_a, Vec2 rho_s, const OpticalSetup& setup);
// Reduced arm-b factor: G(rho_s)_[k/z_b] * exp(-i (k/z_b)(rho_s + rho_b/M) . rho_o).
Complex green_b_reduced(Vec2 rho_b, Vec2 rho_s, Vec2 rho_o, const OpticalSetup& setup);

}  // namespace cpi
