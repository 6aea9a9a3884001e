#include "cpi/propagation.hpp"

#include <cmath>

#include "cpi/errors.hpp"
#include "cpi/kernels/kernels.hpp"
#include "cpi/parallel.hpp"

namespace cpi {

namespace {

double max_separation(const SampledGrid& in, const SampledGrid& out, int axis) {
  const double a = std::abs(out.coordinate(axis, out.count() - 1) - in.coordinate(axis, 0));
  const double b = std::abs(out.coordinate(axis, 0) - in.coordinate(axis, in.count() - 1));
  return std::max(a, b);
}

// Direct quadrature of exp(i*sign*k|x2 - x1|^2/(2z)) against the input field.
ComplexField propagate(const ComplexField& field, double distance, const SampledGrid& out_grid, double sign) {
  if (!(distance > 0.0)) throw ValidationError("propagation distance must be positive");
  const SampledGrid& in = field.grid;
  if (in.dim() != out_grid.dim()) throw ValidationError("input and output grids differ in dimension");
  const double k = field.wavenumber;
  const double h = in.pitch();
  const double curvature = sign * k / distance;

  for (int axis = 0; axis < in.dim(); ++axis) {
    const double step = std::abs(curvature) * max_separation(in, out_grid, axis) * h;
    if (step >= kPi) throw UndersampledQuadrature("free-space kernel", step);
  }

  // 2D: k/(2 pi i z) e^{ikz}; 1D: sqrt(k/(2 pi i z)) e^{ikz}; conjugated for sign < 0.
  Complex pre = (in.dim() == 2) ? k / (2.0 * kPi * Complex(0.0, 1.0) * distance)
                                : std::sqrt(k / (2.0 * kPi * Complex(0.0, 1.0) * distance));
  pre *= std::polar(1.0, k * distance);
  if (sign < 0.0) pre = std::conj(pre);
  const double weight = in.cell_measure();

  const int n_in = in.count();
  std::vector<Complex> out(out_grid.size());
  const double half = 0.5 * curvature;

  // Exponent in the input index n along x: i*half*(x2 - x(n))^2, x(n) = x0 + n h.
  auto row_poly = [&](double x2) {
    const double d0 = x2 - in.coordinate(0, 0);
    kernels::ChirpPoly p;
    p.c0 = Complex(0.0, half * d0 * d0);
    p.c1 = Complex(0.0, -2.0 * half * d0 * h);
    p.c2 = Complex(0.0, half * h * h);
    return p;
  };

  if (in.dim() == 1) {
    parallel_for(out.size(), [&](std::size_t i) {
      const Complex s = kernels::chirp_sum(row_poly(out_grid.coordinate(0, static_cast<int>(i))),
                                           static_cast<std::size_t>(n_in), field.values);
      out[i] = pre * weight * s;
    });
  } else {
    const auto n = static_cast<std::size_t>(n_in);
    parallel_for(out.size(), [&](std::size_t i) {
      const Vec2 p2 = out_grid.point(i);
      const kernels::ChirpPoly poly = row_poly(p2.x);
      kernels::CompensatedComplexSum acc;
      for (std::size_t iy = 0; iy < n; ++iy) {
        const double dy = p2.y - in.coordinate(1, static_cast<int>(iy));
        const Complex row = kernels::chirp_sum(
            poly, n, std::span<const Complex>(field.values.data() + iy * n, n));
        acc.add(row * std::polar(1.0, half * dy * dy));
      }
      out[i] = pre * weight * acc.value();
    });
  }

  ComplexField result(out_grid, std::move(out), k);
  result.prefactor = field.prefactor * pre;
  return result;
}

}  // namespace

ComplexField::ComplexField(SampledGrid g, std::vector<Complex> v, double k)
    : grid(g), values(std::move(v)), wavenumber(k) {
  if (values.size() != grid.size()) throw ValidationError("field values do not match the grid size");
  for (const Complex& c : values)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw ValidationError("field has non-finite samples");
}

ComplexField free_propagate(const ComplexField& field, double distance, const SampledGrid& out_grid) {
  return propagate(field, distance, out_grid, 1.0);
}

ComplexField back_propagate(const ComplexField& field, double distance, const SampledGrid& out_grid) {
  return propagate(field, distance, out_grid, -1.0);
}

ComplexField lens_phase(ComplexField field, double focal) {
  if (focal == 0.0) throw ZeroFocal("lens focal length is zero");
  if (std::isinf(focal)) return field;
  const double curvature = -field.wavenumber / focal;
  for (std::size_t i = 0; i < field.values.size(); ++i)
    field.values[i] *= quadratic_phase(field.grid.point(i), curvature);
  return field;
}

Complex green_a_reduced(Vec2 rho_a, Vec2 rho_s, const OpticalSetup& setup) {
  const double z = zeta(setup.z_a, setup.z_a_img, setup.f);
  if (std::isinf(z)) throw InfiniteZeta("arm-a propagator undefined for collimated two-photon imaging");
  const double k = setup.wavenumber();
  const double curvature = (k / setup.z_a) * (1.0 - z / setup.z_a);
  const double cross = k * z / (setup.z_a * setup.z_a_img);
  return quadratic_phase(rho_s, curvature) * std::polar(1.0, -cross * dot(rho_s, rho_a));
}

Complex green_b_reduced(Vec2 rho_b, Vec2 rho_s, Vec2 rho_o, const OpticalSetup& setup) {
  const double k = setup.wavenumber();
  const double M = source_magnification(setup);
  const Vec2 shifted = rho_s + rho_b / M;
  return quadratic_phase(rho_s, k / setup.z_b) * std::polar(1.0, -(k / setup.z_b) * dot(shifted, rho_o));
}

}  // namespace cpi
