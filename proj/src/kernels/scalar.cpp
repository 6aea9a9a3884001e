#include <cmath>

#include "cpi/kernels/kernels.hpp"

namespace cpi::kernels::scalar {

Complex chirp_sum(const ChirpPoly& poly, std::size_t count, const Complex* weights) {
  CompensatedComplexSum acc;
  for (std::size_t n = 0; n < count; ++n) {
    const double t = poly.t0 + static_cast<double>(n);
    const double re = poly.c0.real() + t * (poly.c1.real() + t * poly.c2.real());
    const double im = poly.c0.imag() + t * (poly.c1.imag() + t * poly.c2.imag());
    Complex term = std::exp(re) * Complex(std::cos(im), std::sin(im));
    if (weights) term *= weights[n];
    acc.add(term);
  }
  return acc.value();
}

double combo_power(const Complex* coeffs, const double* const* re, const double* const* im, std::size_t rows,
                   std::size_t n) {
  CompensatedSum acc;
  for (std::size_t j = 0; j < n; ++j) {
    double ar = 0.0;
    double ai = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double cr = coeffs[r].real();
      const double ci = coeffs[r].imag();
      ar += cr * re[r][j] - ci * im[r][j];
      ai += cr * im[r][j] + ci * re[r][j];
    }
    acc.add(ar * ar + ai * ai);
  }
  return acc.value();
}

}  // namespace cpi::kernels::scalar
