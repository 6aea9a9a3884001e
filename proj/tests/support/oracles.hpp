#pragma once

// Brute-force reference computations written independently of the library
// internals: plain loops, std::exp, long-double accumulation.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using cld = std::complex<long double>;

struct Bench {
  double z_a, z_a_img, f, z_b, z_bo, z_bs, lambda, sigma;
  double k() const { return 2.0 * M_PI / lambda; }
  double zeta() const { return 1.0 / (1.0 / z_a + 1.0 / z_a_img - 1.0 / f); }
  double M() const { return z_bs / (z_b + z_bo); }
};

// One-dimensional two-photon amplitude by nested midpoint sums over the
// object (transmission(o) on [o_lo, o_hi], n_o samples) and the source
// (Gaussian centred at c, +-8 sigma, n_s samples).
inline std::complex<double> amplitude_1d(const Bench& b, const std::function<double(double)>& transmission, double o_lo,
                                         double o_hi, int n_o, double c, int n_s, double rho_a, double rho_b) {
  const double k = b.k();
  const double zeta = b.zeta();
  const double beta = 1.0 / b.z_b + (1.0 / b.z_a) * (1.0 - zeta / b.z_a);
  const double ga = zeta / (b.z_a * b.z_a_img);
  const double gb = 1.0 / b.z_b;
  const double M = b.M();
  const double ho = (o_hi - o_lo) / n_o;
  const double s_lo = c - 8.0 * b.sigma;
  const double hs = 16.0 * b.sigma / n_s;
  cld total = 0.0L;
  for (int i = 0; i < n_o; ++i) {
    const double o = o_lo + (i + 0.5) * ho;
    const double t = transmission(o);
    if (t == 0.0) continue;
    cld inner = 0.0L;
    for (int j = 0; j < n_s; ++j) {
      const double s = s_lo + (j + 0.5) * hs;
      const double F = std::exp(-(s - c) * (s - c) / (2.0 * b.sigma * b.sigma));
      const double phi = beta * s * s / 2.0 - ga * s * rho_a - gb * (s + rho_b / M) * o;
      inner += cld(std::polar<long double>(F, k * phi));
    }
    total += inner * static_cast<long double>(t * hs * ho);
  }
  return {static_cast<double>(total.real()), static_cast<double>(total.imag())};
}

// Focused incoherent image from the convolution form: integral over the
// object of |A(o)|^2 |h(k/z_bF (o + rho_a/m))|^2, Gaussian pump.
inline double convolution_image(const std::function<double(double)>& intensity, double o_lo, double o_hi, int n_o,
                                double sigma, double k, double z_bF, double m, double rho_a) {
  const double ho = (o_hi - o_lo) / n_o;
  long double acc = 0.0L;
  for (int i = 0; i < n_o; ++i) {
    const double o = o_lo + (i + 0.5) * ho;
    const double kappa = k / z_bF * (o + rho_a / m);
    acc += intensity(o) * std::exp(-sigma * sigma * kappa * kappa);
  }
  return static_cast<double>(acc * ho);
}

// Integral of exp(i (k/2) (a x^2 + 2 b x)) over x with a raised-cosine taper
// that is flat on |x - centre| < inner and falls to zero at outer.
inline std::complex<double> tapered_chirp(double k, double a, double b, double centre, double inner, double outer,
                                          double h) {
  const int n = static_cast<int>(std::ceil(2.0 * outer / h));
  const double step = 2.0 * outer / n;
  cld acc = 0.0L;
  for (int i = 0; i < n; ++i) {
    const double x = centre - outer + (i + 0.5) * step;
    const double r = std::abs(x - centre);
    double w = 1.0;
    if (r > inner) w = 0.5 * (1.0 + std::cos(M_PI * (r - inner) / (outer - inner)));
    acc += cld(std::polar<long double>(w, 0.5 * k * (a * x * x + 2.0 * b * x)));
  }
  return {static_cast<double>(acc.real() * step), static_cast<double>(acc.imag() * step)};
}

}  // namespace oracle
