#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference in
// `kernels::scalar` and optional SIMD variants; the free functions dispatch to
// the best variant the running CPU supports. Summation order inside one call
// is fixed, so a given variant is bitwise reproducible.

#include <cstddef>
#include <span>
#include <string_view>

#include "cpi/vec.hpp"

namespace cpi::kernels {

enum class Isa { scalar, avx2 };

// Exponent c0 + c1*t + c2*t^2 of a complex chirp sampled at t = t0 + n.
struct ChirpPoly {
  Complex c0{};
  Complex c1{};
  Complex c2{};
  double t0 = 0.0;
};

// sum_{n<count} w[n] * exp(c0 + c1*t_n + c2*t_n^2); empty weights mean w = 1.
using ChirpSumFn = Complex (*)(const ChirpPoly&, std::size_t count, const Complex* weights);

// sum_{j<n} |sum_r coeff[r] * (re[r][j] + i*im[r][j])|^2
using ComboPowerFn = double (*)(const Complex* coeffs, const double* const* re, const double* const* im,
                                std::size_t rows, std::size_t n);

namespace scalar {
Complex chirp_sum(const ChirpPoly& poly, std::size_t count, const Complex* weights);
double combo_power(const Complex* coeffs, const double* const* re, const double* const* im, std::size_t rows,
                   std::size_t n);
}  // namespace scalar

namespace avx2 {
Complex chirp_sum(const ChirpPoly& poly, std::size_t count, const Complex* weights);
double combo_power(const Complex* coeffs, const double* const* re, const double* const* im, std::size_t rows,
                   std::size_t n);
}  // namespace avx2

bool isa_available(Isa isa);
Isa active_isa();
// Selects a variant for the whole process; throws if unavailable. The
// CPI_ISA environment variable (scalar|avx2) sets the initial choice.
void set_isa(Isa isa);
std::string_view isa_name(Isa isa);

Complex chirp_sum(const ChirpPoly& poly, std::size_t count, std::span<const Complex> weights = {});
double combo_power(std::span<const Complex> coeffs, std::span<const double* const> re,
                   std::span<const double* const> im, std::size_t n);

// Neumaier compensated accumulator used by every reduction in the library.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      carry += (sum - t) + v;
    else
      carry += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

struct CompensatedComplexSum {
  CompensatedSum re;
  CompensatedSum im;

  void add(Complex v) {
    re.add(v.real());
    im.add(v.imag());
  }
  Complex value() const { return {re.value(), im.value()}; }
};

}  // namespace cpi::kernels
