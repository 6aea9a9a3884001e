#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "cpi/kernels/kernels.hpp"

namespace cpi::kernels {

#ifndef CPI_BUILD_AVX2
namespace avx2 {
Complex chirp_sum(const ChirpPoly& poly, std::size_t count, const Complex* weights) {
  return scalar::chirp_sum(poly, count, weights);
}
double combo_power(const Complex* coeffs, const double* const* re, const double* const* im, std::size_t rows,
                   std::size_t n) {
  return scalar::combo_power(coeffs, re, im, rows, n);
}
}  // namespace avx2
#endif

namespace {

struct Table {
  ChirpSumFn chirp_sum;
  ComboPowerFn combo_power;
};

constexpr Table kScalar{&scalar::chirp_sum, &scalar::combo_power};
constexpr Table kAvx2{&avx2::chirp_sum, &avx2::combo_power};

Isa initial_isa() {
  Isa best = isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
  if (const char* env = std::getenv("CPI_ISA")) {
    if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
    if (std::strcmp(env, "avx2") == 0 && isa_available(Isa::avx2)) return Isa::avx2;
  }
  return best;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

const Table& table() { return current().load(std::memory_order_relaxed) == Isa::avx2 ? kAvx2 : kScalar; }

}  // namespace

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(CPI_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (!isa_available(isa)) throw std::runtime_error("instruction set not available on this CPU");
  current().store(isa, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Complex chirp_sum(const ChirpPoly& poly, std::size_t count, std::span<const Complex> weights) {
  if (!weights.empty() && weights.size() < count) throw std::invalid_argument("chirp_sum: too few weights");
  return table().chirp_sum(poly, count, weights.empty() ? nullptr : weights.data());
}

double combo_power(std::span<const Complex> coeffs, std::span<const double* const> re,
                   std::span<const double* const> im, std::size_t n) {
  if (re.size() != coeffs.size() || im.size() != coeffs.size())
    throw std::invalid_argument("combo_power: row count mismatch");
  return table().combo_power(coeffs.data(), re.data(), im.data(), coeffs.size(), n);
}

}  // namespace cpi::kernels
