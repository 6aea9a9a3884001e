// AVX2 + FMA variants. Compiled with -mavx2 -mfma; only reached after the
// dispatcher has confirmed CPU support.

#include <immintrin.h>

#include <cmath>

#include "cpi/kernels/kernels.hpp"

namespace cpi::kernels::avx2 {

namespace {

inline __m256d set1(double v) { return _mm256_set1_pd(v); }

// Integer value of an already-rounded double placed in the low bits of each
// 64-bit lane (valid for |v| < 2^51).
inline __m256i round_to_epi64(__m256d rounded) {
  const __m256d magic = set1(6755399441055744.0);  // 1.5 * 2^52
  return _mm256_castpd_si256(_mm256_add_pd(rounded, magic));
}

// exp(x) with Cody-Waite reduction and the Cephes rational approximation.
// Lanes below -700 flush to zero.
inline __m256d exp_pd(__m256d x) {
  const __m256d hi = set1(709.0);
  const __m256d lo = set1(-700.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, set1(1.4426950408889634073599)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, set1(6.93145751953125E-1), x);
  r = _mm256_fnmadd_pd(n, set1(1.42860682030941723212E-6), r);

  const __m256d rr = _mm256_mul_pd(r, r);
  __m256d p = _mm256_fmadd_pd(set1(1.26177193074810590878E-4), rr, set1(3.02994407707441961300E-2));
  p = _mm256_fmadd_pd(p, rr, set1(9.99999999999999999910E-1));
  p = _mm256_mul_pd(p, r);
  __m256d q = _mm256_fmadd_pd(set1(3.00198505138664455042E-6), rr, set1(2.52448340349684104192E-3));
  q = _mm256_fmadd_pd(q, rr, set1(2.27265548208155028766E-1));
  q = _mm256_fmadd_pd(q, rr, set1(2.00000000000000000009E0));
  __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  e = _mm256_fmadd_pd(e, set1(2.0), set1(1.0));

  __m256i bits = round_to_epi64(n);
  bits = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
  bits = _mm256_slli_epi64(bits, 52);
  e = _mm256_mul_pd(e, _mm256_castsi256_pd(bits));
  return _mm256_andnot_pd(underflow, e);
}

// sin and cos with quadrant reduction by a three-part split of pi/2 (fdlibm
// constants) and fdlibm kernel polynomials on [-pi/4, pi/4].
inline void sincos_pd(__m256d x, __m256d& s_out, __m256d& c_out) {
  const __m256d j = _mm256_round_pd(_mm256_mul_pd(x, set1(6.36619772367581382433e-01)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(j, set1(1.57079632673412561417e+00), x);
  r = _mm256_fnmadd_pd(j, set1(6.07710050630396597660e-11), r);
  r = _mm256_fnmadd_pd(j, set1(2.02226624871116645580e-21), r);

  const __m256d z = _mm256_mul_pd(r, r);
  __m256d ps = _mm256_fmadd_pd(set1(1.58969099521155010221e-10), z, set1(-2.50507602534068634195e-08));
  ps = _mm256_fmadd_pd(ps, z, set1(2.75573137070700676789e-06));
  ps = _mm256_fmadd_pd(ps, z, set1(-1.98412698298579493134e-04));
  ps = _mm256_fmadd_pd(ps, z, set1(8.33333333332248946124e-03));
  ps = _mm256_fmadd_pd(ps, z, set1(-1.66666666666666324348e-01));
  const __m256d sin_r = _mm256_fmadd_pd(_mm256_mul_pd(ps, z), r, r);

  __m256d pc = _mm256_fmadd_pd(set1(-1.13596475577881948265e-11), z, set1(2.08757232129817482790e-09));
  pc = _mm256_fmadd_pd(pc, z, set1(-2.75573143513906633035e-07));
  pc = _mm256_fmadd_pd(pc, z, set1(2.48015872894767294178e-05));
  pc = _mm256_fmadd_pd(pc, z, set1(-1.38888888888741095749e-03));
  pc = _mm256_fmadd_pd(pc, z, set1(4.16666666666666019037e-02));
  const __m256d z2 = _mm256_mul_pd(z, z);
  const __m256d cos_r = _mm256_fmadd_pd(pc, z2, _mm256_fnmadd_pd(set1(0.5), z, set1(1.0)));

  const __m256i q = _mm256_and_si256(round_to_epi64(j), _mm256_set1_epi64x(3));
  const __m256i one = _mm256_set1_epi64x(1);
  const __m256i two = _mm256_set1_epi64x(2);
  const __m256d swap = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q, one), one));
  const __m256d neg_sin = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q, two), two));
  const __m256i q1 = _mm256_add_epi64(q, one);
  const __m256d neg_cos = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q1, two), two));

  const __m256d sign = set1(-0.0);
  __m256d s = _mm256_blendv_pd(sin_r, cos_r, swap);
  __m256d c = _mm256_blendv_pd(cos_r, sin_r, swap);
  s = _mm256_xor_pd(s, _mm256_and_pd(neg_sin, sign));
  c = _mm256_xor_pd(c, _mm256_and_pd(neg_cos, sign));
  s_out = s;
  c_out = c;
}

// Per-lane Neumaier accumulation.
struct LaneSum {
  __m256d sum = _mm256_setzero_pd();
  __m256d carry = _mm256_setzero_pd();

  void add(__m256d v) {
    const __m256d t = _mm256_add_pd(sum, v);
    const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    const __m256d sum_big =
        _mm256_cmp_pd(_mm256_and_pd(sum, abs_mask), _mm256_and_pd(v, abs_mask), _CMP_GE_OQ);
    const __m256d a = _mm256_add_pd(_mm256_sub_pd(sum, t), v);
    const __m256d b = _mm256_add_pd(_mm256_sub_pd(v, t), sum);
    carry = _mm256_add_pd(carry, _mm256_blendv_pd(b, a, sum_big));
    sum = t;
  }

  // Lanes folded in ascending order.
  double reduce() const {
    alignas(32) double s[4];
    alignas(32) double c[4];
    _mm256_store_pd(s, sum);
    _mm256_store_pd(c, carry);
    CompensatedSum acc;
    for (int l = 0; l < 4; ++l) {
      acc.add(s[l]);
      acc.add(c[l]);
    }
    return acc.value();
  }
};

}  // namespace

Complex chirp_sum(const ChirpPoly& poly, std::size_t count, const Complex* weights) {
  const __m256d c0r = set1(poly.c0.real());
  const __m256d c1r = set1(poly.c1.real());
  const __m256d c2r = set1(poly.c2.real());
  const __m256d c0i = set1(poly.c0.imag());
  const __m256d c1i = set1(poly.c1.imag());
  const __m256d c2i = set1(poly.c2.imag());
  const __m256d lane = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);

  LaneSum acc_re;
  LaneSum acc_im;
  for (std::size_t n = 0; n < count; n += 4) {
    const __m256d t = _mm256_add_pd(set1(poly.t0 + static_cast<double>(n)), lane);
    const __m256d re = _mm256_fmadd_pd(t, _mm256_fmadd_pd(t, c2r, c1r), c0r);
    const __m256d im = _mm256_fmadd_pd(t, _mm256_fmadd_pd(t, c2i, c1i), c0i);
    const __m256d mag = exp_pd(re);
    __m256d s;
    __m256d c;
    sincos_pd(im, s, c);
    __m256d tr = _mm256_mul_pd(mag, c);
    __m256d ti = _mm256_mul_pd(mag, s);

    const std::size_t left = count - n;
    if (weights) {
      alignas(32) double wr[4] = {0.0, 0.0, 0.0, 0.0};
      alignas(32) double wi[4] = {0.0, 0.0, 0.0, 0.0};
      for (std::size_t l = 0; l < 4 && l < left; ++l) {
        wr[l] = weights[n + l].real();
        wi[l] = weights[n + l].imag();
      }
      const __m256d vwr = _mm256_load_pd(wr);
      const __m256d vwi = _mm256_load_pd(wi);
      const __m256d nr = _mm256_fmsub_pd(tr, vwr, _mm256_mul_pd(ti, vwi));
      const __m256d ni = _mm256_fmadd_pd(tr, vwi, _mm256_mul_pd(ti, vwr));
      tr = nr;
      ti = ni;
    } else if (left < 4) {
      const __m256d keep = _mm256_cmp_pd(lane, set1(static_cast<double>(left)), _CMP_LT_OQ);
      tr = _mm256_and_pd(tr, keep);
      ti = _mm256_and_pd(ti, keep);
    }
    acc_re.add(tr);
    acc_im.add(ti);
  }
  return {acc_re.reduce(), acc_im.reduce()};
}

double combo_power(const Complex* coeffs, const double* const* re, const double* const* im, std::size_t rows,
                   std::size_t n) {
  LaneSum acc;
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d ar = _mm256_setzero_pd();
    __m256d ai = _mm256_setzero_pd();
    for (std::size_t r = 0; r < rows; ++r) {
      const __m256d cr = set1(coeffs[r].real());
      const __m256d ci = set1(coeffs[r].imag());
      const __m256d xr = _mm256_loadu_pd(re[r] + j);
      const __m256d xi = _mm256_loadu_pd(im[r] + j);
      ar = _mm256_fmadd_pd(cr, xr, ar);
      ar = _mm256_fnmadd_pd(ci, xi, ar);
      ai = _mm256_fmadd_pd(cr, xi, ai);
      ai = _mm256_fmadd_pd(ci, xr, ai);
    }
    acc.add(_mm256_fmadd_pd(ar, ar, _mm256_mul_pd(ai, ai)));
  }
  CompensatedSum tail;
  tail.add(acc.reduce());
  for (; j < n; ++j) {
    double ar = 0.0;
    double ai = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      ar += coeffs[r].real() * re[r][j] - coeffs[r].imag() * im[r][j];
      ai += coeffs[r].real() * im[r][j] + coeffs[r].imag() * re[r][j];
    }
    tail.add(ar * ar + ai * ai);
  }
  return tail.value();
}

}  // namespace cpi::kernels::avx2
