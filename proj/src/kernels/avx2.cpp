#include <immintrin.h>

#include <cmath>
#include <cstddef>
#include <cstdint>

#include "wordconf/kernels.hpp"

// AVX2 + FMA kernel variants. Compiled with -mavx2 -mfma and only ever
// reached through the runtime dispatcher, which checks CPU support first.
//
// exp and log are evaluated with the usual range reductions:
//   exp(x) = 2^k * exp(r),   r = x - k*ln2,        |r| <= ln2/2
//   log(y) = e*ln2 + 2*atanh(s),  s = (m-1)/(m+1),  m in [sqrt(1/2), sqrt(2))
// Polynomial degrees are chosen so the truncation error sits below 1e-15
// relative, a couple of ulps from libm; the equivalence suite pins that down.

namespace wordconf::kern {
namespace {

constexpr double kLog2E = 1.4426950408889634074;
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kSqrt2 = 1.4142135623730951;
// exp(x) for x below this is subnormal; the vector path flushes it to zero.
constexpr double kExpUnderflow = -708.0;
constexpr double kExpOverflowClamp = 710.0;

inline __m256d v_exp(__m256d x) {
  const __m256d under = _mm256_cmp_pd(x, _mm256_set1_pd(kExpUnderflow), _CMP_LT_OQ);
  x = _mm256_min_pd(x, _mm256_set1_pd(kExpOverflowClamp));

  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kLog2E)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, _mm256_set1_pd(kLn2Hi), x);
  r = _mm256_fnmadd_pd(k, _mm256_set1_pd(kLn2Lo), r);

  // Taylor series for exp(r) on |r| <= ln2/2, truncated at r^13.
  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);  // 1/13!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  // 2^k through the exponent field; k stays in [-1022, 1024] here.
  const __m128i k32 = _mm256_cvtpd_epi32(k);
  const __m256i k64 = _mm256_cvtepi32_epi64(k32);
  const __m256i bits =
      _mm256_slli_epi64(_mm256_add_epi64(k64, _mm256_set1_epi64x(1023)), 52);
  const __m256d pow2k = _mm256_castsi256_pd(bits);

  return _mm256_andnot_pd(under, _mm256_mul_pd(p, pow2k));
}

// Requires y >= kProbFloor (callers clamp), so no zero/negative/subnormal
// handling is needed.
inline __m256d v_log(__m256d y) {
  const __m256i bits = _mm256_castpd_si256(y);
  __m256i e64 = _mm256_sub_epi64(_mm256_srli_epi64(bits, 52),
                                 _mm256_set1_epi64x(1023));
  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));

  // Keep m in [sqrt(1/2), sqrt(2)) so s stays small.
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrt2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e64 = _mm256_add_epi64(
      e64, _mm256_and_si256(_mm256_castpd_si256(big), _mm256_set1_epi64x(1)));

  // int64 -> double; exponents are tiny so the low 32 bits carry the value.
  const __m256i lo32 = _mm256_shuffle_epi32(e64, _MM_SHUFFLE(2, 0, 2, 0));
  const __m128i packed = _mm_unpacklo_epi64(_mm256_castsi256_si128(lo32),
                                            _mm256_extracti128_si256(lo32, 1));
  const __m256d e = _mm256_cvtepi32_pd(packed);

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d w = _mm256_mul_pd(s, s);

  // 2*atanh(s) = 2s + s*(w*(2/3 + w*(2/5 + ...))), truncated at s^17.
  __m256d t = _mm256_set1_pd(2.0 / 17.0);
  t = _mm256_fmadd_pd(t, w, _mm256_set1_pd(2.0 / 15.0));
  t = _mm256_fmadd_pd(t, w, _mm256_set1_pd(2.0 / 13.0));
  t = _mm256_fmadd_pd(t, w, _mm256_set1_pd(2.0 / 11.0));
  t = _mm256_fmadd_pd(t, w, _mm256_set1_pd(2.0 / 9.0));
  t = _mm256_fmadd_pd(t, w, _mm256_set1_pd(2.0 / 7.0));
  t = _mm256_fmadd_pd(t, w, _mm256_set1_pd(2.0 / 5.0));
  t = _mm256_fmadd_pd(t, w, _mm256_set1_pd(2.0 / 3.0));
  t = _mm256_mul_pd(t, w);
  const __m256d log_m = _mm256_fmadd_pd(s, t, _mm256_add_pd(s, s));

  __m256d out = _mm256_fmadd_pd(e, _mm256_set1_pd(kLn2Lo), log_m);
  return _mm256_fmadd_pd(e, _mm256_set1_pd(kLn2Hi), out);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s2 = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s2, _mm_unpackhi_pd(s2, s2)));
}

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m2 = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m2, _mm_unpackhi_pd(m2, m2)));
}

double a_sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double total = hsum(acc);
  for (; i < n; ++i) total += x[i];
  return total;
}

double a_max(const double* x, std::size_t n) {
  if (n < 4) {
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i) m = x[i] > m ? x[i] : m;
    return m;
  }
  __m256d acc = _mm256_loadu_pd(x);
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(x + i));
  double m = hmax(acc);
  for (; i < n; ++i) m = x[i] > m ? x[i] : m;
  return m;
}

void a_log_floor(const double* x, double* out, std::size_t n) {
  const __m256d floor_v = _mm256_set1_pd(kProbFloor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d y = _mm256_max_pd(_mm256_loadu_pd(x + i), floor_v);
    _mm256_storeu_pd(out + i, v_log(y));
  }
  for (; i < n; ++i) {
    out[i] = std::log(x[i] > kProbFloor ? x[i] : kProbFloor);
  }
}

double a_neg_entropy(const double* p, std::size_t n) {
  const __m256d floor_v = _mm256_set1_pd(kProbFloor);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d pv = _mm256_loadu_pd(p + i);
    const __m256d lv = v_log(_mm256_max_pd(pv, floor_v));
    acc = _mm256_fmadd_pd(pv, lv, acc);
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    total += p[i] * std::log(p[i] > kProbFloor ? p[i] : kProbFloor);
  }
  return total;
}

void a_exp_affine(const double* x, double a, double b, double* out,
                  std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  const __m256d bv = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d arg = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), av, bv);
    _mm256_storeu_pd(out + i, v_exp(arg));
  }
  for (; i < n; ++i) {
    const double arg = a * x[i] + b;
    out[i] = arg < kExpUnderflow ? 0.0 : std::exp(arg);
  }
}

void a_accumulate(const double* x, double* acc, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(
        acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) acc[i] += x[i];
}

void a_multiply(const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(
        y + i, _mm256_mul_pd(_mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) y[i] *= x[i];
}

void a_scale(double* x, double a, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), av));
  }
  for (; i < n; ++i) x[i] *= a;
}

}  // namespace

const Ops& avx2_ops_impl() {
  static const Ops table = {
      .name = "avx2",
      .sum = a_sum,
      .max = a_max,
      .log_floor = a_log_floor,
      .neg_entropy = a_neg_entropy,
      .exp_affine = a_exp_affine,
      .accumulate = a_accumulate,
      .multiply = a_multiply,
      .scale = a_scale,
  };
  return table;
}

}  // namespace wordconf::kern
