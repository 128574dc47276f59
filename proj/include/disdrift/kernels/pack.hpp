#pragma once
// SIMD value packs. Pack1 is the scalar reference; Pack4 wraps AVX2 and is
// only visible in translation units compiled with -mavx2 -mfma. Every
// operation here is a single IEEE double operation per lane, so an algorithm
// written against this interface produces bit-identical lanes on either pack.

#include <cmath>
#include <cstdint>
#include <cstring>

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#endif

namespace disdrift::kern {

inline double bits_to_double(std::uint64_t b) {
  double d;
  std::memcpy(&d, &b, sizeof d);
  return d;
}

inline std::uint64_t double_to_bits(double d) {
  std::uint64_t b;
  std::memcpy(&b, &d, sizeof b);
  return b;
}

// ---------------------------------------------------------------------------
// Pack1: scalar reference lane
// ---------------------------------------------------------------------------

struct Mask1 {
  bool m;
};

inline Mask1 operator&(Mask1 a, Mask1 b) { return {a.m && b.m}; }
inline Mask1 operator|(Mask1 a, Mask1 b) { return {a.m || b.m}; }
inline Mask1 operator~(Mask1 a) { return {!a.m}; }
inline bool any(Mask1 a) { return a.m; }
inline bool all(Mask1 a) { return a.m; }

struct Pack1 {
  static constexpr int width = 1;
  using mask_type = Mask1;
  double v;

  Pack1() = default;
  explicit Pack1(double x) : v(x) {}
  static Pack1 load(const double* p) { return Pack1{*p}; }
  static Pack1 broadcast(double x) { return Pack1{x}; }
  void store(double* p) const { *p = v; }
};

inline Pack1 operator+(Pack1 a, Pack1 b) { return Pack1{a.v + b.v}; }
inline Pack1 operator-(Pack1 a, Pack1 b) { return Pack1{a.v - b.v}; }
inline Pack1 operator*(Pack1 a, Pack1 b) { return Pack1{a.v * b.v}; }
inline Pack1 operator/(Pack1 a, Pack1 b) { return Pack1{a.v / b.v}; }
inline Pack1 operator-(Pack1 a) { return Pack1{-a.v}; }

inline Pack1 fmadd(Pack1 a, Pack1 b, Pack1 c) { return Pack1{std::fma(a.v, b.v, c.v)}; }
inline Pack1 sqrt(Pack1 a) { return Pack1{std::sqrt(a.v)}; }
inline Pack1 abs(Pack1 a) { return Pack1{std::fabs(a.v)}; }
inline Pack1 min(Pack1 a, Pack1 b) { return Pack1{a.v < b.v ? a.v : b.v}; }
inline Pack1 max(Pack1 a, Pack1 b) { return Pack1{a.v > b.v ? a.v : b.v}; }

inline Mask1 cmp_lt(Pack1 a, Pack1 b) { return {a.v < b.v}; }
inline Mask1 cmp_le(Pack1 a, Pack1 b) { return {a.v <= b.v}; }
inline Mask1 cmp_gt(Pack1 a, Pack1 b) { return {a.v > b.v}; }
inline Mask1 cmp_ge(Pack1 a, Pack1 b) { return {a.v >= b.v}; }
inline Mask1 cmp_eq(Pack1 a, Pack1 b) { return {a.v == b.v}; }

inline Pack1 blend(Mask1 m, Pack1 if_true, Pack1 if_false) {
  return m.m ? if_true : if_false;
}

// Copy sign bit of `s` onto |a|.
inline Pack1 copysign_pack(Pack1 a, Pack1 s) { return Pack1{std::copysign(a.v, s.v)}; }

// Flip the sign of `a` wherever the mask is set.
inline Pack1 negate_where(Mask1 m, Pack1 a) { return m.m ? Pack1{-a.v} : a; }

// Round to nearest integer (ties to even), result as double.
inline Pack1 round_nearest(Pack1 a) { return Pack1{std::nearbyint(a.v)}; }

// --- integer-view helpers used by the transcendental kernels --------------

// Biased exponent and mantissa split: x = m * 2^e with m in [1,2).
// Assumes x is positive, finite and normal.
inline void split_exponent(Pack1 x, Pack1& mant, Pack1& expo) {
  std::uint64_t b = double_to_bits(x.v);
  std::int64_t e = static_cast<std::int64_t>((b >> 52) & 0x7ff) - 1023;
  std::uint64_t mb = (b & 0x000fffffffffffffULL) | 0x3ff0000000000000ULL;
  mant = Pack1{bits_to_double(mb)};
  expo = Pack1{static_cast<double>(e)};
}

// 2^k for integer-valued double k with |k| <= 1023.
inline Pack1 exp2_int(Pack1 k) {
  std::int64_t ki = static_cast<std::int64_t>(k.v);
  return Pack1{bits_to_double(static_cast<std::uint64_t>(ki + 1023) << 52)};
}

// Lowest two bits of the integer-valued double q, returned as masks.
inline void quadrant_bits(Pack1 q, Mask1& bit0, Mask1& bit1) {
  std::int64_t qi = static_cast<std::int64_t>(q.v);
  bit0 = {(qi & 1) != 0};
  bit1 = {(qi & 2) != 0};
}

#if defined(__AVX2__) && defined(__FMA__)

// ---------------------------------------------------------------------------
// Pack4: four doubles in an AVX2 register
// ---------------------------------------------------------------------------

struct Mask4 {
  __m256d m;  // all-ones / all-zeros per lane
};

inline Mask4 operator&(Mask4 a, Mask4 b) { return {_mm256_and_pd(a.m, b.m)}; }
inline Mask4 operator|(Mask4 a, Mask4 b) { return {_mm256_or_pd(a.m, b.m)}; }
inline Mask4 operator~(Mask4 a) {
  return {_mm256_xor_pd(a.m, _mm256_castsi256_pd(_mm256_set1_epi64x(-1)))};
}
inline bool any(Mask4 a) { return _mm256_movemask_pd(a.m) != 0; }
inline bool all(Mask4 a) { return _mm256_movemask_pd(a.m) == 0xf; }

struct Pack4 {
  static constexpr int width = 4;
  using mask_type = Mask4;
  __m256d v;

  Pack4() = default;
  explicit Pack4(__m256d x) : v(x) {}
  static Pack4 load(const double* p) { return Pack4{_mm256_loadu_pd(p)}; }
  static Pack4 broadcast(double x) { return Pack4{_mm256_set1_pd(x)}; }
  void store(double* p) const { _mm256_storeu_pd(p, v); }
};

inline Pack4 operator+(Pack4 a, Pack4 b) { return Pack4{_mm256_add_pd(a.v, b.v)}; }
inline Pack4 operator-(Pack4 a, Pack4 b) { return Pack4{_mm256_sub_pd(a.v, b.v)}; }
inline Pack4 operator*(Pack4 a, Pack4 b) { return Pack4{_mm256_mul_pd(a.v, b.v)}; }
inline Pack4 operator/(Pack4 a, Pack4 b) { return Pack4{_mm256_div_pd(a.v, b.v)}; }
inline Pack4 operator-(Pack4 a) {
  return Pack4{_mm256_xor_pd(a.v, _mm256_set1_pd(-0.0))};
}

inline Pack4 fmadd(Pack4 a, Pack4 b, Pack4 c) { return Pack4{_mm256_fmadd_pd(a.v, b.v, c.v)}; }
inline Pack4 sqrt(Pack4 a) { return Pack4{_mm256_sqrt_pd(a.v)}; }
inline Pack4 abs(Pack4 a) {
  return Pack4{_mm256_andnot_pd(_mm256_set1_pd(-0.0), a.v)};
}
inline Pack4 min(Pack4 a, Pack4 b) { return Pack4{_mm256_min_pd(b.v, a.v)}; }
inline Pack4 max(Pack4 a, Pack4 b) { return Pack4{_mm256_max_pd(b.v, a.v)}; }

inline Mask4 cmp_lt(Pack4 a, Pack4 b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_LT_OQ)}; }
inline Mask4 cmp_le(Pack4 a, Pack4 b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_LE_OQ)}; }
inline Mask4 cmp_gt(Pack4 a, Pack4 b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_GT_OQ)}; }
inline Mask4 cmp_ge(Pack4 a, Pack4 b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_GE_OQ)}; }
inline Mask4 cmp_eq(Pack4 a, Pack4 b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_EQ_OQ)}; }

inline Pack4 blend(Mask4 m, Pack4 if_true, Pack4 if_false) {
  return Pack4{_mm256_blendv_pd(if_false.v, if_true.v, m.m)};
}

inline Pack4 copysign_pack(Pack4 a, Pack4 s) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  return Pack4{_mm256_or_pd(_mm256_andnot_pd(sign, a.v), _mm256_and_pd(sign, s.v))};
}

inline Pack4 negate_where(Mask4 m, Pack4 a) {
  return Pack4{_mm256_xor_pd(a.v, _mm256_and_pd(m.m, _mm256_set1_pd(-0.0)))};
}

inline Pack4 round_nearest(Pack4 a) {
  return Pack4{_mm256_round_pd(a.v, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC)};
}

inline void split_exponent(Pack4 x, Pack4& mant, Pack4& expo) {
  __m256i b = _mm256_castpd_si256(x.v);
  __m256i ebits = _mm256_srli_epi64(b, 52);  // high bits zero for positive x
  // int64 -> double via the 2^52 magic-number trick (values are tiny).
  const __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);  // 2^52
  __m256d ed = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(ebits, magic)),
                             _mm256_castsi256_pd(magic));
  expo = Pack4{_mm256_sub_pd(ed, _mm256_set1_pd(1023.0))};
  __m256i mb = _mm256_or_si256(_mm256_and_si256(b, _mm256_set1_epi64x(0x000fffffffffffffLL)),
                               _mm256_set1_epi64x(0x3ff0000000000000LL));
  mant = Pack4{_mm256_castsi256_pd(mb)};
}

inline Pack4 exp2_int(Pack4 k) {
  __m128i k32 = _mm256_cvtpd_epi32(k.v);  // k is integer-valued, small
  __m256i k64 = _mm256_cvtepi32_epi64(k32);
  __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(k64, _mm256_set1_epi64x(1023)), 52);
  return Pack4{_mm256_castsi256_pd(bits)};
}

inline void quadrant_bits(Pack4 q, Mask4& bit0, Mask4& bit1) {
  __m128i q32 = _mm256_cvtpd_epi32(q.v);
  __m256i q64 = _mm256_cvtepi32_epi64(q32);
  __m256i zero = _mm256_setzero_si256();
  __m256i b0 = _mm256_and_si256(q64, _mm256_set1_epi64x(1));
  __m256i b1 = _mm256_and_si256(q64, _mm256_set1_epi64x(2));
  // nonzero -> all-ones lane
  bit0 = {_mm256_castsi256_pd(
      _mm256_xor_si256(_mm256_cmpeq_epi64(b0, zero), _mm256_set1_epi64x(-1)))};
  bit1 = {_mm256_castsi256_pd(
      _mm256_xor_si256(_mm256_cmpeq_epi64(b1, zero), _mm256_set1_epi64x(-1)))};
}

#endif  // __AVX2__ && __FMA__

}  // namespace disdrift::kern
