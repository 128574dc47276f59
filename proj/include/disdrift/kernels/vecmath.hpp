#pragma once
// Transcendental kernels written against the pack interface in pack.hpp.
// Each function performs the same IEEE operations in every lane, so the
// scalar (Pack1) and AVX2 (Pack4) instantiations agree bit-for-bit. That
// property is what makes the runtime kernel dispatch transparent: results
// never depend on which instruction set happened to be selected.
//
// Accuracy is a few ulp, which the unit tests pin against libm. Domains are
// the ones the simulator needs: log on (0, inf), exp on [-745, 709], sincos
// for |x| <= 2^20 (argument reduction uses a two-term Cody-Waite split),
// tanh everywhere.

#include <limits>

#include "disdrift/kernels/pack.hpp"

namespace disdrift::kern {

namespace detail {

template <class P, std::size_t N>
inline P horner(P w, const double (&coeff)[N]) {
  // coeff holds c[deg], ..., c[0] (highest power first)
  P acc = P::broadcast(coeff[0]);
  for (std::size_t i = 1; i < N; ++i) acc = fmadd(acc, w, P::broadcast(coeff[i]));
  return acc;
}

inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kInvLn2 = 1.44269504088896338700e+00;
inline constexpr double kPio2Hi = 1.57079632673412561417e+00;  // 33 bits of pi/2
inline constexpr double kPio2Lo = 6.07710050650619224932e-11;
inline constexpr double kTwoOverPi = 6.36619772367581382433e-01;

}  // namespace detail

// Natural log for positive finite x.
template <class P>
inline P log_positive(P x) {
  using detail::horner;
  P mant, expo;
  split_exponent(x, mant, expo);
  // Pull mantissa into (sqrt(1/2), sqrt(2)] so the atanh series converges fast.
  auto hi = cmp_gt(mant, P::broadcast(1.4142135623730951));
  mant = blend(hi, mant * P::broadcast(0.5), mant);
  expo = blend(hi, expo + P::broadcast(1.0), expo);

  // log(m) = 2 atanh(s), s = (m-1)/(m+1), |s| <= 0.1716
  P s = (mant - P::broadcast(1.0)) / (mant + P::broadcast(1.0));
  P w = s * s;
  static const double kAtanh[] = {
      1.0 / 23, 1.0 / 21, 1.0 / 19, 1.0 / 17, 1.0 / 15, 1.0 / 13,
      1.0 / 11, 1.0 / 9,  1.0 / 7,  1.0 / 5,  1.0 / 3,  1.0,
  };
  P series = (s + s) * horner(w, kAtanh);
  // expo * kLn2Hi is exact (integer times a 42-bit constant); add small parts first.
  return expo * P::broadcast(detail::kLn2Hi) +
         fmadd(expo, P::broadcast(detail::kLn2Lo), series);
}

// exp(x) for |x| within the double range; saturates to 0 / +inf outside.
template <class P>
inline P exp_pack(P x) {
  using detail::horner;
  P k = round_nearest(x * P::broadcast(detail::kInvLn2));
  // Keep 2^k representable; the saturation blends below fix the extremes.
  k = min(max(k, P::broadcast(-1021.0)), P::broadcast(1021.0));
  P r = fmadd(-k, P::broadcast(detail::kLn2Hi), x);
  r = fmadd(-k, P::broadcast(detail::kLn2Lo), r);
  // Taylor series of exp on |r| <= ln2/2; degree 14 reaches ~1e-17 relative.
  static const double kExpTaylor[] = {
      1.0 / 87178291200.0, 1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0,
      1.0 / 3628800.0,     1.0 / 362880.0,     1.0 / 40320.0,     1.0 / 5040.0,
      1.0 / 720.0,         1.0 / 120.0,        1.0 / 24.0,        1.0 / 6.0,
      0.5,                 1.0,                1.0,
  };
  P er = horner(r, kExpTaylor);
  P result = er * exp2_int(k);
  result = blend(cmp_gt(x, P::broadcast(709.782712893384)),
                 P::broadcast(std::numeric_limits<double>::infinity()), result);
  result = blend(cmp_lt(x, P::broadcast(-745.2)), P::broadcast(0.0), result);
  return result;
}

// Simultaneous sin and cos. Valid for |x| <= 2^20 (enough for coefficient
// evaluation and for Box-Muller angles in [0, 2pi)).
template <class P>
inline void sincos_pack(P x, P& sin_out, P& cos_out) {
  using detail::horner;
  P q = round_nearest(x * P::broadcast(detail::kTwoOverPi));
  P r = fmadd(-q, P::broadcast(detail::kPio2Hi), x);
  r = fmadd(-q, P::broadcast(detail::kPio2Lo), r);

  P w = r * r;
  static const double kSin[] = {
      -1.0 / 1307674368000.0, 1.0 / 6227020800.0, -1.0 / 39916800.0, 1.0 / 362880.0,
      -1.0 / 5040.0,          1.0 / 120.0,        -1.0 / 6.0,        1.0,
  };
  static const double kCos[] = {
      1.0 / 20922789888000.0, -1.0 / 87178291200.0, 1.0 / 479001600.0, -1.0 / 3628800.0,
      1.0 / 40320.0,          -1.0 / 720.0,         1.0 / 24.0,        -0.5,
  };
  P s = r * horner(w, kSin);
  P c = fmadd(w, horner(w, kCos), P::broadcast(1.0));

  typename P::mask_type bit0, bit1;
  quadrant_bits(q, bit0, bit1);
  // quadrant n = q mod 4: sin -> (s, c, -s, -c), cos -> (c, -s, -c, s)
  sin_out = negate_where(bit1, blend(bit0, c, s));
  auto flip = (bit0 | bit1) & ~(bit0 & bit1);  // quadrants 1 and 2
  cos_out = negate_where(flip, blend(bit0, s, c));
}

// tanh(x), odd, saturating to +-1 for |x| > 20.
template <class P>
inline P tanh_pack(P x) {
  using detail::horner;
  P ax = abs(x);
  // Small branch: odd Taylor series through x^15, exact enough below 1/8.
  P w = x * x;
  static const double kTanhTaylor[] = {
      -929569.0 / 638512875.0, 21844.0 / 6081075.0, -1382.0 / 155925.0, 62.0 / 2835.0,
      -17.0 / 315.0,           2.0 / 15.0,          -1.0 / 3.0,         1.0,
  };
  P small = x * horner(w, kTanhTaylor);
  // Large branch: tanh|x| = em / (em + 2), em = exp(2|x|) - 1.
  P em = exp_pack(ax + ax) - P::broadcast(1.0);
  P big = copysign_pack(em / (em + P::broadcast(2.0)), x);
  P result = blend(cmp_lt(ax, P::broadcast(0.125)), small, big);
  return blend(cmp_gt(ax, P::broadcast(20.0)), copysign_pack(P::broadcast(1.0), x), result);
}

}  // namespace disdrift::kern
