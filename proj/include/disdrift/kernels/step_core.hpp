#pragma once
// Templated kernel bodies shared by the scalar and AVX2 translation units.
// Everything here is a pure per-lane map over a pack type P, so Pack1 and
// Pack4 instantiations agree bit-for-bit lane by lane. Reductions (dot,
// offset sums) fix a 4-accumulator order independent of the pack width.

#include <cstddef>

#include "disdrift/kernels/kernels.hpp"
#include "disdrift/kernels/vecmath.hpp"

namespace disdrift::kern {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// ---------------------------------------------------------------------------
// Box-Muller
// ---------------------------------------------------------------------------

// One pair: (z0, z1) = r*(cos, sin), r = sqrt(-2 ln u1), angle = 2 pi u2.
template <class P>
inline void box_muller_pair(P u1, P u2, P& z0, P& z1) {
  P r = sqrt(P::broadcast(-2.0) * log_positive(u1));
  P s, c;
  sincos_pack(u2 * P::broadcast(kTwoPi), s, c);
  z0 = r * c;
  z1 = r * s;
}

// ---------------------------------------------------------------------------
// Coefficient evaluation
// ---------------------------------------------------------------------------

template <class P>
inline P eval_poly(const double* coeff, int len, P x) {
  P acc = P::broadcast(coeff[len - 1]);
  for (int i = len - 2; i >= 0; --i) acc = fmadd(acc, x, P::broadcast(coeff[i]));
  return acc;
}

template <class P>
inline P eval_drift_pack(const StepProgram& g, P x) {
  P res = eval_poly<P>(g.pieces, g.piece_len, x);
  for (int k = 0; k < g.m; ++k) {
    P pk = eval_poly<P>(g.pieces + (k + 1) * g.piece_len, g.piece_len, x);
    P z = P::broadcast(g.zeta[k]);
    res = blend(cmp_gt(x, z), pk, res);
    res = blend(cmp_eq(x, z), P::broadcast(g.bval[k]), res);
  }
  return res;
}

template <class P>
inline void eval_sigma_pair(const StepProgram& g, P x, P& s, P& sp) {
  switch (g.sigma_kind) {
    case 0:
      s = P::broadcast(g.s0);
      sp = P::broadcast(0.0);
      break;
    case 1:
      s = fmadd(P::broadcast(g.s1), x, P::broadcast(g.s0));
      sp = P::broadcast(g.s1);
      break;
    case 2:
      s = eval_poly<P>(g.sigma_coeffs, g.sigma_len, x);
      sp = g.sigma_len > 1 ? eval_poly<P>(g.sigma_dcoeffs, g.sigma_len - 1, x)
                           : P::broadcast(0.0);
      break;
    case 3: {
      P sn, cs;
      sincos_pack(P::broadcast(g.s2) * x, sn, cs);
      s = fmadd(P::broadcast(g.s1), sn, P::broadcast(g.s0));
      sp = P::broadcast(g.s1 * g.s2) * cs;
      break;
    }
    default: {
      P t = tanh_pack(P::broadcast(g.s2) * x);
      s = fmadd(P::broadcast(g.s1), t, P::broadcast(g.s0));
      sp = P::broadcast(g.s1 * g.s2) * fmadd(-t, t, P::broadcast(1.0));
      break;
    }
  }
}

// ---------------------------------------------------------------------------
// Transform bump: phi(u) = u |u| (1 - |u|/c)^3 on |u| <= c
// ---------------------------------------------------------------------------

// phi and its first two derivatives, with phi'' taking the right-hand value
// at u = 0. Exactly zero outside the support.
template <class P>
inline void bump_eval(P u, double c, P& phi, P& dphi, P& d2phi) {
  P au = abs(u);
  P s = au * P::broadcast(1.0 / c);
  P t = P::broadcast(1.0) - s;
  P t2 = t * t;
  P t3 = t2 * t;
  phi = u * au * t3;
  dphi = au * t2 * fmadd(P::broadcast(-3.0), s, t + t);  // |u| t^2 (2t - 3s)
  // sign(u) (2t^3 - 12 s t^2 + 6 s^2 t); sign(0) := +1 (right-hand limit)
  P mag = fmadd(P::broadcast(6.0) * s * s, t,
                fmadd(P::broadcast(-12.0) * s, t2, t3 + t3));
  P sg = blend(cmp_lt(u, P::broadcast(0.0)), P::broadcast(-1.0), P::broadcast(1.0));
  d2phi = sg * mag;
  auto outside = cmp_ge(au, P::broadcast(c));
  P zero = P::broadcast(0.0);
  phi = blend(outside, zero, phi);
  dphi = blend(outside, zero, dphi);
  d2phi = blend(outside, zero, d2phi);
}

// G'(x) and G''(x) summed over all bumps (right-hand G'' at breakpoints).
template <class P>
inline void transform_derivs(const StepProgram& g, P x, P& gp, P& gpp) {
  gp = P::broadcast(1.0);
  gpp = P::broadcast(0.0);
  for (int k = 0; k < g.m; ++k) {
    P phi, dphi, d2phi;
    bump_eval(x - P::broadcast(g.zeta[k]), g.csup[k], phi, dphi, d2phi);
    P a = P::broadcast(g.alpha[k]);
    gp = fmadd(a, dphi, gp);
    gpp = fmadd(a, d2phi, gpp);
  }
}

template <class P>
inline P apply_transform(const StepProgram& g, P x) {
  P z = x;
  for (int k = 0; k < g.m; ++k) {
    P phi, dphi, d2phi;
    bump_eval(x - P::broadcast(g.zeta[k]), g.csup[k], phi, dphi, d2phi);
    z = fmadd(P::broadcast(g.alpha[k]), phi, z);
  }
  return z;
}

// G^{-1}(z): per-breakpoint bracketed Newton with bisection safeguard on
// [zeta - c, zeta + c] (supports are disjoint, so within one support only
// that bump contributes). Identity outside all supports. Returns false on
// non-convergence after 200 iterations.
template <class P>
inline bool invert_transform(const StepProgram& g, P z, P& x_out) {
  P x = z;
  for (int k = 0; k < g.m; ++k) {
    double zeta = g.zeta[k], c = g.csup[k];
    P lo0 = P::broadcast(zeta - c), hi0 = P::broadcast(zeta + c);
    auto in_support = cmp_gt(z, lo0) & cmp_lt(z, hi0);
    if (!any(in_support)) continue;

    P a = P::broadcast(g.alpha[k]);
    P tol = P::broadcast(1e-12) * (P::broadcast(1.0) + abs(z));
    P lo = lo0, hi = hi0;
    P xk = z;  // initial guess: G is identity-plus-bump, z is close
    auto done = ~in_support;
    bool converged = false;
    for (int it = 0; it < 200; ++it) {
      P phi, dphi, d2phi;
      bump_eval(xk - P::broadcast(zeta), c, phi, dphi, d2phi);
      P r = fmadd(a, phi, xk - z);          // G(x) - z, cancellation-safe
      P gp = fmadd(a, dphi, P::broadcast(1.0));
      done = done | cmp_le(abs(r), tol);
      if (all(done)) {
        converged = true;
        break;
      }
      // Maintain the bracket for lanes still iterating.
      auto pos = cmp_gt(r, P::broadcast(0.0)) & ~done;
      auto neg = cmp_le(r, P::broadcast(0.0)) & ~done;
      hi = blend(pos, xk, hi);
      lo = blend(neg, xk, lo);
      P xn = xk - r / gp;
      auto out = cmp_le(xn, lo) | cmp_ge(xn, hi);
      xn = blend(out, P::broadcast(0.5) * (lo + hi), xn);
      xk = blend(done, xk, xn);
    }
    if (!converged) return false;
    x = blend(in_support, xk, x);
  }
  x_out = x;
  return true;
}

// ---------------------------------------------------------------------------
// Single steps (shared by the blocked runner and the per-path trajectories)
// ---------------------------------------------------------------------------

// One EM/Milstein step in x-coordinates.
template <class P>
inline P fixed_step_plain(const StepProgram& g, P x, P dt, P dw) {
  P mu = eval_drift_pack(g, x);
  P s, sp;
  eval_sigma_pair(g, x, s, sp);
  P next = x + fmadd(s, dw, mu * dt);
  if (g.use_milstein)
    next = next + P::broadcast(0.5) * s * sp * fmadd(dw, dw, -dt);
  return next;
}

// One EM/Milstein step of the Z-equation; z is advanced in place. Returns
// false when the inversion back to x-coordinates fails.
template <class P>
inline bool fixed_step_transformed(const StepProgram& g, P& z, P dt, P dw) {
  P x;
  if (!invert_transform(g, z, x)) return false;
  P half = P::broadcast(0.5);
  P mu = eval_drift_pack(g, x);
  P s, sp;
  eval_sigma_pair(g, x, s, sp);
  P gp, gpp;
  transform_derivs(g, x, gp, gpp);
  P mu_t = fmadd(half * gpp, s * s, gp * mu);
  P sig_t = gp * s;
  P next = z + fmadd(sig_t, dw, mu_t * dt);
  if (g.use_milstein) {
    P corr = s * fmadd(gpp, s, gp * sp);  // sigma~ sigma~' in x-coordinates
    next = next + half * corr * fmadd(dw, dw, -dt);
  }
  z = next;
  return true;
}

// ---------------------------------------------------------------------------
// Blocked fixed-grid stepping
// ---------------------------------------------------------------------------

template <class P>
inline P min_dist_to_breakpoints(const StepProgram& g, P x, P current) {
  for (int k = 0; k < g.m; ++k)
    current = min(current, abs(x - P::broadcast(g.zeta[k])));
  return current;
}

template <class P>
inline bool run_fixed_block_impl(const StepProgram& g, const double* inc,
                                 std::size_t n_steps, double dt, const double* x0,
                                 double* out_terminal, double* out_min_dist) {
  P dtp = P::broadcast(dt);
  P state = P::load(x0);  // x for plain schemes, z = G(x) for transformed
  if (g.transformed) state = apply_transform(g, state);
  P mind = P::broadcast(0.0);
  if (g.track_min_dist)
    mind = min_dist_to_breakpoints(g, P::load(x0),
                                   P::broadcast(std::numeric_limits<double>::infinity()));

  for (std::size_t j = 0; j < n_steps; ++j) {
    P dw = P::load(inc + j * static_cast<std::size_t>(P::width));
    if (!g.transformed) {
      state = fixed_step_plain(g, state, dtp, dw);
      if (g.track_min_dist) mind = min_dist_to_breakpoints(g, state, mind);
    } else {
      if (!fixed_step_transformed(g, state, dtp, dw)) return false;
    }
  }

  if (g.transformed) {
    P x;
    if (!invert_transform(g, state, x)) return false;
    state = x;
  }
  state.store(out_terminal);
  if (g.track_min_dist && out_min_dist) mind.store(out_min_dist);
  return true;
}

// ---------------------------------------------------------------------------
// Reductions with a width-independent accumulation order
// ---------------------------------------------------------------------------

// Both instantiations accumulate into four bins: bin (i mod 4) takes element
// i of the main loop; the tail is added to bin 0 in order. Final reduce is
// ((b0 + b1) + (b2 + b3)).
template <class P>
inline double dot_impl(const double* a, const double* b, std::size_t n) {
  double bins[4] = {0, 0, 0, 0};
  std::size_t quads = n / 4;
  if constexpr (P::width == 4) {
    P acc = P::broadcast(0.0);
    for (std::size_t q = 0; q < quads; ++q)
      acc = fmadd(P::load(a + 4 * q), P::load(b + 4 * q), acc);
    acc.store(bins);
  } else {
    for (std::size_t q = 0; q < quads; ++q)
      for (int l = 0; l < 4; ++l)
        bins[l] = std::fma(a[4 * q + l], b[4 * q + l], bins[l]);
  }
  double tail = 0.0;
  for (std::size_t i = quads * 4; i < n; ++i) tail = std::fma(a[i], b[i], tail);
  return ((bins[0] + bins[1]) + (bins[2] + bins[3])) + tail;
}

template <class P>
inline double offset_cross_sum_impl(const double* c, const double* s, std::size_t n,
                                    std::size_t d) {
  if (d >= n) return 0.0;
  std::size_t len = n - d;
  double bins[4] = {0, 0, 0, 0};
  std::size_t quads = len / 4;
  if constexpr (P::width == 4) {
    P acc = P::broadcast(0.0);
    P two = P::broadcast(2.0);
    for (std::size_t q = 0; q < quads; ++q) {
      P dc = P::load(c + 4 * q) - P::load(c + 4 * q + d);
      P ds = P::load(s + 4 * q) - P::load(s + 4 * q + d);
      acc = fmadd(dc, fmadd(two, ds, dc), acc);
    }
    acc.store(bins);
  } else {
    for (std::size_t q = 0; q < quads; ++q)
      for (int l = 0; l < 4; ++l) {
        std::size_t i = 4 * q + l;
        double dc = c[i] - c[i + d];
        double ds = s[i] - s[i + d];
        bins[l] = std::fma(dc, std::fma(2.0, ds, dc), bins[l]);
      }
  }
  double tail = 0.0;
  for (std::size_t i = quads * 4; i < len; ++i) {
    double dc = c[i] - c[i + d];
    double ds = s[i] - s[i + d];
    tail = std::fma(dc, std::fma(2.0, ds, dc), tail);
  }
  return ((bins[0] + bins[1]) + (bins[2] + bins[3])) + tail;
}

}  // namespace disdrift::kern
