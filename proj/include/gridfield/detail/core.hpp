#pragma once

// Shared scalar core for the closed-form determinant/cofactor/inverse
// machinery.  Everything downstream (determinants, cofactors, inverse
// entries, approximations) is a rational function of these quantities.
//
// Several of them (tau(-1), a - 2*tau(-1)*u, the discriminant, the hatted
// and tilded tau values) are O(w^3) or O(w^6) differences of O(1) operands.
// To keep the plain-double path usable near the crossover, every such
// difference is regrouped around x = 1 - u^2 = -expm1(-2w) and
// x - 2w = O(w^2), which removes the leading cancellations; the same
// algebra is evaluated in double-double arithmetic for the wide path.

#include <gridfield/dd.hpp>
#include <gridfield/kernel.hpp>

#include <cmath>
#include <stdexcept>

namespace gridfield::detail {

inline double real_exp(double x) { return std::exp(x); }
inline dd real_exp(const dd& x) { return dd_exp(x); }
inline double real_sqrt(double x) { return std::sqrt(x); }
inline dd real_sqrt(const dd& x) { return dd_sqrt(x); }

// 1 - u^2 = 1 - e^{-2w} without cancellation.
inline double one_minus_u2(double w, double /*u2*/) {
  return -std::expm1(-2.0 * w);
}
inline dd one_minus_u2(const dd& /*w*/, const dd& u2) { return dd(1.0) - u2; }

template <class Real>
struct Core {
  int n = 0;
  Real w, u, u2, u3, u4, u5, u6;
  Real x;                   // 1 - u^2, in (0, 1)
  Real xm2w;                // x - 2w = -2w^2 + O(w^3), negative for small w
  Real tau_m1;              // tau(-1), positive
  Real a, b, at, bt;        // quartic coefficients; at/bt are the tilded pair
  Real a2t;                 // a - 2*tau(-1)*u
  Real bpt;                 // b + tau(-1)*u  (equals tau(-1)/u identically)
  Real disc, sdisc;
  Real alpha1, alpha2;      // both negative, |alpha1| > |alpha2|
  Real alpha_diff;          // alpha1 - alpha2, negative
  Real L1, L2;              // -bpt*alpha_i, positive, L1 > L2
  Real P1, P2;              // at*alpha_i + u2*bt
  Real G1, G2;              // a*alpha_i + u2*b
  Real den1, den2;          // bpt*alpha_i - tau_m1*u, both negative
  Real r;                   // alpha2/alpha1 = L2/L1, in (0,1)
  Real s;                   // u/alpha1, negative, |s| < 1
  Real th_m2, th_m1, th_0, th_1;   // tau_hat at k = -2..1
  Real tt_m2, tt_m1, tt_0;         // tau_tilde at k = -2..0
  Real ts_0, ts_1;                 // tau_star at k = 0, 1
  Real tau_0;
  Real K3;                  // tt_m2*((1+2w)^2 u^4 - 1) + tt_m1*ts_1
  Real C[8][3];             // C[k][i], k = 1..7, i = 1..2
};

// General-index tau brackets: tau_X(k) = u^k * bracket(k) for k >= 0,
// which keeps u^k out of the bracket so log magnitudes stay exact.
// Each bracket is written in powers of x with the O(w^2) piece isolated
// in xm2w.

template <class Real>
Real tau_bracket(const Core<Real>& c, long k) {
  // (1+kw) - 2(1+(k+1)w)u^2 + (1+(k+2)w)u^4 = x(xm2w + (k+2)w x)
  return c.x * (c.xm2w + Real(double(k) + 2.0) * c.w * c.x);
}

template <class Real>
Real tau_star_bracket(const Core<Real>& c, long k) {
  // (1+kw) - (1+w)(1+(k+1)w)u^2 = D x - w(2 + (k+1)w)
  Real kp1w = Real(double(k) + 1.0) * c.w;
  Real D = (Real(1.0) + c.w) * (Real(1.0) + kp1w);
  return D * c.x - c.w * (Real(2.0) + kp1w);
}

template <class Real>
Real tau_hat_bracket(const Core<Real>& c, long k) {
  // (1+kw) - 3(1+(k+2)w)u^4 + 2(1+(k+3)w)u^6
  //   = 3x(x-2w) + 3(k+4)w x^2 - 2(1+(k+3)w) x^3
  Real x2 = c.x * c.x;
  return Real(3.0) * c.x * c.xm2w +
         Real(3.0 * (double(k) + 4.0)) * c.w * x2 -
         Real(2.0) * (Real(1.0) + Real(double(k) + 3.0) * c.w) * x2 * c.x;
}

template <class Real>
Real tau_tilde_bracket(const Core<Real>& c, long k) {
  // [2(1+kw) - 3(1+(k+1)w)u^2 + (1+(k+3)w)u^6] / 2
  //   = [3x(x-2w) + 3(k+3)w x^2 - (1+(k+3)w) x^3] / 2
  Real x2 = c.x * c.x;
  Real kp3w = Real(double(k) + 3.0) * c.w;
  return (Real(3.0) * c.x * c.xm2w + Real(3.0) * kp3w * x2 -
          (Real(1.0) + kp3w) * x2 * c.x) /
         Real(2.0);
}

template <class Real>
Core<Real> compute_core(double theta, int n) {
  Core<Real> c;
  c.n = n;
  Real w = Real(theta) / Real(double(n));
  Real u = real_exp(-w);
  Real u2 = u * u, u3 = u2 * u, u4 = u2 * u2, u5 = u4 * u, u6 = u4 * u2;
  c.w = w; c.u = u; c.u2 = u2; c.u3 = u3; c.u4 = u4; c.u5 = u5; c.u6 = u6;

  Real one(1.0);
  c.x = one_minus_u2(w, u2);
  c.xm2w = c.x - Real(2.0) * w;

  // inner = (x - 2w) + w x = -tau(-1)/u = -(b + tau(-1)u), O(w^3)
  Real inner = c.xm2w + w * c.x;
  c.tau_m1 = -u * inner;
  c.a = c.x * (inner + w * c.x);          // x(xm2w + 2w x)
  c.b = -c.x * inner;
  c.at = c.x - w * u2 * (Real(2.0) + w);
  c.bt = -inner;
  c.a2t = (Real(2.0) - c.x) * inner + w * c.x * c.x;
  c.bpt = -inner;
  c.disc = c.a2t * c.a2t - Real(4.0) * c.tau_m1 * u * c.bpt;
  if (!(to_double(c.disc) > 0.0))
    throw std::runtime_error("degenerate discriminant in root computation");
  c.sdisc = real_sqrt(c.disc);

  // L1 = (a2t + sdisc)/2 has no cancellation (both positive);
  // L2 comes from the product L1*L2 = bpt * tau(-1) * u.
  c.L1 = (c.a2t + c.sdisc) / Real(2.0);
  c.L2 = c.bpt * c.tau_m1 * u / c.L1;
  c.alpha1 = -c.L1 / c.bpt;
  c.alpha2 = -c.L2 / c.bpt;
  c.alpha_diff = -c.sdisc / c.bpt;
  c.r = c.L2 / c.L1;
  c.s = u / c.alpha1;

  c.P1 = c.at * c.alpha1 + u2 * c.bt;
  c.P2 = c.at * c.alpha2 + u2 * c.bt;
  c.G1 = c.a * c.alpha1 + u2 * c.b;
  c.G2 = c.a * c.alpha2 + u2 * c.b;
  c.den1 = -c.L1 - c.tau_m1 * u;
  c.den2 = -c.L2 - c.tau_m1 * u;

  c.th_m2 = Real(2.0) * c.tau_m1 * u;
  // (1+w) - 3(1+w)u^2 + 2(1+2w)u^4 = -(x-2w) - 5w x + 2(1+2w)x^2
  c.th_m1 = u * (-c.xm2w - Real(5.0) * w * c.x +
                 Real(2.0) * (one + Real(2.0) * w) * c.x * c.x);
  c.th_0 = tau_hat_bracket(c, 0);
  c.th_1 = u * tau_hat_bracket(c, 1);
  c.tt_m2 = c.tau_m1 * u / Real(2.0);
  // (2w-1) + (1+2w)u^4 = -2(x-2w) - 4w x + (1+2w)x^2
  c.tt_m1 = u * (Real(-2.0) * c.xm2w - Real(4.0) * w * c.x +
                 (one + Real(2.0) * w) * c.x * c.x) / Real(2.0);
  c.tt_0 = tau_tilde_bracket(c, 0);
  c.ts_0 = tau_star_bracket(c, 0);
  c.ts_1 = u * tau_star_bracket(c, 1);
  c.tau_0 = tau_bracket(c, 0);

  // (1+2w)^2 u^4 - 1 = (E-1)(E+1) with E-1 = -(xm2w + 2w x)
  Real Em1 = -(c.xm2w + Real(2.0) * w * c.x);
  c.K3 = c.tt_m2 * Em1 * (Em1 + Real(2.0)) + c.tt_m1 * c.ts_1;

  // Bracket polynomials shared by the Appendix constants:
  // q1 = (1-u^2)^2, q2 = 2-3u^2+u^6 = x^2(u^2+2),
  // q3 = 1-3u^4+2u^6 = x^2(2u^2+1),
  // br_j = w(j - (2j+2)u^2 + (j+2)u^4) + q1 = x(xm2w + (j+2)w x).
  Real q1 = c.x * c.x;
  Real q2 = q1 * (u2 + Real(2.0));
  Real q3 = q1 * (Real(2.0) * u2 + one);
  Real br1 = c.x * (c.xm2w + Real(3.0) * w * c.x);
  Real br2 = c.x * (c.xm2w + Real(4.0) * w * c.x);
  Real br3 = c.x * (c.xm2w + Real(5.0) * w * c.x);

  for (int i = 1; i <= 2; ++i) {
    Real den = (i == 1) ? c.den1 : c.den2;
    if (to_double(den) == 0.0)
      throw std::runtime_error("vanishing denominator in closed-form constants");
    Real den_sq = den * den;
    Real tm1 = c.tau_m1;

    c.C[1][i] = c.th_m2 * c.tt_0 * br2 / (tm1 * u2 * den)
              + w * c.th_m2 * c.tt_0 * q1 / (u * den_sq)
              + (c.th_0 * c.tt_0 - c.th_1 * c.tt_m1) / (tm1 * u4)
              - c.th_m2 * c.tt_m1 * br3 / (tm1 * u * den)
              - w * c.th_m2 * c.tt_m1 * q1 / den_sq;

    c.C[2][i] = w * c.th_m2 * q2 * br2 / (Real(2.0) * tm1 * u2 * den)
              + w * w * c.th_m2 * q2 * q1 / (Real(2.0) * u * den_sq)
              + w * c.th_0 * q2 / (Real(2.0) * tm1 * u4)
              - w * q1 * c.th_m2 * c.tt_m1 / (tm1 * u * den)
              - w * q3 * c.tt_m1 / (tm1 * u3);

    c.C[3][i] = c.th_m1 + c.th_m2 * u * br1 / den
              + w * tm1 * u2 * c.th_m2 * q1 / den_sq;

    c.C[4][i] = c.th_m1 * c.tt_0 / (tm1 * u4)
              + c.th_m2 * c.tt_0 * br1 / (tm1 * u3 * den)
              + w * c.th_m2 * c.tt_0 * q1 / (u2 * den_sq)
              - c.th_1 * c.tt_m2 / (tm1 * u4)
              - c.th_m2 * c.tt_m2 * br3 / (tm1 * u * den)
              - w * c.th_m2 * c.tt_m2 * q1 / den_sq;

    c.C[5][i] = w * c.th_m1 * q2 / (Real(2.0) * tm1 * u4)
              + w * c.th_m2 * q2 * br1 / (Real(2.0) * tm1 * u3 * den)
              + w * w * c.th_m2 * q2 * q1 / (Real(2.0) * u2 * den_sq)
              - w * c.th_m2 * c.tt_m2 * q1 / (tm1 * u * den)
              - w * q3 * c.tt_m2 / (tm1 * u3);

    c.C[6][i] = c.th_m1 * c.tt_m1 - c.th_0 * c.tt_m2
              + c.th_m2 * u * c.tt_m1 * br1 / den
              - c.th_m2 * c.tt_m2 * u2 * br2 / den
              + w * tm1 * u2 * c.th_m2 * (c.tt_m1 - u * c.tt_m2) * q1 / den_sq;

    c.C[7][i] = c.th_m2 * u2 * br2 / den
              + w * tm1 * c.th_m2 * u3 * q1 / den_sq
              + c.th_0;
  }
  return c;
}

inline Core<double> narrow(const Core<dd>& c) {
  Core<double> o;
  o.n = c.n;
  o.w = to_double(c.w); o.u = to_double(c.u);
  o.u2 = to_double(c.u2); o.u3 = to_double(c.u3); o.u4 = to_double(c.u4);
  o.u5 = to_double(c.u5); o.u6 = to_double(c.u6);
  o.x = to_double(c.x); o.xm2w = to_double(c.xm2w);
  o.tau_m1 = to_double(c.tau_m1);
  o.a = to_double(c.a); o.b = to_double(c.b);
  o.at = to_double(c.at); o.bt = to_double(c.bt);
  o.a2t = to_double(c.a2t); o.bpt = to_double(c.bpt);
  o.disc = to_double(c.disc); o.sdisc = to_double(c.sdisc);
  o.alpha1 = to_double(c.alpha1); o.alpha2 = to_double(c.alpha2);
  o.alpha_diff = to_double(c.alpha_diff);
  o.L1 = to_double(c.L1); o.L2 = to_double(c.L2);
  o.P1 = to_double(c.P1); o.P2 = to_double(c.P2);
  o.G1 = to_double(c.G1); o.G2 = to_double(c.G2);
  o.den1 = to_double(c.den1); o.den2 = to_double(c.den2);
  o.r = to_double(c.r); o.s = to_double(c.s);
  o.th_m2 = to_double(c.th_m2); o.th_m1 = to_double(c.th_m1);
  o.th_0 = to_double(c.th_0); o.th_1 = to_double(c.th_1);
  o.tt_m2 = to_double(c.tt_m2); o.tt_m1 = to_double(c.tt_m1);
  o.tt_0 = to_double(c.tt_0);
  o.ts_0 = to_double(c.ts_0); o.ts_1 = to_double(c.ts_1);
  o.tau_0 = to_double(c.tau_0);
  o.K3 = to_double(c.K3);
  for (int k = 1; k <= 7; ++k)
    for (int i = 1; i <= 2; ++i) o.C[k][i] = to_double(c.C[k][i]);
  return o;
}

// Crossover between plain and compensated evaluation.
constexpr double kWideCrossoverW = 1e-2;

}  // namespace gridfield::detail
