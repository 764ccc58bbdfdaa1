#pragma once

// Double-double arithmetic: an unevaluated sum of two doubles giving ~32
// significant digits.  Only the operations needed by the closed-form scalar
// kernels are provided (+, -, *, /, sqrt, exp, integer powers).

#include <cmath>
#include <cstdlib>

namespace gridfield {

struct dd {
  double hi = 0.0;
  double lo = 0.0;

  dd() = default;
  dd(double h) : hi(h), lo(0.0) {}
  dd(double h, double l) : hi(h), lo(l) {}
};

namespace dd_detail {

inline double two_sum(double a, double b, double& err) {
  double s = a + b;
  double bb = s - a;
  err = (a - (s - bb)) + (b - bb);
  return s;
}

// requires |a| >= |b| (or a == 0)
inline double quick_two_sum(double a, double b, double& err) {
  double s = a + b;
  err = b - (s - a);
  return s;
}

inline double two_prod(double a, double b, double& err) {
  double p = a * b;
  err = std::fma(a, b, -p);
  return p;
}

}  // namespace dd_detail

inline dd operator+(const dd& a, const dd& b) {
  using namespace dd_detail;
  double e1, e2;
  double s1 = two_sum(a.hi, b.hi, e1);
  double s2 = two_sum(a.lo, b.lo, e2);
  e1 += s2;
  s1 = quick_two_sum(s1, e1, e1);
  e1 += e2;
  s1 = quick_two_sum(s1, e1, e1);
  return dd(s1, e1);
}

inline dd operator-(const dd& a) { return dd(-a.hi, -a.lo); }
inline dd operator-(const dd& a, const dd& b) { return a + (-b); }

inline dd operator*(const dd& a, const dd& b) {
  using namespace dd_detail;
  double e;
  double p = two_prod(a.hi, b.hi, e);
  e += a.hi * b.lo + a.lo * b.hi;
  p = quick_two_sum(p, e, e);
  return dd(p, e);
}

inline dd operator/(const dd& a, const dd& b) {
  using namespace dd_detail;
  double q1 = a.hi / b.hi;
  dd r = a - b * dd(q1);
  double q2 = r.hi / b.hi;
  r = r - b * dd(q2);
  double q3 = r.hi / b.hi;
  double e;
  double s = quick_two_sum(q1, q2, e);
  dd q = dd(s, e) + dd(q3);
  return q;
}

inline dd operator+(const dd& a, double b) { return a + dd(b); }
inline dd operator+(double a, const dd& b) { return dd(a) + b; }
inline dd operator-(const dd& a, double b) { return a - dd(b); }
inline dd operator-(double a, const dd& b) { return dd(a) - b; }
inline dd operator*(const dd& a, double b) { return a * dd(b); }
inline dd operator*(double a, const dd& b) { return dd(a) * b; }
inline dd operator/(const dd& a, double b) { return a / dd(b); }
inline dd operator/(double a, const dd& b) { return dd(a) / b; }

inline bool operator<(const dd& a, const dd& b) {
  return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo);
}
inline bool operator>(const dd& a, const dd& b) { return b < a; }

inline double to_double(const dd& a) { return a.hi + a.lo; }
inline double to_double(double a) { return a; }

inline dd dd_abs(const dd& a) { return a.hi < 0.0 ? -a : a; }

inline dd dd_sqrt(const dd& a) {
  if (a.hi == 0.0) return dd(0.0);
  double x = 1.0 / std::sqrt(a.hi);
  double ax = a.hi * x;
  dd err = a - dd(ax) * dd(ax);
  return dd(ax) + dd(err.hi * (x * 0.5));
}

inline dd dd_exp(const dd& a) {
  // exp(a) = 2^m * exp(r),  r = a - m*ln2, |r| <= ln2/2
  static const dd LN2(6.931471805599452862e-01, 2.319046813846299558e-17);
  if (a.hi > 709.0) return dd(HUGE_VAL);
  if (a.hi < -709.0) return dd(0.0);
  double m = std::floor(a.hi / LN2.hi + 0.5);
  dd r = a - LN2 * m;
  // Taylor series; |r| <= 0.35 so ~26 terms reach 1e-33
  dd sum(1.0);
  dd term(1.0);
  for (int k = 1; k <= 26; ++k) {
    term = term * r / double(k);
    sum = sum + term;
    if (std::fabs(term.hi) < 1e-35 * std::fabs(sum.hi)) break;
  }
  return sum * dd(std::ldexp(1.0, int(m)));
}

inline dd dd_pow_int(dd base, long k) {
  if (k < 0) return dd(1.0) / dd_pow_int(base, -k);
  dd result(1.0);
  while (k > 0) {
    if (k & 1) result = result * base;
    base = base * base;
    k >>= 1;
  }
  return result;
}

inline double pow_int(double base, long k) {
  if (k < 0) return 1.0 / pow_int(base, -k);
  double result = 1.0;
  while (k > 0) {
    if (k & 1) result *= base;
    base *= base;
    k >>= 1;
  }
  return result;
}

inline dd pow_int(const dd& base, long k) { return dd_pow_int(base, k); }

}  // namespace gridfield
