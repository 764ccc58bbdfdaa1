#pragma once

// Sign-tracked log-space scalar.  Determinants here scale like
// w^(3n-4) * c^n and leave the double range past n ~ 120, so products and
// sums are carried as (sign, log|value|) pairs combined with log-sum-exp.

#include <cmath>
#include <limits>

namespace gridfield {

struct SignedLog {
  int sign = 0;  // -1, 0, +1
  double log_mag = -std::numeric_limits<double>::infinity();

  SignedLog() = default;
  SignedLog(int s, double lm) : sign(s), log_mag(lm) {
    if (s == 0) log_mag = -std::numeric_limits<double>::infinity();
  }

  static SignedLog zero() { return SignedLog(); }
  static SignedLog one() { return SignedLog(1, 0.0); }

  static SignedLog from_value(double v) {
    if (v == 0.0) return zero();
    return SignedLog(v > 0.0 ? 1 : -1, std::log(std::fabs(v)));
  }

  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_mag); }
  bool is_zero() const { return sign == 0; }

  SignedLog operator-() const { return SignedLog(-sign, log_mag); }

  SignedLog pow(long k) const {
    if (sign == 0) return k == 0 ? one() : zero();
    int s = (sign < 0 && (k & 1)) ? -1 : 1;
    return SignedLog(s, log_mag * double(k));
  }
};

inline SignedLog operator*(const SignedLog& a, const SignedLog& b) {
  if (a.sign == 0 || b.sign == 0) return SignedLog::zero();
  return SignedLog(a.sign * b.sign, a.log_mag + b.log_mag);
}

inline SignedLog operator/(const SignedLog& a, const SignedLog& b) {
  if (a.sign == 0) return SignedLog::zero();
  return SignedLog(a.sign * b.sign, a.log_mag - b.log_mag);
}

inline SignedLog operator+(const SignedLog& a, const SignedLog& b) {
  if (a.sign == 0) return b;
  if (b.sign == 0) return a;
  const SignedLog& big = a.log_mag >= b.log_mag ? a : b;
  const SignedLog& small = a.log_mag >= b.log_mag ? b : a;
  double delta = small.log_mag - big.log_mag;  // <= 0
  if (a.sign == b.sign)
    return SignedLog(a.sign, big.log_mag + std::log1p(std::exp(delta)));
  double t = std::exp(delta);
  if (t >= 1.0) return SignedLog::zero();  // exact cancellation
  return SignedLog(big.sign, big.log_mag + std::log1p(-t));
}

inline SignedLog operator-(const SignedLog& a, const SignedLog& b) {
  return a + (-b);
}

}  // namespace gridfield
