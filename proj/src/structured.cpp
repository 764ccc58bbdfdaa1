#include <gridfield/structured.hpp>
#include <gridfield/detail/canonical.hpp>
#include <gridfield/detail/core.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gridfield {

using detail::Core;

namespace {

bool wants_wide(const ScalarContext& ctx, CorePrecision prec) {
  if (prec == CorePrecision::wide) return true;
  if (prec == CorePrecision::plain) return false;
  return ctx.w < detail::kWideCrossoverW;
}

using detail::canonicalize;

void check_indices(const ScalarContext& ctx, int i, int j) {
  if (i < 1 || i > ctx.n || j < 1 || j > ctx.n)
    throw std::out_of_range("matrix index out of range");
}

// Scalar bundle shared by the log-space paths: compensated core plus its
// double image and a few cached logs.
struct Scalars {
  Core<dd> wc;
  Core<double> cd;
  double log_u;      // exactly -w
  double log_tau_m1;
  double log_L1, log_L2;

  explicit Scalars(const ScalarContext& ctx)
      : wc(detail::compute_core<dd>(ctx.theta, ctx.n)), cd(detail::narrow(wc)) {
    log_u = -cd.w;
    log_tau_m1 = std::log(cd.tau_m1);
    log_L1 = std::log(cd.L1);
    log_L2 = std::log(cd.L2);
  }

  // (1 + |q|w) u^{|q|}
  SignedLog poly(long q) const {
    double aq = std::abs(double(q));
    return SignedLog(1, std::log1p(aq * cd.w) + aq * log_u);
  }

  SignedLog from_bracket(const dd& br, long k) const {
    double b = to_double(br);
    if (b == 0.0) return SignedLog::zero();
    return SignedLog(b > 0.0 ? 1 : -1,
                     std::log(std::fabs(b)) + double(k) * log_u);
  }

  SignedLog tau(long k) const {
    if (k <= -2) return SignedLog::zero();
    if (k == -1) return SignedLog(1, log_tau_m1);
    return from_bracket(detail::tau_bracket(wc, k), k);
  }
  SignedLog tau_star(long k) const {
    if (k < 0) return SignedLog::zero();
    return from_bracket(detail::tau_star_bracket(wc, k), k);
  }
  SignedLog tau_hat(long k) const {
    if (k < -2) return SignedLog::zero();
    if (k == -2) return SignedLog::from_value(cd.th_m2);
    if (k == -1) return SignedLog::from_value(cd.th_m1);
    return from_bracket(detail::tau_hat_bracket(wc, k), k);
  }
  SignedLog tau_tilde(long k) const {
    if (k < -2) return SignedLog::zero();
    if (k == -2) return SignedLog::from_value(cd.tt_m2);
    if (k == -1) return SignedLog::from_value(cd.tt_m1);
    return from_bracket(detail::tau_tilde_bracket(wc, k), k);
  }

  SignedLog L1_pow(long e) const { return SignedLog(1, double(e) * log_L1); }
  SignedLog L2_pow(long e) const { return SignedLog(1, double(e) * log_L2); }
  SignedLog tau_m1_pow(long e) const {
    return SignedLog(1, double(e) * log_tau_m1);
  }
};

// |R_m| closed form; m >= 0.
SignedLog det_closed_m(const Scalars& S, int m) {
  if (m <= 1) return SignedLog::one();
  const Core<double>& c = S.cd;
  SignedLog num = SignedLog::from_value(c.P1) -
                  SignedLog::from_value(c.P2) *
                      SignedLog::from_value(c.r).pow(m - 2);
  return num / SignedLog::from_value(c.alpha_diff) * S.L1_pow(m - 2);
}

// Triangular-Toeplitz tau determinant appearing in the (2, n-1|n) minors.
SignedLog det_abar(const Scalars& S, int m) {
  if (m == 0) return SignedLog::one();
  const Core<double>& c = S.cd;
  SignedLog sa1 = SignedLog::from_value(c.alpha1);
  SignedLog sa2 = SignedLog::from_value(c.alpha2);
  SignedLog inner =
      SignedLog::from_value(c.a) * (sa1.pow(m) - sa2.pow(m)) +
      SignedLog(1, 2.0 * S.log_u) * SignedLog::from_value(c.b) *
          (sa1.pow(m - 1) - sa2.pow(m - 1));
  SignedLog sign(m % 2 == 0 ? -1 : 1, 0.0);
  return sign * SignedLog::from_value(c.bpt).pow(m - 1) * inner /
         SignedLog::from_value(c.alpha_diff);
}

// Common shape of the tridiagonal-band minors: four C-weighted terms with
// mixed L1/L2 powers, divided by (alpha1-alpha2)^2.  m is the minor size.
SignedLog banded_minor(const Scalars& S, int i, int m, double c1a, double c1b,
                       double c2a, double c2b) {
  const Core<double>& c = S.cd;
  SignedLog P1 = SignedLog::from_value(c.P1);
  SignedLog P2 = SignedLog::from_value(c.P2);
  SignedLog au1 = SignedLog::from_value(c.alpha1 - c.u2);
  SignedLog au2 = SignedLog::from_value(c.alpha2 - c.u2);
  SignedLog tu4 = SignedLog(1, S.log_tau_m1 + 4.0 * S.log_u);
  SignedLog tu6 = SignedLog(1, S.log_tau_m1 + 6.0 * S.log_u);
  SignedLog t1 = SignedLog::from_value(c1a) * tu4 * P1 *
                 (au1 * S.L1_pow(m - 4) -
                  au2 * S.L1_pow(i - 3) * S.L2_pow(m - i - 1));
  SignedLog t2 = SignedLog::from_value(c1b) * tu4 * P2 *
                 (au1 * S.L1_pow(m - i - 1) * S.L2_pow(i - 3) -
                  au2 * S.L2_pow(m - 4));
  SignedLog t3 = SignedLog::from_value(c2a) * tu6 * P1 *
                 (S.L1_pow(m - 4) - S.L1_pow(i - 3) * S.L2_pow(m - i - 1));
  SignedLog t4 = SignedLog::from_value(c2b) * tu6 * P2 *
                 (S.L1_pow(m - i - 1) * S.L2_pow(i - 3) - S.L2_pow(m - 4));
  SignedLog ad2 = SignedLog::from_value(c.alpha_diff).pow(2);
  return (t1 - t2 + t3 - t4) / ad2;
}

SignedLog corner_minor(const Scalars& S, int i, double ca, double cb) {
  // [C_a P1 L1^{i-3} - C_b P2 L2^{i-3}] / (alpha1 - alpha2)
  const Core<double>& c = S.cd;
  SignedLog num = SignedLog::from_value(ca) * SignedLog::from_value(c.P1) *
                      S.L1_pow(i - 3) -
                  SignedLog::from_value(cb) * SignedLog::from_value(c.P2) *
                      S.L2_pow(i - 3);
  return num / SignedLog::from_value(c.alpha_diff);
}

SignedLog cofactor_recurrence_canonical(const ScalarContext& ctx, int i,
                                        int j) {
  const int n = ctx.n;
  const int m = n - 1;
  Scalars S(ctx);

  auto A = [&](int k, int l) -> SignedLog {
    if (k >= l + 2) return SignedLog::zero();
    bool before = l <= j - 1;
    if (i == 1) {
      if (k <= 2) return before ? S.poly(l - k - 1) : S.poly(l - k);
      return before ? S.tau(l - k - 1) : S.tau(l - k);
    }
    if (i == 2) {
      if (k == 1) return before ? S.poly(l - 1) : S.poly(l);
      if (k == 2) return before ? S.poly(l - 3) : S.poly(l - 2);
      if (k == 3) return before ? S.tau_tilde(l - 4) : S.tau_tilde(l - 3);
      return before ? S.tau(l - k - 1) : S.tau(l - k);
    }
    if (k <= 2) return before ? S.poly(l - k) : S.poly(l - k + 1);
    if (k <= i - 1) return before ? S.tau(l - k) : S.tau(l - k + 1);
    if (k == i) return before ? S.tau_hat(l - i - 1) : S.tau_hat(l - i);
    if (k == i + 1) return before ? S.tau_tilde(l - i - 2) : S.tau_tilde(l - i - 1);
    return before ? S.tau(l - k - 1) : S.tau(l - k);
  };

  std::vector<SignedLog> H(m + 1);
  H[0] = SignedLog::one();
  for (int mm = 1; mm <= m; ++mm) {
    SignedLog acc = SignedLog::zero();
    SignedLog prod = SignedLog::one();
    for (int k = 0; k < mm; ++k) {
      SignedLog top = A(mm - k, mm);
      if (!top.is_zero() && !prod.is_zero() && !H[mm - k - 1].is_zero()) {
        SignedLog term = top * H[mm - k - 1] * prod;
        if (k & 1) term = -term;
        acc = acc + term;
      }
      if (k < mm - 1) {
        prod = prod * A(mm - k, mm - k - 1);
        if (prod.is_zero()) break;
      }
    }
    H[mm] = acc;
  }
  return H[m];
}

SignedLog cofactor_closed_canonical(const ScalarContext& ctx, int i, int j) {
  const int n = ctx.n;
  if (n < 6) return cofactor_recurrence_canonical(ctx, i, j);
  Scalars S(ctx);
  const Core<double>& c = S.cd;
  const int m = n - 1;

  if (i == 1) {
    // j == n in the canonical region
    return SignedLog(1, 2.0 * std::log(c.w) + 2.0 * S.log_u +
                            double(m - 2) * S.log_tau_m1);
  }
  if (i == 2) {
    // j in {n-1, n}
    return S.tau_m1_pow(j - 4) * SignedLog::from_value(c.K3) *
           det_abar(S, n - j);
  }
  if (i == j) {
    if (i == n) return det_closed_m(S, n - 1);
    if (i == n - 1) return corner_minor(S, i, c.C[7][1], c.C[7][2]);
    return banded_minor(S, i, m, c.C[1][1], c.C[1][2], c.C[2][1], c.C[2][2]);
  }
  if (j == i + 1) {
    if (i == n - 1) return corner_minor(S, i, c.C[3][1], c.C[3][2]);
    return banded_minor(S, i, m, c.C[4][1], c.C[4][2], c.C[5][1], c.C[5][2]);
  }
  if (j == n) {
    // 3 <= i <= n-2 here
    return S.tau_m1_pow(n - i - 2) * corner_minor(S, i, c.C[6][1], c.C[6][2]);
  }
  // 3 <= i, i+2 <= j <= n-1
  SignedLog P1 = SignedLog::from_value(c.P1);
  SignedLog P2 = SignedLog::from_value(c.P2);
  SignedLog G1 = SignedLog::from_value(c.G1);
  SignedLog G2 = SignedLog::from_value(c.G2);
  SignedLog t1 = SignedLog::from_value(c.C[6][1]) * P1 *
                 (G1 * S.L1_pow(n - j + i - 4) -
                  G2 * S.L1_pow(i - 3) * S.L2_pow(n - j - 1));
  SignedLog t2 = SignedLog::from_value(c.C[6][2]) * P2 *
                 (G1 * S.L1_pow(n - j - 1) * S.L2_pow(i - 3) -
                  G2 * S.L2_pow(n - j + i - 4));
  SignedLog ad2 = SignedLog::from_value(c.alpha_diff).pow(2);
  return S.tau_m1_pow(j - i - 2) * (t1 - t2) / ad2;
}

// Inverse entries for n >= 6: every canonical cell has a closed form whose
// powers of L1 cancel against the determinant, so the ratio can be
// evaluated directly in compensated value space with only powers of
// r = alpha2/alpha1 and -s = tau(-1)/L1 (both in (0,1)) remaining.
double inverse_entry_closed(const Core<dd>& c, int i, int j) {
  const int n = c.n;
  auto rp = [&](long e) { return dd_pow_int(c.r, e); };
  dd ms = -c.s;  // tau(-1)/L1, positive
  dd det_s = (c.P1 - c.P2 * rp(n - 2)) / c.alpha_diff;  // det / L1^{n-2}
  dd L1sq = c.L1 * c.L1;
  dd L1cu = L1sq * c.L1;
  dd M;  // minor / L1^{n-2}

  auto banded = [&](int ii, const dd& c1a, const dd& c1b, const dd& c2a,
                    const dd& c2b) {
    dd au1 = c.alpha1 - c.u2;
    dd au2 = c.alpha2 - c.u2;
    dd tu4 = c.tau_m1 * c.u4;
    dd tu6 = c.tau_m1 * c.u6;
    dd b1 = c1a * tu4 * c.P1 * (au1 - au2 * rp(n - ii - 2));
    dd b2 = c1b * tu4 * c.P2 * (au1 * rp(ii - 3) - au2 * rp(n - 5));
    dd b3 = c2a * tu6 * c.P1 * (dd(1.0) - rp(n - ii - 2));
    dd b4 = c2b * tu6 * c.P2 * (rp(ii - 3) - rp(n - 5));
    return (b1 - b2 + b3 - b4) / (c.alpha_diff * c.alpha_diff * L1cu);
  };

  if (i == n) {  // (n, n)
    M = (c.P1 - c.P2 * rp(n - 3)) / (c.alpha_diff * c.L1);
  } else if (i == 1) {  // (1, n)
    M = c.w * c.w * c.u2 * dd_pow_int(ms, n - 3) / c.L1;
  } else if (i == 2 && j == n) {
    M = c.K3 * dd_pow_int(ms, n - 4) / L1sq;
  } else if (i == 2) {  // (2, n-1)
    M = c.tau_0 * c.K3 * dd_pow_int(ms, n - 5) / L1cu;
  } else if (i == j) {
    if (i == n - 1)
      M = (c.C[7][1] * c.P1 - c.C[7][2] * c.P2 * rp(n - 4)) /
          (c.alpha_diff * L1sq);
    else
      M = banded(i, c.C[1][1], c.C[1][2], c.C[2][1], c.C[2][2]);
  } else if (j == i + 1) {
    if (i == n - 1)
      M = (c.C[3][1] * c.P1 - c.C[3][2] * c.P2 * rp(n - 4)) /
          (c.alpha_diff * L1sq);
    else
      M = banded(i, c.C[4][1], c.C[4][2], c.C[5][1], c.C[5][2]);
  } else if (j == n) {  // 3 <= i <= n-2
    M = dd_pow_int(ms, n - i - 2) *
        (c.C[6][1] * c.P1 - c.C[6][2] * c.P2 * rp(i - 3)) /
        (c.alpha_diff * L1cu);
  } else {  // 3 <= i, i+2 <= j <= n-1
    dd t1 = c.C[6][1] * c.P1 * (c.G1 - c.G2 * rp(n - j - 1));
    dd t2 = c.C[6][2] * c.P2 * (c.G1 * rp(i - 3) - c.G2 * rp(n - j + i - 4));
    M = dd_pow_int(ms, j - i - 2) * (t1 - t2) /
        (c.alpha_diff * c.alpha_diff * L1cu * c.L1);
  }

  double parity = ((i + j) % 2 == 0) ? 1.0 : -1.0;
  return parity * to_double(M / det_s);
}

double inverse_entry_small(const ScalarContext& ctx, int i, int j) {
  auto [ci, cj] = canonicalize(ctx.n, i, j);
  SignedLog minor = cofactor_recurrence_canonical(ctx, ci, cj);
  SignedLog det = logdet_closed(ctx);
  double parity = ((i + j) % 2 == 0) ? 1.0 : -1.0;
  return parity * (minor / det).value();
}

template <class Real>
double tau_value_from_core(const Core<Real>& c, long k, TauKind family) {
  switch (family) {
    case TauKind::tau:
      if (k == -2) return 0.0;
      if (k == -1) return to_double(c.tau_m1);
      return to_double(pow_int(c.u, k) * detail::tau_bracket(c, k));
    case TauKind::tau_star:
      if (k < 0) return 0.0;
      return to_double(pow_int(c.u, k) * detail::tau_star_bracket(c, k));
    case TauKind::tau_hat:
      if (k == -2) return to_double(c.th_m2);
      if (k == -1) return to_double(c.th_m1);
      return to_double(pow_int(c.u, k) * detail::tau_hat_bracket(c, k));
    case TauKind::tau_tilde:
      if (k == -2) return to_double(c.tt_m2);
      if (k == -1) return to_double(c.tt_m1);
      return to_double(pow_int(c.u, k) * detail::tau_tilde_bracket(c, k));
  }
  throw std::invalid_argument("unknown tau family");
}

}  // namespace

double tau_values(const ScalarContext& ctx, long k, TauKind family,
                  CorePrecision prec) {
  if (k < -2) throw std::invalid_argument("tau index must be >= -2");
  if (wants_wide(ctx, prec))
    return tau_value_from_core(detail::compute_core<dd>(ctx.theta, ctx.n), k,
                               family);
  return tau_value_from_core(detail::compute_core<double>(ctx.theta, ctx.n),
                             k, family);
}

RootPair roots(const ScalarContext& ctx, CorePrecision prec) {
  Core<double> c = wants_wide(ctx, prec)
                       ? detail::narrow(detail::compute_core<dd>(ctx.theta, ctx.n))
                       : detail::compute_core<double>(ctx.theta, ctx.n);
  RootPair rp;
  rp.a = c.a;
  rp.b = c.b;
  rp.a_tilde = c.at;
  rp.b_tilde = c.bt;
  rp.disc = c.disc;
  rp.alpha1 = c.alpha1;
  rp.alpha2 = c.alpha2;
  return rp;
}

AppendixConstants appendix_b_constants(const ScalarContext& ctx) {
  Core<double> c =
      wants_wide(ctx, CorePrecision::automatic)
          ? detail::narrow(detail::compute_core<dd>(ctx.theta, ctx.n))
          : detail::compute_core<double>(ctx.theta, ctx.n);
  AppendixConstants out{};
  for (int k = 1; k <= 7; ++k)
    for (int i = 1; i <= 2; ++i) {
      if (!std::isfinite(c.C[k][i]))
        throw std::runtime_error("non-finite closed-form constant");
      out.C[k][i] = c.C[k][i];
    }
  return out;
}

SignedLog logdet_closed(const ScalarContext& ctx) {
  if (ctx.n < 2) throw std::invalid_argument("logdet needs n >= 2");
  Scalars S(ctx);
  SignedLog det = det_closed_m(S, ctx.n);
  if (det.sign != 1)
    throw std::runtime_error("determinant closed form lost positivity");
  return det;
}

SignedLog logdet_recurrence(const ScalarContext& ctx, int m) {
  if (m < 1 || m > ctx.n) throw std::invalid_argument("m must be in [1, n]");
  if (m == 1) return SignedLog::one();
  Scalars S(ctx);
  std::vector<SignedLog> D(m + 1);
  D[1] = SignedLog::one();
  for (int mm = 2; mm <= m; ++mm) {
    SignedLog acc = S.tau_star(mm - 2) *
                    SignedLog(mm % 2 == 0 ? 1 : -1,
                              double(mm - 2) * S.log_tau_m1);
    for (int k = 0; k <= mm - 3; ++k) {
      SignedLog term = S.tau(k) * D[mm - k - 1] *
                       SignedLog(1, double(k) * S.log_tau_m1);
      if (k & 1) term = -term;
      acc = acc + term;
    }
    D[mm] = acc;
  }
  return D[m];
}

SignedLog cofactor_closed(const ScalarContext& ctx, int i, int j) {
  check_indices(ctx, i, j);
  auto [ci, cj] = canonicalize(ctx.n, i, j);
  return cofactor_closed_canonical(ctx, ci, cj);
}

SignedLog cofactor_recurrence(const ScalarContext& ctx, int i, int j) {
  check_indices(ctx, i, j);
  auto [ci, cj] = canonicalize(ctx.n, i, j);
  return cofactor_recurrence_canonical(ctx, ci, cj);
}

double inverse_entry(const ScalarContext& ctx, int i, int j) {
  check_indices(ctx, i, j);
  if (ctx.n < 6) return inverse_entry_small(ctx, i, j);
  Core<dd> c = detail::compute_core<dd>(ctx.theta, ctx.n);
  auto [ci, cj] = canonicalize(ctx.n, i, j);
  return inverse_entry_closed(c, ci, cj);
}

Eigen::MatrixXd inverse_matrix(const ScalarContext& ctx) {
  const int n = ctx.n;
  Eigen::MatrixXd M(n, n);
  if (n < 6) {
    for (int i = 1; i <= n; ++i)
      for (int j = i; j <= n; ++j) {
        double v = inverse_entry_small(ctx, i, j);
        M(i - 1, j - 1) = v;
        M(j - 1, i - 1) = v;
      }
    return M;
  }
  Core<dd> c = detail::compute_core<dd>(ctx.theta, ctx.n);
  Eigen::MatrixXd cache = Eigen::MatrixXd::Constant(
      n, n, std::numeric_limits<double>::quiet_NaN());
  for (int i = 1; i <= n; ++i)
    for (int j = i; j <= n; ++j) {
      auto [ci, cj] = canonicalize(n, i, j);
      double& slot = cache(ci - 1, cj - 1);
      if (std::isnan(slot)) slot = inverse_entry_closed(c, ci, cj);
      M(i - 1, j - 1) = slot;
      M(j - 1, i - 1) = slot;
    }
  return M;
}

}  // namespace gridfield
