#include <gridfield/asymptotics.hpp>

#include <gridfield/detail/canonical.hpp>
#include <gridfield/detail/core.hpp>
#include <gridfield/structured.hpp>

#include <cmath>
#include <stdexcept>

namespace gridfield {

using detail::Core;

namespace {

Core<double> wide_core(const ScalarContext& ctx) {
  return detail::narrow(detail::compute_core<dd>(ctx.theta, ctx.n));
}

double approx_entry_canonical(const Core<double>& c, int n, int i, int j) {
  double L1sq = c.L1 * c.L1;
  double L1cu = L1sq * c.L1;
  double L2cu = c.L2 * c.L2 * c.L2;
  double p21 = c.P2 / c.P1;
  auto rp = [&](long e) { return pow_int(c.r, e); };
  auto sp = [&](long e) { return pow_int(c.s, e); };  // s < 0, alternates
  double ms = -c.s;

  if (i == n) return 1.0 / c.L1;
  if (i == 1) {
    // (1, n)
    double sgn = (n % 2 == 0) ? -1.0 : 1.0;  // (-1)^{n+1}
    return sgn * c.w * c.w * c.u2 * c.alpha_diff / (c.tau_m1 * c.P1) *
           pow_int(ms, n - 2);
  }
  if (i == 2) {
    if (j == n) {
      double sgn = (n % 2 == 0) ? 1.0 : -1.0;  // (-1)^{n+2}
      return sgn * c.K3 * c.alpha_diff / (c.tau_m1 * c.tau_m1 * c.P1) *
             pow_int(ms, n - 2);
    }
    // (2, n-1)
    double sgn = (n % 2 == 0) ? -1.0 : 1.0;  // (-1)^{n-3}
    return sgn * c.tau_0 * c.K3 * c.alpha_diff /
           (c.tau_m1 * c.tau_m1 * c.tau_m1 * c.P1) * pow_int(ms, n - 2);
  }
  if (i == n - 1) {
    if (j == n) return -c.C[3][1] / L1sq;
    return c.C[7][1] / L1sq - c.C[7][2] * p21 * rp(n - 4) / L1sq;
  }
  if (i == j) {
    double tu4 = c.tau_m1 * c.u4;
    double tu6 = c.tau_m1 * c.u6;
    double t1 = c.C[1][1] * tu4 / c.alpha_diff *
                ((c.alpha1 - c.u2) - (c.alpha2 - c.u2) * rp(n - i - 2)) / L1cu;
    double t2 = c.C[1][2] * tu4 * p21 / c.alpha_diff *
                ((c.alpha1 - c.u2) * rp(i) - (c.alpha2 - c.u2) * rp(n - 2)) /
                L2cu;
    double t3 = c.C[2][1] * tu6 / c.alpha_diff * (1.0 - rp(n - i - 2)) / L1cu;
    double t4 = c.C[2][2] * tu6 * p21 / c.alpha_diff * (rp(i) - rp(n - 2)) /
                L2cu;
    return t1 - t2 + t3 - t4;
  }
  if (j == i + 1) {
    double tu4 = c.tau_m1 * c.u4;
    double tu6 = c.tau_m1 * c.u6;
    double t1 = c.C[4][1] * tu4 / c.alpha_diff *
                ((c.alpha1 - c.u2) - (c.alpha2 - c.u2) * rp(n - i - 2)) / L1cu;
    double t2 = c.C[4][2] * tu4 * p21 / c.alpha_diff *
                ((c.alpha1 - c.u2) * rp(i) - (c.alpha2 - c.u2) * rp(n - 2)) /
                L2cu;
    double t3 = c.C[5][1] * tu6 / c.alpha_diff * (1.0 - rp(n - i - 2)) / L1cu;
    double t4 = c.C[5][2] * tu6 * p21 / c.alpha_diff * (rp(i) - rp(n - 2)) /
                L2cu;
    return -(t1 - t2 + t3 - t4);
  }
  if (j == n) {
    return c.C[6][1] / L1cu * sp(n - i - 2) -
           c.C[6][2] * p21 / L2cu * sp(n - i - 2) * rp(i);
  }
  // interior off-band: i >= 3, i+2 <= j <= n-1
  double tq = pow_int(c.tau_m1, 4);
  return sp(j - i + 2) / (tq * c.alpha_diff) *
         (c.C[6][1] * (c.G1 - c.G2 * rp(n - j - 1)) -
          c.C[6][2] * p21 * (c.G1 * rp(i - 3) - c.G2 * rp(n - j + i - 4)));
}

}  // namespace

SignedLog logdet_approx(const ScalarContext& ctx, DetApproxForm form) {
  if (ctx.n < 4) throw std::invalid_argument("determinant approximation needs n >= 4");
  const int n = ctx.n;
  const double w = ctx.w;
  if (form == DetApproxForm::leading) {
    Core<double> c = wide_core(ctx);
    double pref = c.P1 / c.alpha_diff;  // both factors negative
    if (!(pref > 0.0))
      throw std::runtime_error("unexpected sign in determinant prefactor");
    return SignedLog(1, std::log(pref) + double(n - 2) * std::log(c.L1));
  }
  const double rt3 = std::sqrt(3.0);
  double log_mag = double(3 * n - 4) * std::log(w) - 2.0 * double(n - 2) * w +
                   std::log(rt3 / 4.0) +
                   double(n - 1) * std::log(2.0 * (2.0 + rt3) / 3.0) +
                   std::log1p((12.0 + 7.0 * rt3) * double(n) * w * w /
                              (60.0 + 30.0 * rt3));
  return SignedLog(1, log_mag);
}

ApproxLogDet logdet_approx_both(const ScalarContext& ctx) {
  return {logdet_approx(ctx, DetApproxForm::leading),
          logdet_approx(ctx, DetApproxForm::expansion)};
}

double inverse_entry_approx(const ScalarContext& ctx, int i, int j) {
  const int n = ctx.n;
  if (n < 8)
    throw std::invalid_argument("inverse approximation refuses n < 8; use the exact path");
  if (i < 1 || i > n || j < 1 || j > n)
    throw std::out_of_range("matrix index out of range");
  auto [ci, cj] = detail::canonicalize(n, i, j);
  Core<double> c = wide_core(ctx);
  return approx_entry_canonical(c, n, ci, cj);
}

double trace_rinv_r(double theta, double theta_tilde, int n) {
  if (!(theta > 0.0) || !(theta_tilde > 0.0) || n < 2)
    throw std::invalid_argument("bad rates or n");
  double z = theta_tilde / theta;
  double z2 = z * z, z3 = z2 * z, z4 = z2 * z2;
  double w = theta / double(n);
  return z3 - (w / 4.0) * (3.0 * z4 - 2.0 * z2 - 1.0) +
         (1.0 + z2 - 2.0 * z3) / double(n);
}

std::pair<double, double> trace_derivatives(double theta, int n) {
  if (!(theta > 0.0) || n < 2) throw std::invalid_argument("bad theta or n");
  double first = -3.0 / theta + 2.0 * (theta + 2.0) / (theta * double(n));
  double second = 12.0 / (theta * theta) -
                  2.0 * (4.0 * theta + 9.0) / (theta * theta * double(n));
  return {first, second};
}

Eigen::MatrixXd corr_matrix_derivatives(const ScalarContext& ctx, int order) {
  if (order != 1 && order != 2)
    throw std::invalid_argument("derivative order must be 1 or 2");
  const int n = ctx.n;
  const double w = ctx.w;
  Eigen::MatrixXd D(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      double k = double(i - j);
      double e = std::exp(-k * w);
      double v = (order == 1)
                     ? -k * k * w * e / double(n)
                     : -k * k * (1.0 - w * k) * e / (double(n) * double(n));
      D(i, j) = v;
      D(j, i) = v;
    }
  return D;
}

double trace_rinv_r_squared_bound(double theta, double theta_tilde, int n) {
  auto ctx = ScalarContext::make(theta, n);
  auto ctx_t = ScalarContext::make(theta_tilde, n);
  Eigen::MatrixXd B = inverse_matrix(ctx) * corr_matrix(ctx_t);
  return (B * B).trace() / double(n);
}

}  // namespace gridfield
