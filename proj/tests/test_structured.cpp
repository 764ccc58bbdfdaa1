#include <doctest.h>

#include <gridfield/kernel.hpp>
#include <gridfield/oracle.hpp>
#include <gridfield/structured.hpp>

#include <cmath>
#include <vector>

using namespace gridfield;

namespace {

// Direct textbook evaluation of the tau families, plain double, used only
// as an independent check of the bracketed implementations.
double tau_direct(double w, double u, long k) {
  if (k <= -2) return 0.0;
  if (k == -1) return (w - 1.0) * u + (1.0 + w) * u * u * u;
  return (1.0 + k * w) * std::pow(u, double(k)) -
         2.0 * (1.0 + (k + 1) * w) * std::pow(u, double(k + 2)) +
         (1.0 + (k + 2) * w) * std::pow(u, double(k + 4));
}

double tau_star_direct(double w, double u, long k) {
  if (k < 0) return 0.0;
  return (1.0 + k * w) * std::pow(u, double(k)) -
         (1.0 + w) * (1.0 + (k + 1) * w) * std::pow(u, double(k + 2));
}

double tau_hat_direct(double w, double u, long k) {
  if (k == -2) return 2.0 * tau_direct(w, u, -1) * u;
  if (k == -1)
    return (1.0 + w) * u - 3.0 * (1.0 + w) * std::pow(u, 3.0) +
           2.0 * (1.0 + 2.0 * w) * std::pow(u, 5.0);
  return (1.0 + k * w) * std::pow(u, double(k)) -
         3.0 * (1.0 + (k + 2) * w) * std::pow(u, double(k + 4)) +
         2.0 * (1.0 + (k + 3) * w) * std::pow(u, double(k + 6));
}

double tau_tilde_direct(double w, double u, long k) {
  if (k == -2) return tau_direct(w, u, -1) * u / 2.0;
  if (k == -1)
    return ((2.0 * w - 1.0) * u + (1.0 + 2.0 * w) * std::pow(u, 5.0)) / 2.0;
  return (2.0 * (1.0 + k * w) * std::pow(u, double(k)) -
          3.0 * (1.0 + (k + 1) * w) * std::pow(u, double(k + 2)) +
          (1.0 + (k + 3) * w) * std::pow(u, double(k + 6))) /
         2.0;
}

const std::vector<double> kThetas = {0.5, 1.0, 2.0, 5.0};

}  // namespace

TEST_CASE("tau families match direct evaluation") {
  for (double theta : kThetas) {
    for (int n : {4, 8, 32}) {
      auto ctx = ScalarContext::make(theta, n);
      for (long k = -2; k <= 12; ++k) {
        CAPTURE(theta);
        CAPTURE(n);
        CAPTURE(k);
        CHECK(tau_values(ctx, k, TauKind::tau) ==
              doctest::Approx(tau_direct(ctx.w, ctx.u, k)).epsilon(1e-9));
        CHECK(tau_values(ctx, k, TauKind::tau_star) ==
              doctest::Approx(tau_star_direct(ctx.w, ctx.u, k)).epsilon(1e-9));
        CHECK(tau_values(ctx, k, TauKind::tau_hat) ==
              doctest::Approx(tau_hat_direct(ctx.w, ctx.u, k)).epsilon(1e-9));
        CHECK(tau_values(ctx, k, TauKind::tau_tilde) ==
              doctest::Approx(tau_tilde_direct(ctx.w, ctx.u, k)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("plain and wide evaluations agree near the crossover") {
  // w slightly above / below 1e-2
  for (double theta : {0.9e-2 * 100, 1.1e-2 * 100}) {
    auto ctx = ScalarContext::make(theta, 100);
    for (long k : {-2L, -1L, 0L, 3L}) {
      double p = tau_values(ctx, k, TauKind::tau, CorePrecision::plain);
      double wv = tau_values(ctx, k, TauKind::tau, CorePrecision::wide);
      CHECK(p == doctest::Approx(wv).epsilon(1e-9));
      double ph = tau_values(ctx, k, TauKind::tau_hat, CorePrecision::plain);
      double wh = tau_values(ctx, k, TauKind::tau_hat, CorePrecision::wide);
      CHECK(ph == doctest::Approx(wh).epsilon(1e-9));
    }
    RootPair rp = roots(ctx, CorePrecision::plain);
    RootPair rw = roots(ctx, CorePrecision::wide);
    CHECK(rp.alpha1 == doctest::Approx(rw.alpha1).epsilon(1e-9));
    CHECK(rp.alpha2 == doctest::Approx(rw.alpha2).epsilon(1e-9));
  }
}

TEST_CASE("root identities") {
  for (double theta : kThetas) {
    for (int n : {8, 32, 128}) {
      auto ctx = ScalarContext::make(theta, n);
      RootPair r = roots(ctx);
      double u2 = ctx.u * ctx.u;
      // product of roots
      CHECK(r.alpha1 * r.alpha2 == doctest::Approx(u2).epsilon(1e-10));
      // quadratic residual, coefficients rebuilt from a, b and tau(-1)
      double tau_m1 = tau_values(ctx, -1, TauKind::tau);
      double A = r.b + tau_m1 * ctx.u;
      double B = r.a - 2.0 * tau_m1 * ctx.u;
      double C = tau_m1 * ctx.u;
      for (double al : {r.alpha1, r.alpha2}) {
        double res = A * al * al + B * al + C;
        double scale = std::fabs(A * al * al) + std::fabs(B * al) + std::fabs(C);
        CHECK(std::fabs(res) / scale < 1e-10);
      }
      CHECK(r.disc == doctest::Approx(B * B - 4.0 * A * C).epsilon(1e-8));
      CHECK(r.alpha1 < r.alpha2);
      CHECK(r.alpha2 < 0.0);
    }
  }
}

TEST_CASE("closed determinant matches dense oracle") {
  for (double theta : kThetas) {
    for (int n = 2; n <= 40; ++n) {
      auto ctx = ScalarContext::make(theta, n);
      auto dense = oracle::corr_logdet_wide(theta, n);
      SignedLog closed = logdet_closed(ctx);
      CAPTURE(theta);
      CAPTURE(n);
      CHECK(closed.sign == dense.sign);
      CHECK(closed.log_mag == doctest::Approx(dense.log_mag).epsilon(1e-11));
    }
  }
}

TEST_CASE("determinant recurrence agrees with closed form at large n") {
  for (double theta : kThetas) {
    for (int n : {50, 100, 200}) {
      auto ctx = ScalarContext::make(theta, n);
      SignedLog rec = logdet_recurrence(ctx, n);
      SignedLog closed = logdet_closed(ctx);
      CHECK(rec.sign == 1);
      CHECK(rec.log_mag == doctest::Approx(closed.log_mag).epsilon(1e-10));
    }
  }
}

TEST_CASE("minor recurrence matches dense minors for every index pair") {
  for (double theta : kThetas) {
    for (int n : {4, 5, 6, 7, 8, 12, 16}) {
      auto ctx = ScalarContext::make(theta, n);
      for (int i = 1; i <= n; ++i)
        for (int j = i; j <= n; ++j) {
          auto dense = oracle::corr_minor_logdet_wide(theta, n, i, j);
          SignedLog rec = cofactor_recurrence(ctx, i, j);
          CAPTURE(theta);
          CAPTURE(n);
          CAPTURE(i);
          CAPTURE(j);
          CHECK(rec.sign == dense.sign);
          if (dense.sign != 0)
            CHECK(rec.log_mag ==
                  doctest::Approx(dense.log_mag).epsilon(1e-8));
        }
    }
  }
}

TEST_CASE("closed minors agree with the recurrence") {
  for (double theta : kThetas) {
    for (int n : {6, 7, 8, 9, 10, 13, 16, 24, 33}) {
      auto ctx = ScalarContext::make(theta, n);
      for (int i = 1; i <= n; ++i)
        for (int j = i; j <= n; ++j) {
          SignedLog rec = cofactor_recurrence(ctx, i, j);
          SignedLog closed = cofactor_closed(ctx, i, j);
          CAPTURE(theta);
          CAPTURE(n);
          CAPTURE(i);
          CAPTURE(j);
          CHECK(closed.sign == rec.sign);
          if (rec.sign != 0)
            CHECK(closed.log_mag ==
                  doctest::Approx(rec.log_mag).epsilon(1e-7));
        }
    }
  }
}

TEST_CASE("inverse entries match dense inverse") {
  for (double theta : kThetas) {
    for (int n = 5; n <= 16; ++n) {
      auto ctx = ScalarContext::make(theta, n);
      Eigen::MatrixXd dense = oracle::corr_inverse_wide(theta, n);
      Eigen::MatrixXd structured = inverse_matrix(ctx);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          CAPTURE(theta);
          CAPTURE(n);
          CAPTURE(i);
          CAPTURE(j);
          double scale = std::max(1.0, std::fabs(dense(i, j)));
          CHECK(std::fabs(structured(i, j) - dense(i, j)) / scale < 1e-7);
        }
    }
  }
}

TEST_CASE("inverse residual stays small up to n = 64") {
  for (double theta : kThetas) {
    for (int n : {8, 16, 32, 48, 64}) {
      auto ctx = ScalarContext::make(theta, n);
      CorrMatrix R = corr_matrix(ctx);
      Eigen::MatrixXd Rinv = inverse_matrix(ctx);
      Eigen::MatrixXd res =
          R * Rinv - Eigen::MatrixXd::Identity(n, n);
      CAPTURE(theta);
      CAPTURE(n);
      CHECK(res.cwiseAbs().maxCoeff() < 1e-7);
      CHECK((Rinv - Rinv.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("inverse entry respects persymmetry") {
  auto ctx = ScalarContext::make(2.0, 12);
  for (int i = 1; i <= 12; ++i)
    for (int j = 1; j <= 12; ++j)
      CHECK(inverse_entry(ctx, i, j) ==
            doctest::Approx(inverse_entry(ctx, 13 - j, 13 - i)).epsilon(1e-13));
}

TEST_CASE("closed-form constants are finite and stable") {
  for (double theta : kThetas) {
    for (int n : {8, 64, 512}) {
      auto ctx = ScalarContext::make(theta, n);
      AppendixConstants ac = appendix_b_constants(ctx);
      for (int k = 1; k <= 7; ++k)
        for (int i = 1; i <= 2; ++i) CHECK(std::isfinite(ac.C[k][i]));
    }
  }
}
