#include <doctest.h>

#include <gridfield/kernel.hpp>
#include <gridfield/oracle.hpp>

#include <cmath>

using namespace gridfield;

TEST_CASE("matern correlation basics") {
  CHECK(matern32_corr(0.0, 2.0) == doctest::Approx(1.0));
  double v = matern32_corr(0.5, 2.0);
  CHECK(v == doctest::Approx(2.0 * std::exp(-1.0)));
  CHECK_THROWS(matern32_corr(-1.0, 2.0));
  CHECK_THROWS(matern32_corr(1.0, 0.0));
}

TEST_CASE("scalar context") {
  auto ctx = ScalarContext::make(2.0, 8);
  CHECK(ctx.w == doctest::Approx(0.25));
  CHECK(ctx.u == doctest::Approx(std::exp(-0.25)));
  CHECK_THROWS(ScalarContext::make(-1.0, 8));
  CHECK_THROWS(ScalarContext::make(1.0, 1));
}

TEST_CASE("variance prefactor product form") {
  ModelParams p;
  p.phi = 2.0;
  p.thetas = {1.0, 2.0};
  double expect = (M_PI * 2.0 / 2.0) * (M_PI * 2.0 / (2.0 * 8.0));
  CHECK(variance_prefactor(p) == doctest::Approx(expect));
  ModelParams bad;
  bad.phi = -1.0;
  bad.thetas = {1.0};
  CHECK_THROWS(variance_prefactor(bad));
}

TEST_CASE("correlation matrix is the banded Toeplitz form") {
  auto ctx = ScalarContext::make(1.5, 6);
  CorrMatrix R = corr_matrix(ctx);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      double lag = std::abs(i - j);
      double expect = (1.0 + lag * ctx.w) * std::exp(-lag * ctx.w);
      CHECK(R(i, j) == doctest::Approx(expect).epsilon(1e-14));
    }
  // positive definite at moderate n
  Eigen::LLT<Eigen::MatrixXd> llt(R);
  CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("covariance entries factor across axes") {
  ModelParams p;
  p.phi = 1.3;
  p.thetas = {1.0, 2.5};
  GridSpec g(4, 2);
  double v = covariance_entry(p, g, {1, 2}, {3, 2});
  double pre = variance_prefactor(p);
  double w0 = 1.0 / 4.0;
  double expect = pre * (1.0 + 2.0 * w0) * std::exp(-2.0 * w0);
  CHECK(v == doctest::Approx(expect).epsilon(1e-14));
  CHECK_THROWS(covariance_entry(p, g, {0, 1}, {1, 1}));
}

TEST_CASE("dense covariance matches kronecker structure") {
  ModelParams p;
  p.phi = 0.7;
  p.thetas = {1.0, 2.0};
  GridSpec g(3, 2);
  Eigen::MatrixXd sigma = oracle::dense_covariance(p, g);
  CHECK(sigma.rows() == 9);
  // diagonal equals the prefactor
  for (int i = 0; i < 9; ++i)
    CHECK(sigma(i, i) == doctest::Approx(variance_prefactor(p)));
  // symmetry and positive definiteness
  CHECK((sigma - sigma.transpose()).norm() == doctest::Approx(0.0));
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("dense mvn log density agrees with direct formula in 1d") {
  Eigen::MatrixXd sigma(1, 1);
  sigma(0, 0) = 4.0;
  Eigen::VectorXd x(1);
  x(0) = 1.0;
  double expect = -0.5 * std::log(2.0 * M_PI * 4.0) - 0.5 * 1.0 / 4.0;
  CHECK(oracle::dense_mvn_logdensity(x, sigma) == doctest::Approx(expect));
}
