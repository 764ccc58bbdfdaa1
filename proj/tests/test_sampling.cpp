#include <doctest.h>

#include <gridfield/kernel.hpp>
#include <gridfield/likelihood.hpp>
#include <gridfield/oracle.hpp>
#include <gridfield/sampling.hpp>
#include <gridfield/structured.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <vector>

using namespace gridfield;

TEST_CASE("normal stream is deterministic and order independent") {
  SeededStream s{1234, 7};
  std::vector<double> forward, backward;
  for (int k = 0; k < 64; ++k) forward.push_back(s.normal(std::uint64_t(k)));
  for (int k = 63; k >= 0; --k)
    backward.push_back(s.normal(std::uint64_t(k)));
  for (int k = 0; k < 64; ++k)
    CHECK(forward[std::size_t(k)] == backward[std::size_t(63 - k)]);

  SeededStream other{1234, 8};
  bool any_diff = false;
  for (int k = 0; k < 64; ++k)
    any_diff |= other.normal(std::uint64_t(k)) != forward[std::size_t(k)];
  CHECK(any_diff);
}

TEST_CASE("normal stream has the right first moments") {
  SeededStream s{99, 0};
  const int m = 200000;
  double mean = 0.0, var = 0.0, kurt = 0.0;
  for (int k = 0; k < m; ++k) {
    double x = s.normal(std::uint64_t(k));
    mean += x;
    var += x * x;
    kurt += x * x * x * x;
  }
  mean /= m;
  var /= m;
  kurt /= m;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(double(m)));
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
  CHECK(kurt == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("axis factor at n = 2 matches the analytic Cholesky") {
  // rho = (1 + w) e^{-w} with w = theta / n
  auto ctx = ScalarContext::make(1.0, 2);
  double rho = 1.5 * std::exp(-0.5);
  Eigen::MatrixXd L = axis_cholesky(ctx);
  CHECK(L(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(L(0, 1) == 0.0);
  CHECK(L(1, 0) == doctest::Approx(rho).epsilon(1e-14));
  CHECK(L(1, 1) ==
        doctest::Approx(std::sqrt(1.0 - rho * rho)).epsilon(1e-14));
}

TEST_CASE("axis factor reconstructs the correlation matrix") {
  for (double theta : {0.3, 1.0, 4.0}) {
    auto ctx = ScalarContext::make(theta, 64);
    SampleMetadata meta;
    Eigen::MatrixXd L = axis_cholesky(ctx, &meta);
    Eigen::MatrixXd R = corr_matrix(ctx);
    CHECK((L * L.transpose() - R).cwiseAbs().maxCoeff() < 1e-10);
    CHECK_FALSE(meta.jitter_applied);
  }
}

TEST_CASE("smooth large grid factors without jitter") {
  SampleMetadata meta;
  axis_cholesky(ScalarContext::make(10.0, 256), &meta);
  CHECK_FALSE(meta.jitter_applied);
}

TEST_CASE("sampling is reproducible and seed sensitive") {
  ModelParams p;
  p.phi = 1.4;
  p.thetas = {0.9, 1.6};
  GridSpec grid{6, 2};
  LatticeField a = sample_field(p, grid, SeededStream{5, 3});
  LatticeField b = sample_field(p, grid, SeededStream{5, 3});
  LatticeField c = sample_field(p, grid, SeededStream{5, 4});
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
}

TEST_CASE("empirical covariance matches the model covariance") {
  // phi = 2/pi makes the one-axis prefactor exactly 1 at theta = 1
  ModelParams p;
  p.phi = 2.0 / M_PI;
  p.thetas = {1.0};
  GridSpec grid{8, 1};
  const int reps = 20000;

  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(8, 8);
  for (int rep = 0; rep < reps; ++rep) {
    LatticeField f = sample_field(p, grid, SeededStream{777, std::uint64_t(rep)});
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(f.values.data(), 8);
    acc.noalias() += x * x.transpose();
  }
  acc /= double(reps);

  double tol = 4.0 / std::sqrt(double(reps));
  std::vector<int> site(1);
  for (int i = 1; i <= 8; ++i)
    for (int j = 1; j <= 8; ++j) {
      double want = covariance_entry(p, grid, {i}, {j});
      CHECK(std::abs(acc(i - 1, j - 1) - want) < tol);
    }
  CHECK(acc(0, 0) == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("whitened quadratic form is chi-square distributed") {
  ModelParams p;
  p.phi = 1.3;
  p.thetas = {0.8, 1.5};
  GridSpec grid{6, 2};
  const double N = double(grid.size());
  const int reps = 4000;

  double cubes = 1.0;
  for (double t : p.thetas) cubes *= t * t * t;
  double scale =
      4.0 * cubes / (M_PI * M_PI * p.phi * p.phi);  // 2^d prod/ (pi^d phi^d)

  double mean = 0.0, second = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    LatticeField f = sample_field(p, grid, SeededStream{31, std::uint64_t(rep)});
    double y = scale * quad_form(f, p);
    mean += y;
    second += y * y;
  }
  mean /= reps;
  second /= reps;
  double var = second - mean * mean;

  // chi-square with N degrees of freedom: mean N, variance 2N
  CHECK(mean == doctest::Approx(N).epsilon(4.0 * std::sqrt(2.0 / (N * reps))));
  CHECK(var == doctest::Approx(2.0 * N).epsilon(0.15));
}

TEST_CASE("average log density of fresh draws matches its expectation") {
  ModelParams p;
  p.phi = 1.0;
  p.thetas = {1.2, 0.7};
  GridSpec grid{6, 2};
  const double N = double(grid.size());
  const int reps = 1000;

  double acc = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    LatticeField f = sample_field(p, grid, SeededStream{91, std::uint64_t(rep)});
    acc += loglik(f, p);
  }
  acc /= reps;

  Eigen::MatrixXd sigma = oracle::dense_covariance(p, grid);
  double want =
      -0.5 * N * std::log(2.0 * M_PI) -
      0.5 * oracle::dense_logdet(sigma).log_mag - 0.5 * N;
  // loglik has standard deviation about sqrt(N/2) per draw
  CHECK(std::abs(acc - want) < 4.0 * std::sqrt(0.5 * N / reps));
}
