#include <gridfield/likelihood.hpp>

#include <gridfield/asymptotics.hpp>
#include <gridfield/structured.hpp>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace gridfield {

namespace {

std::mutex cache_mutex;
std::map<std::pair<double, int>, std::shared_ptr<const Eigen::MatrixXd>>
    inverse_cache;
constexpr std::size_t kCacheCap = 64;

std::shared_ptr<const Eigen::MatrixXd> axis_inverse(double theta, int n) {
  std::pair<double, int> key{theta, n};
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = inverse_cache.find(key);
    if (it != inverse_cache.end()) return it->second;
  }
  auto inv = std::make_shared<const Eigen::MatrixXd>(
      inverse_matrix(ScalarContext::make(theta, n)));
  std::lock_guard<std::mutex> lock(cache_mutex);
  if (inverse_cache.size() >= kCacheCap) inverse_cache.clear();
  auto [it, inserted] = inverse_cache.emplace(key, inv);
  return it->second;
}

// y <- (I x ... x M x ... x I) y along axis t (0 slowest).
void mode_apply(std::vector<double>& y, const Eigen::MatrixXd& M, int n,
                int d, int axis) {
  std::size_t inner = 1;
  for (int t = axis + 1; t < d; ++t) inner *= std::size_t(n);
  std::size_t outer = 1;
  for (int t = 0; t < axis; ++t) outer *= std::size_t(n);
  Eigen::VectorXd v(n), w(n);
  for (std::size_t o = 0; o < outer; ++o) {
    std::size_t base = o * std::size_t(n) * inner;
    for (std::size_t in = 0; in < inner; ++in) {
      for (int k = 0; k < n; ++k) v(k) = y[base + std::size_t(k) * inner + in];
      w.noalias() = M * v;
      for (int k = 0; k < n; ++k) y[base + std::size_t(k) * inner + in] = w(k);
    }
  }
}

void check_consistent(const LatticeField& field, const ModelParams& params) {
  params.validate();
  if (params.d() != field.grid.d)
    throw std::invalid_argument("field / parameter dimension mismatch");
  if (field.values.size() != field.grid.size())
    throw std::invalid_argument("field length does not match grid");
}

}  // namespace

Eigen::MatrixXd cached_axis_inverse(double theta, int n) {
  return *axis_inverse(theta, n);
}

double quad_form(const LatticeField& field, const ModelParams& params) {
  check_consistent(field, params);
  const int n = field.grid.n;
  const int d = field.grid.d;
  std::vector<double> y = field.values;
  for (int t = 0; t < d; ++t) {
    auto inv = axis_inverse(params.thetas[t], n);
    mode_apply(y, *inv, n, d, t);
  }
  double q = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) q += field.values[k] * y[k];
  return q;
}

double loglik(const LatticeField& field, const ModelParams& params) {
  check_consistent(field, params);
  const int n = field.grid.n;
  const int d = field.grid.d;
  const double N = double(field.grid.size());
  const double n_dm1 = N / double(n);

  double sum_log_theta = 0.0;
  double theta_cubed = 1.0;
  double sum_logdet = 0.0;
  for (int t = 0; t < d; ++t) {
    double th = params.thetas[t];
    sum_log_theta += std::log(th);
    theta_cubed *= th * th * th;
    sum_logdet += logdet_closed(ScalarContext::make(th, n)).log_mag;
  }
  double scale = std::pow(2.0, d) * theta_cubed /
                 (std::pow(M_PI, d) * std::pow(params.phi, d));
  double two_logl = -N * std::log(2.0 * M_PI) - d * N * std::log(M_PI / 2.0) -
                    d * N * std::log(params.phi) + 3.0 * N * sum_log_theta -
                    n_dm1 * sum_logdet - scale * quad_form(field, params);
  double out = 0.5 * two_logl;
  if (!std::isfinite(out)) throw std::runtime_error("non-finite log-likelihood");
  return out;
}

FisherMatrix fisher_asymptotic(const ModelParams& params, int n) {
  params.validate();
  if (n < 2) throw std::invalid_argument("n must be >= 2");
  const int d = params.d();
  const double N = std::pow(double(n), d);
  const double n_dm1 = std::pow(double(n), d - 1);
  FisherMatrix F;
  F.m = Eigen::MatrixXd::Zero(d + 1, d + 1);
  F.m(0, 0) = double(d) * double(d) * N / (2.0 * params.phi * params.phi);
  for (int t = 1; t <= d; ++t) {
    double th = params.thetas[t - 1];
    F.m(t, t) = n_dm1 * (2.0 * th + 5.0) / (th * th);
    F.m(0, t) = -double(d) * n_dm1 * (th + 2.0) / (params.phi * th);
    F.m(t, 0) = F.m(0, t);
  }
  return F;
}

FisherMatrix fisher_trace_exact(const ModelParams& params, int n) {
  params.validate();
  if (n < 2 || n > 256) throw std::invalid_argument("n out of feasible range");
  const int d = params.d();
  const double N = std::pow(double(n), d);
  const double n_dm1 = std::pow(double(n), d - 1);
  const double n_dm2 = std::pow(double(n), d - 2);

  // Per-axis traces: T1 = tr(R^{-1}R'), T2 = tr(R^{-1}R''),
  // T3 = tr((R^{-1}R')^2).
  std::vector<double> T1(d), T3(d);
  for (int t = 0; t < d; ++t) {
    auto ctx = ScalarContext::make(params.thetas[t], n);
    Eigen::MatrixXd Rinv = cached_axis_inverse(params.thetas[t], n);
    Eigen::MatrixXd A = Rinv * corr_matrix_derivatives(ctx, 1);
    T1[t] = A.trace();
    T3[t] = (A * A).trace();
  }

  FisherMatrix F;
  F.m = Eigen::MatrixXd::Zero(d + 1, d + 1);
  F.m(0, 0) = double(d) * double(d) * N / (2.0 * params.phi * params.phi);
  for (int t = 1; t <= d; ++t) {
    double th = params.thetas[t - 1];
    F.m(t, t) = 0.5 * (9.0 * N / (th * th) +
                       n_dm1 * (T3[t - 1] - 6.0 * T1[t - 1] / th));
    F.m(0, t) = double(d) * n_dm1 * (T1[t - 1] - 3.0 * double(n) / th) /
                (2.0 * params.phi);
    F.m(t, 0) = F.m(0, t);
    for (int s = 1; s < t; ++s) {
      double ths = params.thetas[s - 1];
      double cross = 0.5 * n_dm2 *
                     (3.0 * double(n) / ths - T1[s - 1]) *
                     (3.0 * double(n) / th - T1[t - 1]);
      F.m(s, t) = cross;
      F.m(t, s) = cross;
    }
  }
  return F;
}

}  // namespace gridfield
