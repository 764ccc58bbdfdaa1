#include <gridfield/kernel.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gridfield {

void ModelParams::validate() const {
  if (!(phi > 0.0) || !std::isfinite(phi))
    throw std::invalid_argument("phi must be positive and finite");
  if (thetas.empty()) throw std::invalid_argument("need at least one theta");
  for (double t : thetas)
    if (!(t > 0.0) || !std::isfinite(t))
      throw std::invalid_argument("every theta must be positive and finite");
}

GridSpec::GridSpec(int n_, int d_) : n(n_), d(d_) {
  if (n < 2) throw std::invalid_argument("grid needs n >= 2");
  if (d < 1) throw std::invalid_argument("grid needs d >= 1");
  std::size_t total = 1;
  const std::size_t cap = std::size_t(1) << 31;
  for (int t = 0; t < d; ++t) {
    if (total > cap / std::size_t(n))
      throw std::invalid_argument("n^d exceeds addressable limit");
    total *= std::size_t(n);
  }
}

std::size_t GridSpec::size() const {
  std::size_t total = 1;
  for (int t = 0; t < d; ++t) total *= std::size_t(n);
  return total;
}

ScalarContext ScalarContext::make(double theta, int n) {
  if (!(theta > 0.0) || !std::isfinite(theta))
    throw std::invalid_argument("theta must be positive and finite");
  if (n < 2) throw std::invalid_argument("n must be >= 2");
  ScalarContext ctx;
  ctx.theta = theta;
  ctx.n = n;
  ctx.w = theta / n;
  ctx.u = std::exp(-ctx.w);
  return ctx;
}

double matern32_corr(double s, double theta) {
  if (s < 0.0) throw std::domain_error("distance must be nonnegative");
  if (!(theta > 0.0)) throw std::domain_error("theta must be positive");
  double x = theta * s;
  return (1.0 + x) * std::exp(-x);
}

double variance_prefactor(const ModelParams& params) {
  params.validate();
  int d = params.d();
  double v = 1.0;
  for (int t = 0; t < d; ++t) {
    double th = params.thetas[t];
    v *= M_PI * params.phi / (2.0 * th * th * th);
  }
  if (!std::isfinite(v)) throw std::overflow_error("variance prefactor overflow");
  return v;
}

CorrMatrix corr_matrix(const ScalarContext& ctx) {
  int n = ctx.n;
  CorrMatrix R(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      int lag = i - j;
      double v = (1.0 + lag * ctx.w) * std::exp(-lag * ctx.w);
      R(i, j) = v;
      R(j, i) = v;
    }
  return R;
}

double covariance_entry(const ModelParams& params, const GridSpec& grid,
                        const std::vector<int>& site_a,
                        const std::vector<int>& site_b) {
  params.validate();
  if (int(site_a.size()) != grid.d || int(site_b.size()) != grid.d)
    throw std::invalid_argument("site dimension mismatch");
  double v = variance_prefactor(params);
  for (int t = 0; t < grid.d; ++t) {
    if (site_a[t] < 1 || site_a[t] > grid.n || site_b[t] < 1 || site_b[t] > grid.n)
      throw std::invalid_argument("site off lattice");
    int lag = std::abs(site_a[t] - site_b[t]);
    double w = params.thetas[t] / grid.n;
    v *= (1.0 + lag * w) * std::exp(-lag * w);
  }
  return v;
}

}  // namespace gridfield
