#include <gridfield/estimation.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace gridfield {

namespace {

constexpr double kTieTol = 1e-9;

int thread_budget() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("GRIDFIELD_THREADS")) {
    long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && (unsigned long)cap < hw) hw = unsigned(cap);
  }
  return int(hw);
}

}  // namespace

std::size_t Sieve::size() const {
  std::size_t total = 1;
  for (const auto& axis : axes) total *= axis.size();
  return total;
}

std::vector<double> Sieve::point(std::size_t idx) const {
  std::vector<double> p(axes.size());
  for (std::size_t c = axes.size(); c-- > 0;) {
    p[c] = axes[c][idx % axes[c].size()];
    idx /= axes[c].size();
  }
  return p;
}

double default_nu(int d) {
  if (d >= 3) return std::min(0.2, 0.9 * double(d - 2) / double(d + 1));
  // d < 3: the open-interval condition is vacuous; keep the d = 3 value
  return 0.2;
}

double estimate_phi(const LatticeField& field,
                    const std::vector<double>& theta_tilde) {
  const int d = field.grid.d;
  if (int(theta_tilde.size()) != d)
    throw std::invalid_argument("rate vector dimension mismatch");
  for (double t : theta_tilde)
    if (!(t > 0.0)) throw std::invalid_argument("rates must be positive");

  ModelParams p;
  p.phi = 1.0;  // quad_form does not involve phi
  p.thetas = theta_tilde;
  double q = quad_form(field, p);
  double cubes = 1.0;
  for (double t : theta_tilde) cubes *= t * t * t;
  const double N = double(field.grid.size());
  double inner = std::pow(2.0, d) * cubes / (std::pow(M_PI, d) * N) * q;
  return std::pow(inner, 1.0 / double(d));
}

Sieve build_sieve(const std::vector<Bounds>& bounds, int n, double nu) {
  if (bounds.size() < 2)
    throw std::invalid_argument("need bounds for phi and at least one rate");
  if (n < 2) throw std::invalid_argument("n must be >= 2");
  const int d = int(bounds.size()) - 1;
  if (d >= 3) {
    double limit = double(d - 2) / double(d + 1);
    if (!(nu > 0.0 && nu < limit))
      throw std::invalid_argument("sieve exponent outside (0, (d-2)/(d+1))");
  } else if (!(nu > 0.0)) {
    throw std::invalid_argument("sieve exponent must be positive");
  }

  Sieve s;
  s.nu = nu;
  s.n = n;
  s.bounds = bounds;
  s.consistency_guaranteed = d >= 3;
  double mesh = std::pow(double(n), -nu);
  for (const auto& b : bounds) {
    if (!(b.lo > 0.0) || !(b.hi >= b.lo))
      throw std::invalid_argument("bounds must satisfy 0 < lo <= hi");
    std::vector<double> axis;
    long i_lo = (long)std::ceil(b.lo / mesh - 1e-9);
    long i_hi = (long)std::floor(b.hi / mesh + 1e-9);
    for (long i = i_lo; i <= i_hi; ++i) axis.push_back(double(i) * mesh);
    if (axis.empty())
      throw std::runtime_error("empty sieve: bounds admit no lattice point");
    s.axes.push_back(std::move(axis));
  }
  return s;
}

EstimationResult sieve_mle(const LatticeField& field, const Sieve& sieve) {
  if (int(sieve.axes.size()) != field.grid.d + 1)
    throw std::invalid_argument("sieve / field dimension mismatch");
  const std::size_t total = sieve.size();
  if (total == 0) throw std::runtime_error("empty sieve");

  std::vector<double> values(total);
  std::atomic<std::size_t> next{0};
  int workers = std::min<std::size_t>(thread_budget(), total);
  auto eval_range = [&]() {
    for (;;) {
      std::size_t idx = next.fetch_add(1);
      if (idx >= total) break;
      std::vector<double> p = sieve.point(idx);
      ModelParams params;
      params.phi = p[0];
      params.thetas.assign(p.begin() + 1, p.end());
      values[idx] = loglik(field, params);
    }
  };
  if (workers <= 1) {
    eval_range();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(eval_range);
    for (auto& th : pool) th.join();
  }

  // deterministic reduction: max first, then lexicographically smallest
  // point among ties
  double best = values[0];
  for (double v : values) best = std::max(best, v);
  std::size_t ties = 0;
  std::size_t best_idx = total;
  std::vector<double> best_point;
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (values[idx] >= best - kTieTol) {
      ++ties;
      std::vector<double> p = sieve.point(idx);
      if (best_idx == total ||
          std::lexicographical_compare(p.begin(), p.end(), best_point.begin(),
                                       best_point.end())) {
        best_idx = idx;
        best_point = std::move(p);
      }
    }
  }

  EstimationResult res;
  res.phi_hat = best_point[0];
  res.theta_hats.assign(best_point.begin() + 1, best_point.end());
  res.loglik_at_max = values[best_idx];
  res.evaluations = total;
  res.ties = ties;
  return res;
}

double kl_f(double t) {
  if (!(t > 0.0)) throw std::invalid_argument("f needs a positive argument");
  return t - std::log(t) - 1.0;
}

double kl_g(double theta, double theta_tilde) {
  double z = theta_tilde / theta;
  return -4.0 * std::log(z) - 2.0 * (theta_tilde - theta) + z * z * z + z -
         2.0 - 3.0 * theta / 4.0 + (theta_tilde / 2.0) * z +
         (theta_tilde / 4.0) * z * z * z;
}

std::pair<double, double> kl_diagnostics(const ModelParams& truth,
                                         const ModelParams& candidate) {
  truth.validate();
  candidate.validate();
  if (truth.d() != candidate.d())
    throw std::invalid_argument("dimension mismatch");
  const int d = truth.d();
  double f_val = kl_f(std::pow(truth.phi / candidate.phi, d));
  double g_sum = 0.0;
  for (int t = 0; t < d; ++t)
    g_sum += kl_g(truth.thetas[t], candidate.thetas[t]);
  return {f_val, g_sum};
}

}  // namespace gridfield
