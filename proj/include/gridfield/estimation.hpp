#pragma once

// Scale estimator, sieve construction, exhaustive sieve maximum
// likelihood, and the population separation diagnostics.

#include <gridfield/kernel.hpp>
#include <gridfield/likelihood.hpp>

#include <utility>
#include <vector>

namespace gridfield {

struct Bounds {
  double lo = 0.0;
  double hi = 0.0;
};

struct Sieve {
  double nu = 0.0;
  int n = 2;
  std::vector<Bounds> bounds;            // index 0 = phi, 1..d = rates
  std::vector<std::vector<double>> axes; // admissible values per coordinate
  bool consistency_guaranteed = true;    // false when d < 3

  std::size_t size() const;
  std::vector<double> point(std::size_t idx) const;  // lexicographic
};

struct EstimationResult {
  double phi_hat = 0.0;
  std::vector<double> theta_hats;
  double loglik_at_max = 0.0;
  std::size_t evaluations = 0;
  std::size_t ties = 0;
};

// Default sieve exponent for dimension d.
double default_nu(int d);

// {2^d prod(theta~^3) / (pi^d n^d) * X'(kron R~^{-1})X}^{1/d}
double estimate_phi(const LatticeField& field,
                    const std::vector<double>& theta_tilde);

Sieve build_sieve(const std::vector<Bounds>& bounds, int n, double nu);

EstimationResult sieve_mle(const LatticeField& field, const Sieve& sieve);

// { f(phi^d / phi~^d), sum_t g(theta_t, theta~_t) } with
// f(t) = t - log t - 1.
std::pair<double, double> kl_diagnostics(const ModelParams& truth,
                                         const ModelParams& candidate);

double kl_f(double t);
double kl_g(double theta, double theta_tilde);

}  // namespace gridfield
