#pragma once

// Exact Gaussian log-likelihood on the lattice via the Kronecker
// factorization, plus Fisher information (leading-order and exact-trace
// finite-n versions).

#include <gridfield/kernel.hpp>

#include <Eigen/Dense>

#include <vector>

namespace gridfield {

struct LatticeField {
  std::vector<double> values;  // length n^d, lexicographic, axis 0 slowest
  GridSpec grid;
};

// (d+1) x (d+1), index 0 = phi, 1..d = the rates.
struct FisherMatrix {
  Eigen::MatrixXd m;
};

// X' (kron_t R_t^{-1}) X via d mode products; never materializes the
// Kronecker product.
double quad_form(const LatticeField& field, const ModelParams& params);

// Log-likelihood of the mean-zero model.
double loglik(const LatticeField& field, const ModelParams& params);

// Leading-order Fisher entries; theta cross terms are 0 at this order.
FisherMatrix fisher_asymptotic(const ModelParams& params, int n);

// Finite-n Fisher entries assembled from exact per-axis traces.
FisherMatrix fisher_trace_exact(const ModelParams& params, int n);

// Cached per-axis inverse (shared with the estimation search); computed
// once per distinct (theta, n).
Eigen::MatrixXd cached_axis_inverse(double theta, int n);

}  // namespace gridfield
