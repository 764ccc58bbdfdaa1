#pragma once

// Dense reference implementations used only to cross-check the structured
// code paths.  Everything here goes through generic LU / Cholesky
// factorizations of explicitly assembled matrices.

#include <gridfield/kernel.hpp>

#include <Eigen/Dense>

namespace gridfield::oracle {

// log|M| of a symmetric positive matrix via partial-pivot LU; returns the
// log magnitude, sign reported separately.
struct LogDet {
  int sign;
  double log_mag;
};

LogDet dense_logdet(const Eigen::MatrixXd& M);

// Determinant of M with row i and column j removed (1-based).
LogDet dense_minor_logdet(const Eigen::MatrixXd& M, int i, int j);

Eigen::MatrixXd dense_inverse(const Eigen::MatrixXd& M);

// Full covariance of the d-dimensional field as an n^d x n^d matrix,
// assembled entry by entry.  Intended for small n^d only.
Eigen::MatrixXd dense_covariance(const ModelParams& params,
                                 const GridSpec& grid);

// Gaussian log density of x under N(0, Sigma), dense Cholesky.
double dense_mvn_logdensity(const Eigen::VectorXd& x,
                            const Eigen::MatrixXd& sigma);

// Compensated (double-double) LU variants for severely ill-conditioned
// comparisons where plain double LU loses 7+ digits.  Small matrices only.
LogDet dense_logdet_wide(const Eigen::MatrixXd& M);
LogDet dense_minor_logdet_wide(const Eigen::MatrixXd& M, int i, int j);
Eigen::MatrixXd dense_inverse_wide(const Eigen::MatrixXd& M);

// Same, but with the one-axis correlation matrix assembled internally in
// compensated precision; rounding R to double first perturbs inverse
// entries by ~|Rinv|^2 * eps, which is visible at small theta/n ratios.
LogDet corr_logdet_wide(double theta, int n);
LogDet corr_minor_logdet_wide(double theta, int n, int i, int j);
Eigen::MatrixXd corr_inverse_wide(double theta, int n);

}  // namespace gridfield::oracle
