#pragma once

// Large-n approximations: determinant leading form and its fully expanded
// version, boundary/interior approximations of inverse entries, and the
// trace expansions driving the Fisher-information analysis.

#include <gridfield/kernel.hpp>
#include <gridfield/signed_log.hpp>

#include <Eigen/Dense>

#include <utility>

namespace gridfield {

enum class DetApproxForm { leading, expansion };

struct ApproxLogDet {
  SignedLog leading;
  SignedLog expansion;
};

// Determinant approximation, n >= 4.
SignedLog logdet_approx(const ScalarContext& ctx, DetApproxForm form);
ApproxLogDet logdet_approx_both(const ScalarContext& ctx);

// Approximate inverse entry; refuses n < 8 (asymptotic regime only).
// Arbitrary (i,j) resolved by symmetry/persymmetry onto the published
// index families.
double inverse_entry_approx(const ScalarContext& ctx, int i, int j);

// (1/n) tr(R_theta^{-1} R_theta~) through O(1/n).
double trace_rinv_r(double theta, double theta_tilde, int n);

// { (1/n) tr[(d/dtheta R^{-1}) R], (1/n) tr[(d^2/dtheta^2 R^{-1}) R] }
// through O(1/n).
std::pair<double, double> trace_derivatives(double theta, int n);

// Entrywise dR/dtheta (order 1) or d^2R/dtheta^2 (order 2).
Eigen::MatrixXd corr_matrix_derivatives(const ScalarContext& ctx, int order);

// (1/n) tr[(R_theta^{-1} R_theta~)^2], exact via the structured inverse;
// exposed so boundedness in n can be asserted.
double trace_rinv_r_squared_bound(double theta, double theta_tilde, int n);

}  // namespace gridfield
