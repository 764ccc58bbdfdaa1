#pragma once

// Closed forms for the one-dimensional correlation matrix R_{theta,n}:
// tau sequences, quadratic roots, the constant table, determinants,
// minor determinants (row i / column j deleted), and inverse entries.
// Large powers are carried in sign-tracked log space; the scalar core can
// be evaluated in compensated precision (see detail/core.hpp).

#include <gridfield/kernel.hpp>
#include <gridfield/signed_log.hpp>

#include <Eigen/Dense>

namespace gridfield {

enum class TauKind { tau, tau_star, tau_hat, tau_tilde };

enum class CorePrecision { automatic, plain, wide };

struct RootPair {
  double a, b, a_tilde, b_tilde;
  double disc;
  double alpha1, alpha2;
};

struct AppendixConstants {
  double C[8][3];  // C[k][i], k = 1..7, i = 1..2
};

double tau_values(const ScalarContext& ctx, long k, TauKind family,
                  CorePrecision prec = CorePrecision::automatic);

RootPair roots(const ScalarContext& ctx,
               CorePrecision prec = CorePrecision::automatic);

AppendixConstants appendix_b_constants(const ScalarContext& ctx);

// log|R_{theta,n}| via the closed form; sign is always +1.
SignedLog logdet_closed(const ScalarContext& ctx);

// |R_{theta,n;m}| (leading principal m x m block) via the determinant
// recurrence; m in [1, n].
SignedLog logdet_recurrence(const ScalarContext& ctx, int m);

// Minor determinant with row i and column j deleted, closed form where a
// case applies (n >= 6), recurrence otherwise.
SignedLog cofactor_closed(const ScalarContext& ctx, int i, int j);

// Same minor via the Hessenberg reduction recurrence; exact for all (i,j).
SignedLog cofactor_recurrence(const ScalarContext& ctx, int i, int j);

// (R^{-1})_{ij} = (-1)^{i+j} |R_{-i,-j}| / |R| as a plain scalar.
double inverse_entry(const ScalarContext& ctx, int i, int j);

Eigen::MatrixXd inverse_matrix(const ScalarContext& ctx);

}  // namespace gridfield
