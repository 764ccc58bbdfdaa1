#include <gridfield/oracle.hpp>

#include <gridfield/dd.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace gridfield::oracle {

LogDet dense_logdet(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) throw std::invalid_argument("square matrix required");
  if (M.rows() == 0) return {1, 0.0};
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  const auto& U = lu.matrixLU();
  int sign = lu.permutationP().determinant() > 0 ? 1 : -1;
  double log_mag = 0.0;
  for (Eigen::Index k = 0; k < U.rows(); ++k) {
    double p = U(k, k);
    if (p == 0.0) return {0, -std::numeric_limits<double>::infinity()};
    if (p < 0.0) sign = -sign;
    log_mag += std::log(std::fabs(p));
  }
  return {sign, log_mag};
}

LogDet dense_minor_logdet(const Eigen::MatrixXd& M, int i, int j) {
  Eigen::Index n = M.rows();
  if (i < 1 || j < 1 || i > n || j > n)
    throw std::out_of_range("minor index out of range");
  Eigen::MatrixXd sub(n - 1, n - 1);
  for (Eigen::Index r = 0, rr = 0; r < n; ++r) {
    if (r == i - 1) continue;
    for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
      if (c == j - 1) continue;
      sub(rr, cc++) = M(r, c);
    }
    ++rr;
  }
  return dense_logdet(sub);
}

Eigen::MatrixXd dense_inverse(const Eigen::MatrixXd& M) {
  return Eigen::PartialPivLU<Eigen::MatrixXd>(M).inverse();
}

Eigen::MatrixXd dense_covariance(const ModelParams& params,
                                 const GridSpec& grid) {
  params.validate();
  if (params.d() != grid.d) throw std::invalid_argument("dimension mismatch");
  std::size_t N = grid.size();
  if (N > 20000) throw std::invalid_argument("dense covariance too large");

  auto unrank = [&](std::size_t idx) {
    std::vector<int> site(grid.d);
    for (int t = grid.d - 1; t >= 0; --t) {
      site[t] = int(idx % std::size_t(grid.n)) + 1;
      idx /= std::size_t(grid.n);
    }
    return site;
  };

  Eigen::MatrixXd sigma(N, N);
  for (std::size_t p = 0; p < N; ++p) {
    std::vector<int> sp = unrank(p);
    for (std::size_t q = 0; q <= p; ++q) {
      double v = covariance_entry(params, grid, sp, unrank(q));
      sigma(p, q) = v;
      sigma(q, p) = v;
    }
  }
  return sigma;
}

double dense_mvn_logdensity(const Eigen::VectorXd& x,
                            const Eigen::MatrixXd& sigma) {
  if (x.size() != sigma.rows() || sigma.rows() != sigma.cols())
    throw std::invalid_argument("dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("covariance not positive definite");
  Eigen::MatrixXd L = llt.matrixL();
  double log_det = 0.0;
  for (Eigen::Index k = 0; k < L.rows(); ++k) log_det += 2.0 * std::log(L(k, k));
  Eigen::VectorXd z = llt.matrixL().solve(x);
  double quad = z.squaredNorm();
  double n = double(x.size());
  return -0.5 * (n * std::log(2.0 * M_PI) + log_det + quad);
}

namespace {

// In-place LU with partial pivoting in double-double arithmetic.
// Returns the permutation sign, 0 if singular.
int dd_lu(std::vector<std::vector<dd>>& A) {
  int n = int(A.size());
  int sign = 1;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::fabs(to_double(A[k][k]));
    for (int r = k + 1; r < n; ++r) {
      double v = std::fabs(to_double(A[r][k]));
      if (v > best) { best = v; piv = r; }
    }
    if (best == 0.0) return 0;
    if (piv != k) { std::swap(A[piv], A[k]); sign = -sign; }
    for (int r = k + 1; r < n; ++r) {
      dd f = A[r][k] / A[k][k];
      A[r][k] = f;
      for (int c = k + 1; c < n; ++c) A[r][c] = A[r][c] - f * A[k][c];
    }
  }
  return sign;
}

std::vector<std::vector<dd>> to_dd(const Eigen::MatrixXd& M) {
  int n = int(M.rows());
  std::vector<std::vector<dd>> A(n, std::vector<dd>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A[i][j] = dd(M(i, j));
  return A;
}

LogDet logdet_from_lu(std::vector<std::vector<dd>>& A, int sign) {
  if (sign == 0) return {0, -std::numeric_limits<double>::infinity()};
  double log_mag = 0.0;
  for (std::size_t k = 0; k < A.size(); ++k) {
    double p = to_double(A[k][k]);
    if (p < 0.0) sign = -sign;
    log_mag += std::log(std::fabs(p));
  }
  return {sign, log_mag};
}

}  // namespace

LogDet dense_logdet_wide(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) throw std::invalid_argument("square matrix required");
  if (M.rows() == 0) return {1, 0.0};
  auto A = to_dd(M);
  int sign = dd_lu(A);
  return logdet_from_lu(A, sign);
}

LogDet dense_minor_logdet_wide(const Eigen::MatrixXd& M, int i, int j) {
  Eigen::Index n = M.rows();
  if (i < 1 || j < 1 || i > n || j > n)
    throw std::out_of_range("minor index out of range");
  Eigen::MatrixXd sub(n - 1, n - 1);
  for (Eigen::Index r = 0, rr = 0; r < n; ++r) {
    if (r == i - 1) continue;
    for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
      if (c == j - 1) continue;
      sub(rr, cc++) = M(r, c);
    }
    ++rr;
  }
  return dense_logdet_wide(sub);
}

namespace {

Eigen::MatrixXd dd_inverse(std::vector<std::vector<dd>> A) {
  int n = int(A.size());
  // track the permutation explicitly for the solves
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  int sign = 1;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::fabs(to_double(A[k][k]));
    for (int r = k + 1; r < n; ++r) {
      double v = std::fabs(to_double(A[r][k]));
      if (v > best) { best = v; piv = r; }
    }
    if (best == 0.0) throw std::runtime_error("singular matrix");
    if (piv != k) {
      std::swap(A[piv], A[k]);
      std::swap(perm[piv], perm[k]);
      sign = -sign;
    }
    for (int r = k + 1; r < n; ++r) {
      dd f = A[r][k] / A[k][k];
      A[r][k] = f;
      for (int c = k + 1; c < n; ++c) A[r][c] = A[r][c] - f * A[k][c];
    }
  }
  (void)sign;
  Eigen::MatrixXd inv(n, n);
  std::vector<dd> y(n);
  for (int col = 0; col < n; ++col) {
    for (int i = 0; i < n; ++i) y[i] = dd(perm[i] == col ? 1.0 : 0.0);
    for (int i = 1; i < n; ++i)
      for (int k = 0; k < i; ++k) y[i] = y[i] - A[i][k] * y[k];
    for (int i = n - 1; i >= 0; --i) {
      for (int k = i + 1; k < n; ++k) y[i] = y[i] - A[i][k] * y[k];
      y[i] = y[i] / A[i][i];
    }
    for (int i = 0; i < n; ++i) inv(i, col) = to_double(y[i]);
  }
  return inv;
}

std::vector<std::vector<dd>> corr_dd(double theta, int n) {
  if (!(theta > 0.0) || n < 2) throw std::invalid_argument("bad theta or n");
  dd w = dd(theta) / double(n);
  std::vector<dd> band(n);
  for (int lag = 0; lag < n; ++lag)
    band[lag] = (dd(1.0) + double(lag) * w) * dd_exp(-(double(lag) * w));
  std::vector<std::vector<dd>> A(n, std::vector<dd>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A[i][j] = band[std::abs(i - j)];
  return A;
}

std::vector<std::vector<dd>> drop_row_col(
    const std::vector<std::vector<dd>>& A, int i, int j) {
  int n = int(A.size());
  if (i < 1 || j < 1 || i > n || j > n)
    throw std::out_of_range("minor index out of range");
  std::vector<std::vector<dd>> sub(n - 1, std::vector<dd>(n - 1));
  for (int r = 0, rr = 0; r < n; ++r) {
    if (r == i - 1) continue;
    for (int c = 0, cc = 0; c < n; ++c) {
      if (c == j - 1) continue;
      sub[rr][cc++] = A[r][c];
    }
    ++rr;
  }
  return sub;
}

}  // namespace

Eigen::MatrixXd dense_inverse_wide(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) throw std::invalid_argument("square matrix required");
  return dd_inverse(to_dd(M));
}

LogDet corr_logdet_wide(double theta, int n) {
  auto A = corr_dd(theta, n);
  int sign = dd_lu(A);
  return logdet_from_lu(A, sign);
}

LogDet corr_minor_logdet_wide(double theta, int n, int i, int j) {
  auto sub = drop_row_col(corr_dd(theta, n), i, j);
  int sign = dd_lu(sub);
  return logdet_from_lu(sub, sign);
}

Eigen::MatrixXd corr_inverse_wide(double theta, int n) {
  return dd_inverse(corr_dd(theta, n));
}

}  // namespace gridfield::oracle
