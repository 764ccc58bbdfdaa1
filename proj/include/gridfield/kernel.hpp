#pragma once

#include <Eigen/Dense>
#include <vector>

namespace gridfield {

using CorrMatrix = Eigen::MatrixXd;

struct ModelParams {
  double phi = 1.0;
  std::vector<double> thetas;

  int d() const { return static_cast<int>(thetas.size()); }
  void validate() const;  // throws std::invalid_argument
};

struct GridSpec {
  int n = 2;
  int d = 1;

  GridSpec() = default;
  GridSpec(int n_, int d_);  // throws on n < 2, d < 1, or n^d too large

  std::size_t size() const;  // n^d
};

// Per-axis scalars feeding every closed form.
struct ScalarContext {
  double theta = 1.0;
  int n = 2;
  double w = 0.5;   // theta / n
  double u = 0.0;   // exp(-w)

  static ScalarContext make(double theta, int n);
};

double matern32_corr(double s, double theta);
double variance_prefactor(const ModelParams& params);
CorrMatrix corr_matrix(const ScalarContext& ctx);

// Sites are 1-based integer lattice indices; physical site is index/n.
double covariance_entry(const ModelParams& params, const GridSpec& grid,
                        const std::vector<int>& site_a,
                        const std::vector<int>& site_b);

}  // namespace gridfield
