#include <gridfield/sampling.hpp>

#include <cmath>
#include <stdexcept>

namespace gridfield {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// uniform in (0,1), derived from (key, counter)
double counter_uniform(std::uint64_t key, std::uint64_t counter) {
  std::uint64_t bits = splitmix64(key ^ splitmix64(counter));
  // 53-bit mantissa, then shift into the open interval
  return (double(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

double SeededStream::normal(std::uint64_t k) const {
  std::uint64_t key = splitmix64(master_seed) ^ splitmix64(~stream_id);
  // Box-Muller on the counter pair (2m, 2m+1)
  std::uint64_t m = k / 2;
  double u1 = counter_uniform(key, 2 * m);
  double u2 = counter_uniform(key, 2 * m + 1);
  double rad = std::sqrt(-2.0 * std::log(u1));
  double ang = 2.0 * M_PI * u2;
  return (k % 2 == 0) ? rad * std::cos(ang) : rad * std::sin(ang);
}

Eigen::MatrixXd axis_cholesky(const ScalarContext& ctx, SampleMetadata* meta) {
  Eigen::MatrixXd R = corr_matrix(ctx);
  Eigen::LLT<Eigen::MatrixXd> llt(R);
  if (llt.info() == Eigen::Success) {
    if (meta) {
      meta->jitter_applied = false;
      meta->jitter_eps = 0.0;
    }
    return llt.matrixL();
  }
  double eps = 1e-12 * double(ctx.n);
  Eigen::MatrixXd Rj =
      R + eps * Eigen::MatrixXd::Identity(ctx.n, ctx.n);
  Eigen::LLT<Eigen::MatrixXd> llt2(Rj);
  if (llt2.info() != Eigen::Success)
    throw std::runtime_error("axis factorization failed even with jitter");
  if (meta) {
    meta->jitter_applied = true;
    meta->jitter_eps = eps;
  }
  return llt2.matrixL();
}

LatticeField sample_field(const ModelParams& params, const GridSpec& grid,
                          const SeededStream& stream, SampleMetadata* meta) {
  params.validate();
  if (params.d() != grid.d) throw std::invalid_argument("dimension mismatch");
  const int n = grid.n;
  const int d = grid.d;
  const std::size_t N = grid.size();

  LatticeField field;
  field.grid = grid;
  field.values.resize(N);
  for (std::size_t k = 0; k < N; ++k) field.values[k] = stream.normal(k);

  // apply kron of the axis factors via mode products
  for (int t = 0; t < d; ++t) {
    SampleMetadata axis_meta;
    Eigen::MatrixXd L =
        axis_cholesky(ScalarContext::make(params.thetas[t], n), &axis_meta);
    if (meta && axis_meta.jitter_applied) *meta = axis_meta;

    std::size_t inner = 1;
    for (int s = t + 1; s < d; ++s) inner *= std::size_t(n);
    std::size_t outer = N / (std::size_t(n) * inner);
    Eigen::VectorXd v(n), w(n);
    for (std::size_t o = 0; o < outer; ++o) {
      std::size_t base = o * std::size_t(n) * inner;
      for (std::size_t in = 0; in < inner; ++in) {
        for (int k = 0; k < n; ++k)
          v(k) = field.values[base + std::size_t(k) * inner + in];
        w.noalias() = L * v;
        for (int k = 0; k < n; ++k)
          field.values[base + std::size_t(k) * inner + in] = w(k);
      }
    }
  }

  double scale = std::sqrt(variance_prefactor(params));
  for (double& v : field.values) v *= scale;
  return field;
}

}  // namespace gridfield
