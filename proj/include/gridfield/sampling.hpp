#pragma once

// Exact simulation of the lattice field through per-axis Cholesky factors
// applied as mode products, with a counter-based reproducible normal
// stream.

#include <gridfield/kernel.hpp>
#include <gridfield/likelihood.hpp>

#include <Eigen/Dense>

#include <cstdint>

namespace gridfield {

struct SeededStream {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  // k-th standard normal of this stream, independent of evaluation order.
  double normal(std::uint64_t k) const;
};

struct SampleMetadata {
  bool jitter_applied = false;
  double jitter_eps = 0.0;
};

// Lower-triangular L with L L' = R_{theta,n}; jitter policy on failure.
Eigen::MatrixXd axis_cholesky(const ScalarContext& ctx,
                              SampleMetadata* meta = nullptr);

LatticeField sample_field(const ModelParams& params, const GridSpec& grid,
                          const SeededStream& stream,
                          SampleMetadata* meta = nullptr);

}  // namespace gridfield
