#pragma once

// Single-threaded reference versions of the OpenMP kernels.  They share the
// per-item work with the parallel versions and are kept for equivalence
// tests and the benchmark.

#include "hdboot/bootstrap.hpp"
#include "hdboot/dependence.hpp"

namespace hdboot::serial {

BootstrapDraws bootstrap_draws(const BlockSums& psi, Index B, std::uint64_t seed,
                               StreamTag tag = StreamTag::TestMultiplier);

/// Plain triple loop, no Eigen kernels.
Eigen::MatrixXd conditional_covariance(const BlockSums& psi);

DependenceEstimate estimate_theta(const ModelSpec& spec, Index k, double q,
                                  Index reps, std::uint64_t seed);

}  // namespace hdboot::serial
