#pragma once

#include "hdboot/models.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace hdboot {

/// Coupled-simulation estimate of the physical dependence measure at lag k.
struct DependenceEstimate {
  Index k = 0;
  double q = 2.0;
  Eigen::VectorXd per_coord;  ///< theta_hat_{k,j,q}
  double max_over_coords = 0.0;
  Eigen::VectorXd mc_se;
  Index reps = 0;
};

/// Probe indices used to approximate the sup over time: ceil(n/4),
/// ceil(n/2), ceil(3n/4), n (duplicates removed).
std::vector<Index> probe_indices(Index n);

/// For each rep, simulates the path up to a probe index i, recomputes it with
/// the innovation at i - k swapped for an independent copy, and averages
/// |x_{i,j} - x'_{i,j}|^q.  Returns the q-th root of the mean, maximised over
/// the probe indices.  Reps run in parallel; every rep owns its own streams
/// and the moments are summed in rep order, so the result does not depend on
/// the thread count.
DependenceEstimate estimate_theta(const ModelSpec& spec, Index k, double q,
                                  Index reps, std::uint64_t seed);

/// Truncated cumulative dependence max_j sum_{l=k0}^{K} theta_{l,j,q}.
/// The estimates must cover a contiguous lag range (any order).
double cumulative_theta(std::span<const DependenceEstimate> estimates);

/// Geometric tail bound for the truncated sum, from the ratio of the last two
/// lags' max_over_coords.  Infinite when the ratio is not below 1.
double theta_tail_bound(std::span<const DependenceEstimate> estimates);

/// Smallest eigenvalue of a (symmetrized) matrix.
double min_eigenvalue(const Eigen::MatrixXd& m);

namespace detail {

/// |x_i - x'_i|^q for one rep, laid out probes x d.  The base path is
/// simulated once and each probe branches off it at index i - k.
void rep_difference_moments(const ModelSpec& spec, Index k, double q,
                            std::span<const Index> probes,
                            std::uint64_t rep_seed, std::span<double> out);

/// Collapses per-rep moments (reps x probes x d, row-major) into the
/// estimate.  Summation is compensated and runs in rep order.
DependenceEstimate finish_theta(const ModelSpec& spec, Index k, double q,
                                Index reps, std::span<const Index> probes,
                                const std::vector<double>& moments);

void validate_theta_args(const ModelSpec& spec, double q, Index reps);

}  // namespace detail

}  // namespace hdboot
