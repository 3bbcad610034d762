#pragma once

#include "hdboot/models.hpp"
#include "hdboot/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace hdboot {

/// Overlapping block sums psi_i = (x_i + ... + x_{i+L-1}) / sqrt(L).
struct BlockSums {
  Eigen::MatrixXd psi;  ///< (n - L + 1) x d
  Index L = 1;
  Index n = 0;
  Index d = 0;

  Index blocks() const noexcept { return psi.rows(); }
};

/// B x d matrix whose row b is tau^{(b)} / sqrt(n - L + 1).
struct BootstrapDraws {
  Eigen::MatrixXd draws;
  Index L = 1;
  Index B = 0;
  std::uint64_t seed = 0;
  bool scaled = true;
};

struct CovarianceDiagnostics {
  double delta_frobenius = 0.0;
  double delta_max = 0.0;
  Eigen::MatrixXd sigma_target;
  Eigen::MatrixXd sigma_boot;
};

/// Rolling sums with compensated add/subtract and a full recomputation
/// every 1024 rows.
BlockSums block_sums(const Eigen::MatrixXd& x, Index L);
inline BlockSums block_sums(const TimeSeriesMatrix& x, Index L) {
  return block_sums(x.data(), L);
}

/// Unscaled tau = sum_i multipliers_i * psi_i.
Eigen::VectorXd multiplier_draw(const BlockSums& psi,
                                std::span<const double> multipliers);

/// Standard-normal multipliers of draw b: stream (seed, tag, b).
void fill_multipliers(std::uint64_t seed, StreamTag tag, Index b,
                      std::span<double> out);

/// B scaled bootstrap draws, parallel over b.  Draw b depends only on
/// (psi, seed, tag, b), so results do not depend on the thread count.
BootstrapDraws bootstrap_draws(const BlockSums& psi, Index B, std::uint64_t seed,
                               StreamTag tag = StreamTag::TestMultiplier);
BootstrapDraws bootstrap_sample(const TimeSeriesMatrix& x, Index L, Index B,
                                std::uint64_t seed);

/// (1 / (n - L + 1)) sum_i psi_i psi_i^T, the exact conditional covariance
/// of the scaled draws.
Eigen::MatrixXd conditional_covariance(const BlockSums& psi);

/// Frobenius and entry-wise max norms of sigma_target - sigma_boot.
CovarianceDiagnostics delta_diagnostics(const Eigen::MatrixXd& sigma_target,
                                        const Eigen::MatrixXd& sigma_boot);

/// {ceil(c n^(1/3)) : c in {0.5, 0.75, 1, 1.5, 2, 3}} clipped to [1, n],
/// sorted and deduplicated.
std::vector<Index> default_block_grid(Index n);

/// Minimal-volatility selector: the candidate whose conditional covariance
/// moves least (mean Frobenius distance) relative to its grid neighbours.
/// Ties go to the smaller window.
Index select_block_size(const Eigen::MatrixXd& x, std::vector<Index> candidates);
inline Index select_block_size(const TimeSeriesMatrix& x,
                               std::vector<Index> candidates) {
  return select_block_size(x.data(), std::move(candidates));
}
inline Index select_block_size(const TimeSeriesMatrix& x) {
  return select_block_size(x.data(), default_block_grid(x.n()));
}

namespace detail {
/// psi^T m / sqrt(blocks).
Eigen::VectorXd scaled_draw(const BlockSums& psi,
                            std::span<const double> multipliers);
}  // namespace detail

}  // namespace hdboot
