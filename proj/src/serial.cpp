#include "hdboot/serial.hpp"

#include "hdboot/error.hpp"

#include <cmath>
#include <vector>

namespace hdboot::serial {

BootstrapDraws bootstrap_draws(const BlockSums& psi, Index B, std::uint64_t seed,
                               StreamTag tag) {
  require(B >= 1, "bootstrap_draws: B must be at least 1");
  BootstrapDraws out;
  out.L = psi.L;
  out.B = B;
  out.seed = seed;
  out.draws.resize(B, psi.d);
  std::vector<double> multipliers(static_cast<std::size_t>(psi.blocks()));
  for (Index b = 0; b < B; ++b) {
    fill_multipliers(seed, tag, b, multipliers);
    out.draws.row(b) = detail::scaled_draw(psi, multipliers).transpose();
  }
  return out;
}

Eigen::MatrixXd conditional_covariance(const BlockSums& psi) {
  const Index d = psi.d;
  const Index m = psi.blocks();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < d; ++j) {
      for (Index k = 0; k < d; ++k) cov(j, k) += psi.psi(i, j) * psi.psi(i, k);
    }
  }
  return cov / static_cast<double>(m);
}

DependenceEstimate estimate_theta(const ModelSpec& spec, Index k, double q,
                                  Index reps, std::uint64_t seed) {
  detail::validate_theta_args(spec, q, reps);
  require(k >= 0, "estimate_theta: k must be non-negative");
  const std::vector<Index> probes = probe_indices(spec.n);
  const auto stride = probes.size() * static_cast<std::size_t>(spec.d);
  std::vector<double> moments(static_cast<std::size_t>(reps) * stride);
  for (Index r = 0; r < reps; ++r) {
    const std::uint64_t rep_seed = derive_seed(seed, {static_cast<std::uint64_t>(r)});
    detail::rep_difference_moments(
        spec, k, q, probes, rep_seed,
        std::span<double>(moments.data() + static_cast<std::size_t>(r) * stride, stride));
  }
  return detail::finish_theta(spec, k, q, reps, probes, moments);
}

}  // namespace hdboot::serial
