#include "hdboot/bootstrap.hpp"

#include "hdboot/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hdboot {

namespace {

constexpr Index kRecomputeEvery = 1024;

struct Neumaier {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) noexcept {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const noexcept { return sum + carry; }
};

}  // namespace

BlockSums block_sums(const Eigen::MatrixXd& x, Index L) {
  const Index n = x.rows();
  const Index d = x.cols();
  require(n >= 1 && d >= 1, "block_sums: empty input");
  require(L >= 1 && L <= n, "block_sums: window L must satisfy 1 <= L <= n");
  const Index blocks = n - L + 1;
  const double scale = 1.0 / std::sqrt(static_cast<double>(L));

  BlockSums out;
  out.L = L;
  out.n = n;
  out.d = d;
  if (L == 1) {
    out.psi = x;
    return out;
  }
  out.psi.resize(blocks, d);
  for (Index j = 0; j < d; ++j) {
    Neumaier window;
    for (Index i = 0; i < blocks; ++i) {
      if (i % kRecomputeEvery == 0) {
        window = Neumaier{};
        for (Index t = i; t < i + L; ++t) window.add(x(t, j));
      } else {
        window.add(x(i + L - 1, j));
        window.add(-x(i - 1, j));
      }
      out.psi(i, j) = window.value() * scale;
    }
  }
  return out;
}

Eigen::VectorXd multiplier_draw(const BlockSums& psi,
                                std::span<const double> multipliers) {
  require(static_cast<Index>(multipliers.size()) == psi.blocks(),
          "multiplier_draw: multiplier count must equal n - L + 1");
  const Eigen::Map<const Eigen::VectorXd> m(multipliers.data(), psi.blocks());
  return psi.psi.transpose() * m;
}

void fill_multipliers(std::uint64_t seed, StreamTag tag, Index b,
                      std::span<double> out) {
  Stream s(seed, tag, static_cast<std::uint64_t>(b));
  for (double& v : out) v = s.normal();
}

namespace detail {

Eigen::VectorXd scaled_draw(const BlockSums& psi,
                            std::span<const double> multipliers) {
  return multiplier_draw(psi, multipliers) /
         std::sqrt(static_cast<double>(psi.blocks()));
}

}  // namespace detail

BootstrapDraws bootstrap_draws(const BlockSums& psi, Index B, std::uint64_t seed,
                               StreamTag tag) {
  require(B >= 1, "bootstrap_draws: B must be at least 1");
  BootstrapDraws out;
  out.L = psi.L;
  out.B = B;
  out.seed = seed;
  out.draws.resize(B, psi.d);
  const auto blocks = static_cast<std::size_t>(psi.blocks());

#pragma omp parallel
  {
    std::vector<double> multipliers(blocks);
#pragma omp for schedule(static)
    for (Index b = 0; b < B; ++b) {
      fill_multipliers(seed, tag, b, multipliers);
      out.draws.row(b) = detail::scaled_draw(psi, multipliers).transpose();
    }
  }
  return out;
}

BootstrapDraws bootstrap_sample(const TimeSeriesMatrix& x, Index L, Index B,
                                std::uint64_t seed) {
  return bootstrap_draws(block_sums(x, L), B, seed, StreamTag::TestMultiplier);
}

Eigen::MatrixXd conditional_covariance(const BlockSums& psi) {
  const Index d = psi.d;
  const double inv = 1.0 / static_cast<double>(psi.blocks());
  Eigen::MatrixXd cov(d, d);
  // Each entry is one dot product, so the result is independent of how the
  // entries are spread over threads.
#pragma omp parallel for schedule(dynamic)
  for (Index j = 0; j < d; ++j) {
    for (Index k = j; k < d; ++k) {
      const double v = psi.psi.col(j).dot(psi.psi.col(k)) * inv;
      cov(j, k) = v;
      cov(k, j) = v;
    }
  }
  return cov;
}

CovarianceDiagnostics delta_diagnostics(const Eigen::MatrixXd& sigma_target,
                                        const Eigen::MatrixXd& sigma_boot) {
  require(sigma_target.rows() == sigma_target.cols() &&
              sigma_boot.rows() == sigma_boot.cols() &&
              sigma_target.rows() == sigma_boot.rows(),
          "delta_diagnostics: matrices must be d x d with matching d");
  constexpr double kSymTol = 1e-8;
  require((sigma_target - sigma_target.transpose()).cwiseAbs().maxCoeff() <= kSymTol,
          "delta_diagnostics: sigma_target is not symmetric");
  require((sigma_boot - sigma_boot.transpose()).cwiseAbs().maxCoeff() <= kSymTol,
          "delta_diagnostics: sigma_boot is not symmetric");
  const Eigen::MatrixXd diff = sigma_target - sigma_boot;
  CovarianceDiagnostics out;
  out.delta_frobenius = diff.norm();
  out.delta_max = diff.cwiseAbs().maxCoeff();
  out.sigma_target = sigma_target;
  out.sigma_boot = sigma_boot;
  return out;
}

std::vector<Index> default_block_grid(Index n) {
  require(n >= 1, "default_block_grid: n must be positive");
  const double base = std::cbrt(static_cast<double>(n));
  std::vector<Index> grid;
  for (double c : {0.5, 0.75, 1.0, 1.5, 2.0, 3.0}) {
    auto L = static_cast<Index>(std::ceil(c * base - 1e-12));
    grid.push_back(std::clamp<Index>(L, 1, n));
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

Index select_block_size(const Eigen::MatrixXd& x, std::vector<Index> candidates) {
  require(!candidates.empty(), "select_block_size: empty candidate list");
  for (Index L : candidates) {
    require(L >= 1 && L <= x.rows(), "select_block_size: candidate out of range");
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());
  const std::size_t k = candidates.size();
  if (k == 1) return candidates.front();

  std::vector<Eigen::MatrixXd> covs;
  covs.reserve(k);
  for (Index L : candidates) covs.push_back(conditional_covariance(block_sums(x, L)));

  std::vector<double> step(k - 1);
  for (std::size_t i = 0; i + 1 < k; ++i) step[i] = (covs[i + 1] - covs[i]).norm();

  Index best = candidates.front();
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) {
    double score;
    if (i == 0) {
      score = step[0];
    } else if (i + 1 == k) {
      score = step[k - 2];
    } else {
      score = 0.5 * (step[i - 1] + step[i]);
    }
    if (score < best_score) {
      best_score = score;
      best = candidates[i];
    }
  }
  return best;
}

}  // namespace hdboot
