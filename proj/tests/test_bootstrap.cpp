#include "hdboot/error.hpp"
#include "hdboot/bootstrap.hpp"
#include "hdboot/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace hdboot;

namespace {

Eigen::MatrixXd x123() {
  Eigen::MatrixXd x(3, 1);
  x << 1, 2, 3;
  return x;
}

TimeSeriesMatrix m1_series(Index n, Index d, std::uint64_t seed) {
  ModelSpec s;
  s.model = ModelId::M1;
  s.n = n;
  s.d = d;
  s.seed = seed;
  return simulate_model(s);
}

Eigen::MatrixXd white_noise(Index n, Index d, std::uint64_t seed) {
  Eigen::MatrixXd x(n, d);
  for (Index i = 0; i < n; ++i) {
    Stream s(seed, StreamTag::Generic, static_cast<std::uint64_t>(i));
    for (Index j = 0; j < d; ++j) x(i, j) = s.normal();
  }
  return x;
}

}  // namespace

TEST(BlockSums, SmallExample) {
  const BlockSums psi = block_sums(x123(), 2);
  ASSERT_EQ(psi.psi.rows(), 2);
  EXPECT_NEAR(psi.psi(0, 0), 3 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(psi.psi(1, 0), 5 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(psi.blocks(), 2);
}

TEST(BlockSums, WindowOneIsIdentity) {
  const Eigen::MatrixXd x = m1_series(50, 3, 1).data();
  EXPECT_EQ(block_sums(x, 1).psi, x);
}

TEST(BlockSums, FullWindowIsColumnSum) {
  const Eigen::MatrixXd x = m1_series(50, 3, 1).data();
  const BlockSums psi = block_sums(x, 50);
  ASSERT_EQ(psi.psi.rows(), 1);
  const Eigen::RowVectorXd expected = x.colwise().sum() / std::sqrt(50.0);
  EXPECT_LT((psi.psi.row(0) - expected).norm(), 1e-12);
}

TEST(BlockSums, MatchesDirectSummationLong) {
  const Eigen::MatrixXd x = m1_series(3000, 2, 4).data() * 1e3;
  const Index L = 13;
  const BlockSums psi = block_sums(x, L);
  for (Index i = 0; i + L <= 3000; i += 97) {
    const Eigen::RowVectorXd direct = x.middleRows(i, L).colwise().sum() / std::sqrt(double(L));
    EXPECT_LT((psi.psi.row(i) - direct).cwiseAbs().maxCoeff(), 1e-9 * (1 + direct.norm()));
  }
}

TEST(BlockSums, InvalidWindow) {
  EXPECT_THROW(block_sums(x123(), 0), InvalidArgument);
  EXPECT_THROW(block_sums(x123(), 4), InvalidArgument);
}

TEST(MultiplierDraw, Examples) {
  const BlockSums psi = block_sums(x123(), 2);
  const std::vector<double> zero{0, 0}, e1{1, 0}, pm{1, -1};
  EXPECT_TRUE(multiplier_draw(psi, zero).isZero(0.0));
  EXPECT_NEAR(multiplier_draw(psi, e1)(0), psi.psi(0, 0), 1e-15);
  EXPECT_NEAR(multiplier_draw(psi, pm)(0), -std::sqrt(2.0), 1e-14);
  const std::vector<double> wrong{1};
  EXPECT_THROW(multiplier_draw(psi, wrong), InvalidArgument);
}

TEST(BootstrapDraws, ZeroSeriesGivesZeroDraws) {
  const BlockSums psi = block_sums(Eigen::MatrixXd::Zero(40, 3), 4);
  EXPECT_TRUE(bootstrap_draws(psi, 50, 1).draws.isZero(0.0));
}

TEST(BootstrapDraws, SingleDrawConsistency) {
  const BlockSums psi = block_sums(m1_series(60, 3, 2).data(), 5);
  const BootstrapDraws bd = bootstrap_draws(psi, 1, 99);
  std::vector<double> m(static_cast<std::size_t>(psi.blocks()));
  fill_multipliers(99, StreamTag::TestMultiplier, 0, m);
  const Eigen::VectorXd expected = multiplier_draw(psi, m) / std::sqrt(double(psi.blocks()));
  EXPECT_LT((bd.draws.row(0).transpose() - expected).norm(), 1e-13);
  EXPECT_TRUE(bd.scaled);
  EXPECT_EQ(bd.L, 5);
}

// Oracle: the exact conditional covariance.
TEST(BootstrapDraws, VarianceMatchesConditionalCovariance) {
  const BlockSums psi = block_sums(m1_series(500, 5, 3), 8);
  const BootstrapDraws bd = bootstrap_draws(psi, 2000, 17);
  const Eigen::MatrixXd cov = conditional_covariance(psi);
  const Eigen::RowVectorXd mean = bd.draws.colwise().mean();
  for (Index j = 0; j < 5; ++j) {
    const double var = (bd.draws.col(j).array() - mean(j)).square().sum() / 1999.0;
    EXPECT_NEAR(var, cov(j, j), 0.15 * cov(j, j)) << j;
    EXPECT_LE(std::abs(mean(j)), 5 * std::sqrt(var / 2000.0));
  }
  EXPECT_TRUE(bd.draws.allFinite());
}

TEST(ConditionalCovariance, Examples) {
  EXPECT_NEAR(conditional_covariance(block_sums(x123(), 2))(0, 0), 8.5, 1e-14);
  const Eigen::MatrixXd x = m1_series(40, 1, 5).data();
  EXPECT_NEAR(conditional_covariance(block_sums(x, 1))(0, 0), x.squaredNorm() / 40.0, 1e-12);
  EXPECT_TRUE(conditional_covariance(block_sums(Eigen::MatrixXd::Zero(10, 2), 3)).isZero(0.0));
}

TEST(ConditionalCovariance, SymmetricPsd) {
  const Eigen::MatrixXd c = conditional_covariance(block_sums(m1_series(200, 6, 5), 6));
  EXPECT_EQ(c, c.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
  EXPECT_GT(eig.eigenvalues().minCoeff(), -1e-12);
}

TEST(DeltaDiagnostics, Examples) {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2);
  auto d0 = delta_diagnostics(a, a);
  EXPECT_EQ(d0.delta_frobenius, 0.0);
  EXPECT_EQ(d0.delta_max, 0.0);
  auto d1 = delta_diagnostics(a + Eigen::Vector2d(3, 4).asDiagonal().toDenseMatrix(), a);
  EXPECT_NEAR(d1.delta_frobenius, 5.0, 1e-14);
  EXPECT_NEAR(d1.delta_max, 4.0, 1e-14);
  Eigen::MatrixXd off = a;
  off(0, 1) = off(1, 0) = 2;
  auto d2 = delta_diagnostics(a, off);
  EXPECT_NEAR(d2.delta_frobenius, 2 * std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(d2.delta_max, 2.0, 1e-14);
  EXPECT_LE(d2.delta_max, d2.delta_frobenius);
}

TEST(DeltaDiagnostics, ConstantSeriesAgainstItself) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Constant(30, 3, 2.5);
  const Eigen::MatrixXd c = conditional_covariance(block_sums(x, 4));
  auto d = delta_diagnostics(c, c);
  EXPECT_EQ(d.delta_frobenius, 0.0);
}

TEST(DefaultBlockGrid, CubeRootMultiples) {
  EXPECT_EQ(default_block_grid(500), (std::vector<Index>{4, 6, 8, 12, 16, 24}));
}

TEST(SelectBlockSize, SingleCandidate) {
  EXPECT_EQ(select_block_size(m1_series(100, 2, 1), std::vector<Index>{7}), 7);
}

// Brute-force batteries over 200 seeded trials.
TEST(SelectBlockSize, WhiteNoisePrefersSmallWindows) {
  const std::vector<Index> grid = default_block_grid(500);
  int lower = 0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    const Index L = select_block_size(white_noise(500, 5, t), grid);
    if (L <= grid[2]) ++lower;
  }
  EXPECT_GE(lower, 140);
}

TEST(SelectBlockSize, M1WithinGridRange) {
  int inside = 0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    const Index L = select_block_size(m1_series(500, 5, 1000 + t));
    if (L >= 4 && L <= 24) ++inside;
  }
  EXPECT_GE(inside, 180);
}
