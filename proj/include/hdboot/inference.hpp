#pragma once

#include "hdboot/bootstrap.hpp"
#include "hdboot/models.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hdboot {

struct OlsFit {
  Eigen::VectorXd beta_hat;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd gram_inv;  ///< (X^T X / n)^{-1}
  double condition_estimate = 0.0;
};

enum class TestKind { Combined, Threshold };
std::string_view to_string(TestKind kind) noexcept;
TestKind parse_test_kind(std::string_view name);

struct TestOutcome {
  double statistic = 0.0;
  std::vector<double> boot_draws;  ///< T^B, sorted ascending
  double critical_value = 0.0;
  double p_value = 1.0;
  double alpha = 0.05;
  bool reject = false;
  Index L = 1;
  Index B = 0;
  std::uint64_t seed = 0;
  TestKind kind = TestKind::Combined;

  /// Same draws evaluated at another level.
  TestOutcome at_level(double alpha) const;
};

struct ThresholdConfig {
  Eigen::VectorXd lambda;     ///< lambda_j = sigma_hat_j sqrt(2 log n / n)
  Eigen::VectorXd sigma_hat;
  Index b_sigma = 200;
};

inline constexpr Index kDefaultSigmaDraws = 200;

/// Solves the normal equations by Cholesky on X^T X / n.  Throws
/// SingularDesign when X^T X / n is not positive definite or its eigenvalue
/// ratio exceeds 1e12, and InvalidArgument when d >= n.
OlsFit ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);
inline OlsFit ols_fit(const RegressionDataset& data) {
  return ols_fit(data.X.data(), data.y);
}

/// max{ |b - b0|_inf sqrt(n) / sqrt(2 log d), |b - b0| sqrt(n / d) }.
double combined_statistic(const Eigen::VectorXd& beta_hat,
                          const Eigen::VectorXd& beta0, Index n);
/// Bootstrap counterpart max{ |G|_inf / sqrt(2 log d), |G| / sqrt(d) }.
double combined_norm(const Eigen::VectorXd& g);

/// Rows z_i = (X^T X / n)^{-1} x_i e_i.
Eigen::MatrixXd score_matrix(const OlsFit& fit, const Eigen::MatrixXd& x);

/// B bootstrap vectors G_n (rows) built from the score block sums.
Eigen::MatrixXd score_bootstrap(const OlsFit& fit, const Eigen::MatrixXd& x,
                                Index L, Index B, std::uint64_t seed,
                                StreamTag tag);

/// T^B for each of B draws (unsorted, draw order).
std::vector<double> combined_bootstrap(const OlsFit& fit, const Eigen::MatrixXd& x,
                                       Index L, Index B, std::uint64_t seed);

/// Block size for a regression: `L` if given, else the minimal-volatility
/// choice on the score series.
Index resolve_block_size(const OlsFit& fit, const Eigen::MatrixXd& x,
                         std::optional<Index> L);

/// Combined L2/Linf test of H0: beta = beta0.
TestOutcome run_combined_test(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& beta0, double alpha,
                              std::optional<Index> L, Index B, std::uint64_t seed);
inline TestOutcome run_combined_test(const RegressionDataset& data,
                                     const Eigen::VectorXd& beta0, double alpha,
                                     std::optional<Index> L, Index B,
                                     std::uint64_t seed) {
  return run_combined_test(data.X.data(), data.y, beta0, alpha, L, B, seed);
}

/// sgn(x)(|x| - lambda) when |x| >= lambda, else 0.
double soft_threshold(double x, double lambda);

/// sigma_hat_j from b_sigma score-bootstrap draws on the sigma stream, which
/// is disjoint from the test stream.
ThresholdConfig estimate_sigma_hat(const OlsFit& fit, const Eigen::MatrixXd& x,
                                   Index L, Index b_sigma, std::uint64_t seed);

/// Soft-threshold Linf test of H0: beta = beta0.
TestOutcome run_threshold_test(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& beta0, double alpha,
                               std::optional<Index> L, Index B, Index b_sigma,
                               std::uint64_t seed);
inline TestOutcome run_threshold_test(const RegressionDataset& data,
                                      const Eigen::VectorXd& beta0, double alpha,
                                      std::optional<Index> L, Index B,
                                      Index b_sigma, std::uint64_t seed) {
  return run_threshold_test(data.X.data(), data.y, beta0, alpha, L, B, b_sigma,
                            seed);
}

/// sqrt(n) |soft(b) - b0|_inf with coordinate thresholds lambda.
double threshold_statistic(const Eigen::VectorXd& beta_hat,
                           const Eigen::VectorXd& beta0,
                           const Eigen::VectorXd& lambda, Index n);

/// ceil((1 - alpha) B)-th order statistic of sorted draws.
double critical_value(const std::vector<double>& sorted_draws, double alpha);
/// (1 + #{T^B >= T}) / (B + 1).
double bootstrap_p_value(const std::vector<double>& draws, double statistic);

}  // namespace hdboot
