#include "hdboot/inference.hpp"

#include "hdboot/error.hpp"

#include <algorithm>
#include <cmath>

namespace hdboot {

namespace {

constexpr double kMaxCondition = 1e12;

void check_alpha(double alpha) {
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
}

void check_regression_shapes(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& beta0) {
  require(y.size() == x.rows(), "response length must equal the number of rows of X");
  require(beta0.size() == x.cols(), "beta0 length must equal the number of columns of X");
}

TestOutcome finish_outcome(double statistic, std::vector<double> draws,
                           double alpha, Index L, Index B, std::uint64_t seed,
                           TestKind kind) {
  TestOutcome out;
  out.statistic = statistic;
  out.p_value = bootstrap_p_value(draws, statistic);
  std::sort(draws.begin(), draws.end());
  out.boot_draws = std::move(draws);
  out.alpha = alpha;
  out.critical_value = critical_value(out.boot_draws, alpha);
  out.reject = out.p_value <= alpha;
  out.L = L;
  out.B = B;
  out.seed = seed;
  out.kind = kind;
  return out;
}

}  // namespace

std::string_view to_string(TestKind kind) noexcept {
  return kind == TestKind::Combined ? "combined" : "threshold";
}

TestKind parse_test_kind(std::string_view name) {
  if (name == "combined") return TestKind::Combined;
  if (name == "threshold") return TestKind::Threshold;
  throw InvalidArgument("unknown test kind '" + std::string(name) + "'");
}

TestOutcome TestOutcome::at_level(double level) const {
  check_alpha(level);
  TestOutcome out = *this;
  out.alpha = level;
  out.critical_value = hdboot::critical_value(boot_draws, level);
  out.reject = p_value <= level;
  return out;
}

double critical_value(const std::vector<double>& sorted_draws, double alpha) {
  check_alpha(alpha);
  require(!sorted_draws.empty(), "critical_value: no bootstrap draws");
  const auto B = static_cast<double>(sorted_draws.size());
  // The 1e-9 guard keeps e.g. 0.95 * 1000 from rounding up to 951.
  auto k = static_cast<std::size_t>(std::ceil((1.0 - alpha) * B - 1e-9));
  k = std::clamp<std::size_t>(k, 1, sorted_draws.size());
  return sorted_draws[k - 1];
}

double bootstrap_p_value(const std::vector<double>& draws, double statistic) {
  const auto exceed = std::count_if(draws.begin(), draws.end(),
                                    [statistic](double t) { return t >= statistic; });
  return (1.0 + static_cast<double>(exceed)) /
         (static_cast<double>(draws.size()) + 1.0);
}

OlsFit ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Index n = x.rows();
  const Index d = x.cols();
  require(d >= 1, "ols_fit: X has no columns");
  require(d < n, "ols_fit: requires d < n");
  require(y.size() == n, "ols_fit: y length must equal n");
  if (!x.allFinite() || !y.allFinite()) throw NumericalError("ols_fit: non-finite input");

  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose(), inv_n);
  gram = gram.selfadjointView<Eigen::Lower>();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxCondition) {
    throw SingularDesign("ols_fit: X^T X / n is singular or ill-conditioned");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw SingularDesign("ols_fit: Cholesky factorisation failed");
  }

  OlsFit fit;
  fit.condition_estimate = hi / lo;
  fit.gram_inv = llt.solve(Eigen::MatrixXd::Identity(d, d));
  fit.beta_hat = llt.solve(x.transpose() * y * inv_n);
  fit.residuals = y - x * fit.beta_hat;
  return fit;
}

double combined_norm(const Eigen::VectorXd& g) {
  const auto d = static_cast<double>(g.size());
  require(g.size() >= 2, "combined statistic requires d >= 2");
  return std::max(g.lpNorm<Eigen::Infinity>() / std::sqrt(2.0 * std::log(d)),
                  g.norm() / std::sqrt(d));
}

double combined_statistic(const Eigen::VectorXd& beta_hat,
                          const Eigen::VectorXd& beta0, Index n) {
  require(beta_hat.size() == beta0.size(), "combined_statistic: size mismatch");
  require(n >= 1, "combined_statistic: n must be positive");
  return combined_norm(std::sqrt(static_cast<double>(n)) * (beta_hat - beta0));
}

Eigen::MatrixXd score_matrix(const OlsFit& fit, const Eigen::MatrixXd& x) {
  require(fit.residuals.size() == x.rows() && fit.gram_inv.rows() == x.cols(),
          "score_matrix: fit does not match X");
  // Row i is (gram_inv x_i e_i)^T; gram_inv is symmetric.
  return fit.residuals.asDiagonal() * (x * fit.gram_inv);
}

Eigen::MatrixXd score_bootstrap(const OlsFit& fit, const Eigen::MatrixXd& x,
                                Index L, Index B, std::uint64_t seed,
                                StreamTag tag) {
  const BlockSums psi = block_sums(score_matrix(fit, x), L);
  return bootstrap_draws(psi, B, seed, tag).draws;
}

std::vector<double> combined_bootstrap(const OlsFit& fit, const Eigen::MatrixXd& x,
                                       Index L, Index B, std::uint64_t seed) {
  const Eigen::MatrixXd g = score_bootstrap(fit, x, L, B, seed, StreamTag::TestMultiplier);
  std::vector<double> out(static_cast<std::size_t>(B));
  for (Index b = 0; b < B; ++b) out[static_cast<std::size_t>(b)] = combined_norm(g.row(b).transpose());
  return out;
}

Index resolve_block_size(const OlsFit& fit, const Eigen::MatrixXd& x,
                         std::optional<Index> L) {
  if (L) {
    require(*L >= 1 && *L <= x.rows(), "block size L must satisfy 1 <= L <= n");
    return *L;
  }
  return select_block_size(score_matrix(fit, x), default_block_grid(x.rows()));
}

TestOutcome run_combined_test(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& beta0, double alpha,
                              std::optional<Index> L, Index B, std::uint64_t seed) {
  check_alpha(alpha);
  check_regression_shapes(x, y, beta0);
  require(x.cols() >= 2, "combined test requires d >= 2");
  require(B >= 1, "B must be at least 1");
  const OlsFit fit = ols_fit(x, y);
  const Index window = resolve_block_size(fit, x, L);
  const double t = combined_statistic(fit.beta_hat, beta0, x.rows());
  return finish_outcome(t, combined_bootstrap(fit, x, window, B, seed), alpha,
                        window, B, seed, TestKind::Combined);
}

double soft_threshold(double x, double lambda) {
  require(lambda >= 0.0, "soft_threshold: lambda must be non-negative");
  if (std::abs(x) < lambda) return 0.0;
  return std::copysign(std::abs(x) - lambda, x);
}

ThresholdConfig estimate_sigma_hat(const OlsFit& fit, const Eigen::MatrixXd& x,
                                   Index L, Index b_sigma, std::uint64_t seed) {
  require(b_sigma >= 50, "estimate_sigma_hat: b_sigma must be at least 50");
  const Index n = x.rows();
  const Eigen::MatrixXd g =
      score_bootstrap(fit, x, L, b_sigma, seed, StreamTag::SigmaMultiplier) /
      std::sqrt(static_cast<double>(n));
  const Eigen::RowVectorXd mean = g.colwise().mean();
  ThresholdConfig cfg;
  cfg.b_sigma = b_sigma;
  cfg.sigma_hat = ((g.rowwise() - mean).colwise().squaredNorm() /
                   static_cast<double>(b_sigma - 1))
                      .cwiseSqrt()
                      .transpose();
  const double nd = static_cast<double>(n);
  cfg.lambda = cfg.sigma_hat * std::sqrt(2.0 * std::log(nd) / nd);
  return cfg;
}

double threshold_statistic(const Eigen::VectorXd& beta_hat,
                           const Eigen::VectorXd& beta0,
                           const Eigen::VectorXd& lambda, Index n) {
  require(beta_hat.size() == beta0.size() && lambda.size() == beta0.size(),
          "threshold_statistic: size mismatch");
  double worst = 0.0;
  for (Index j = 0; j < beta0.size(); ++j) {
    worst = std::max(worst, std::abs(soft_threshold(beta_hat(j), lambda(j)) - beta0(j)));
  }
  return std::sqrt(static_cast<double>(n)) * worst;
}

TestOutcome run_threshold_test(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& beta0, double alpha,
                               std::optional<Index> L, Index B, Index b_sigma,
                               std::uint64_t seed) {
  check_alpha(alpha);
  check_regression_shapes(x, y, beta0);
  require(B >= 1, "B must be at least 1");
  const Index n = x.rows();
  const OlsFit fit = ols_fit(x, y);
  const Index window = resolve_block_size(fit, x, L);
  const ThresholdConfig cfg = estimate_sigma_hat(fit, x, window, b_sigma, seed);
  const double t = threshold_statistic(fit.beta_hat, beta0, cfg.lambda, n);

  const double root_n = std::sqrt(static_cast<double>(n));
  const Eigen::MatrixXd g =
      score_bootstrap(fit, x, window, B, seed, StreamTag::TestMultiplier);
  std::vector<double> draws(static_cast<std::size_t>(B));
  for (Index b = 0; b < B; ++b) {
    const Eigen::VectorXd shifted = beta0 + g.row(b).transpose() / root_n;
    draws[static_cast<std::size_t>(b)] = threshold_statistic(shifted, beta0, cfg.lambda, n);
  }
  return finish_outcome(t, std::move(draws), alpha, window, B, seed,
                        TestKind::Threshold);
}

}  // namespace hdboot
