#include "hdboot/gaussian.hpp"

#include "hdboot/error.hpp"
#include "hdboot/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace hdboot {

namespace {

constexpr double kSymmetryTol = 1e-8;
constexpr double kNegativeTol = 1e-10;
constexpr double kClip = 1e-12;

void require_same_dim(const SpdMatrix& a, const SpdMatrix& b, const char* what) {
  require(a.d() == b.d(), std::string(what) + ": dimension mismatch");
}

double clipped(double lambda) {
  if (lambda < kClip) {
    warn("eigenvalue " + std::to_string(lambda) + " clipped to 1e-12");
    return kClip;
  }
  return lambda;
}

}  // namespace

SpdMatrix::SpdMatrix(const Eigen::MatrixXd& entries) {
  require(entries.rows() == entries.cols() && entries.rows() > 0,
          "SpdMatrix: matrix must be square and non-empty");
  if (!entries.allFinite()) throw NumericalError("SpdMatrix: non-finite entry");
  require((entries - entries.transpose()).cwiseAbs().maxCoeff() <= kSymmetryTol,
          "SpdMatrix: matrix is not symmetric within 1e-8");
  entries_ = 0.5 * (entries + entries.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(entries_);
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
  if (eigenvalues_(0) < -kNegativeTol) {
    throw NumericalError("SpdMatrix: smallest eigenvalue " +
                         std::to_string(eigenvalues_(0)) + " is negative");
  }
}

Eigen::MatrixXd spd_function(const SpdMatrix& s, double (*f)(double)) {
  const Eigen::VectorXd& lambda = s.eigenvalues();
  Eigen::VectorXd mapped(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) mapped(i) = f(clipped(lambda(i)));
  const Eigen::MatrixXd& q = s.eigenvectors();
  Eigen::MatrixXd out = q * mapped.asDiagonal() * q.transpose();
  return 0.5 * (out + out.transpose());
}

SpdMatrix spd_sqrt(const SpdMatrix& s) {
  return SpdMatrix(spd_function(s, [](double v) { return std::sqrt(v); }));
}

Eigen::MatrixXd spd_inv_sqrt(const SpdMatrix& s) {
  return spd_function(s, [](double v) { return 1.0 / std::sqrt(v); });
}

double gaussian_w2(const SpdMatrix& s1, const SpdMatrix& s2) {
  require_same_dim(s1, s2, "gaussian_w2");
  const Eigen::MatrixXd root = spd_sqrt(s1).entries();
  const Eigen::MatrixXd inner = root * s2.entries() * root;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      0.5 * (inner + inner.transpose()), Eigen::EigenvaluesOnly);
  double cross = 0.0;
  for (double v : solver.eigenvalues()) cross += std::sqrt(std::max(v, 0.0));
  const double squared =
      s1.entries().trace() + s2.entries().trace() - 2.0 * cross;
  return std::sqrt(std::max(squared, 0.0));
}

CoupledPair coupled_gaussian_pair(const SpdMatrix& s1, const SpdMatrix& s2,
                                  const Eigen::VectorXd& z) {
  require_same_dim(s1, s2, "coupled_gaussian_pair");
  require(z.size() == s1.d(), "coupled_gaussian_pair: z has the wrong size");
  CoupledPair out;
  out.z_source = z;
  out.x = spd_sqrt(s1).entries() * z;
  out.y = spd_sqrt(s2).entries() * z;
  return out;
}

CoupledPair coupled_gaussian_pair(const SpdMatrix& s1, const SpdMatrix& s2,
                                  std::uint64_t seed) {
  Stream stream(seed, StreamTag::Coupling, 0);
  Eigen::VectorXd z(s1.d());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = stream.normal();
  return coupled_gaussian_pair(s1, s2, z);
}

double coupling_bound(const SpdMatrix& s1, const SpdMatrix& s2, double lambda_star) {
  require_same_dim(s1, s2, "coupling_bound");
  require(lambda_star > 0.0 && std::isfinite(lambda_star),
          "coupling_bound: lambda_star must be positive");
  if (lambda_star > std::max(s1.min_eigenvalue(), s2.min_eigenvalue())) {
    warn("coupling_bound: lambda_star exceeds the smallest eigenvalue of both inputs");
  }
  const double f = (s1.entries() - s2.entries()).norm();
  return f * f / lambda_star;
}

double tv_bound(const SpdMatrix& s1, const SpdMatrix& s2) {
  require_same_dim(s1, s2, "tv_bound");
  require(s1.min_eigenvalue() > kClip, "tv_bound: S1 must be invertible");
  const Eigen::MatrixXd r = spd_inv_sqrt(s1);
  const Eigen::MatrixXd m =
      r * s2.entries() * r - Eigen::MatrixXd::Identity(s1.d(), s1.d());
  // sum rho_i^2 = |S1^{-1/2} S2 S1^{-1/2} - I|_F^2 (a symmetric similarity).
  return 1.5 * std::min(1.0, m.norm());
}

std::pair<double, double> vha_check(const SpdMatrix& s1, const SpdMatrix& s2,
                                    double lambda_star) {
  require_same_dim(s1, s2, "vha_check");
  const double floor = std::min(s1.min_eigenvalue(), s2.min_eigenvalue());
  require(lambda_star > 0.0 && lambda_star <= floor * (1.0 + 1e-12),
          "vha_check: lambda_star must lie in (0, smallest eigenvalue]");
  const double lhs = (spd_sqrt(s1).entries() - spd_sqrt(s2).entries()).norm();
  const double rhs = (s1.entries() - s2.entries()).norm() / std::sqrt(lambda_star);
  return {lhs, rhs};
}

double empirical_w2_1d(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "empirical_w2_1d: sample sizes differ");
  require(a.size() >= 2, "empirical_w2_1d: need at least two samples");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    const double diff = sa[i] - sb[i];
    acc += diff * diff;
  }
  return std::sqrt(acc / static_cast<double>(sa.size()));
}

double empirical_kolmogorov(std::span<const double> a, std::span<const double> b) {
  require(!a.empty() && !b.empty(), "empirical_kolmogorov: empty sample");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double best = 0.0;
  while (i < sa.size() && j < sb.size()) {
    // Step past every copy of the next grid value in both samples.
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < sb.size() && sb[j] == x) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na -
                                   static_cast<double>(j) / nb));
  }
  return best;
}

}  // namespace hdboot
