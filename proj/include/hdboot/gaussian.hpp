#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <utility>

namespace hdboot {

/// Symmetric positive (semi)definite matrix.
///
/// Construction symmetrizes the input (it must already be symmetric within
/// 1e-8) and rejects eigenvalues below -1e-10.  Eigenvalues in (-1e-10, 1e-12)
/// are accepted; functions that take roots clip them to 1e-12 and warn.
class SpdMatrix {
 public:
  explicit SpdMatrix(const Eigen::MatrixXd& entries);

  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  Eigen::Index d() const noexcept { return entries_.rows(); }
  const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
  const Eigen::MatrixXd& eigenvectors() const noexcept { return eigenvectors_; }
  double min_eigenvalue() const noexcept { return eigenvalues_(0); }

 private:
  Eigen::MatrixXd entries_;
  Eigen::VectorXd eigenvalues_;  // ascending
  Eigen::MatrixXd eigenvectors_;
};

/// x = S1^{1/2} z and y = S2^{1/2} z for a shared standard normal z.
struct CoupledPair {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd z_source;
};

/// Q diag(f(lambda)) Q^T with eigenvalues clipped at 1e-12.
Eigen::MatrixXd spd_function(const SpdMatrix& s, double (*f)(double));

/// Symmetric square root Q Lambda^{1/2} Q^T.
SpdMatrix spd_sqrt(const SpdMatrix& s);
/// Symmetric inverse square root; requires eigenvalues > 1e-12.
Eigen::MatrixXd spd_inv_sqrt(const SpdMatrix& s);

/// 2-Wasserstein distance between N(0, S1) and N(0, S2) (the distance,
/// not its square).
double gaussian_w2(const SpdMatrix& s1, const SpdMatrix& s2);

CoupledPair coupled_gaussian_pair(const SpdMatrix& s1, const SpdMatrix& s2,
                                  std::uint64_t seed);
/// Same coupling with a caller-supplied z.
CoupledPair coupled_gaussian_pair(const SpdMatrix& s1, const SpdMatrix& s2,
                                  const Eigen::VectorXd& z);

/// lambda_*^{-1} |S1 - S2|_F^2, the bound on E|x - y|^2 for the shared-z
/// coupling.  Warns when lambda_star exceeds both smallest eigenvalues.
double coupling_bound(const SpdMatrix& s1, const SpdMatrix& s2, double lambda_star);

/// Total-variation bound (3/2) min{1, sqrt(sum rho_i^2)}, where rho_i are the
/// eigenvalues of S1^{-1} S2 - I.
double tv_bound(const SpdMatrix& s1, const SpdMatrix& s2);

/// (|S1^{1/2} - S2^{1/2}|_F, lambda_*^{-1/2} |S1 - S2|_F).  lambda_star must
/// be positive and no larger than either smallest eigenvalue.
std::pair<double, double> vha_check(const SpdMatrix& s1, const SpdMatrix& s2,
                                    double lambda_star);

/// Exact W2 between two equal-size empirical measures on the line.
double empirical_w2_1d(std::span<const double> a, std::span<const double> b);

/// Two-sample Kolmogorov distance sup_x |F_a(x) - F_b(x)|.
double empirical_kolmogorov(std::span<const double> a, std::span<const double> b);

}  // namespace hdboot
