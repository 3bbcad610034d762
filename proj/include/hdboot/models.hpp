#pragma once

#include "hdboot/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace hdboot {

using Index = Eigen::Index;

/// The five stock non-stationary generators plus the regression design.
enum class ModelId { M1, M2, M3, M4, M5, Regression };

std::string_view to_string(ModelId id) noexcept;
ModelId parse_model_id(std::string_view name);

inline constexpr Index kDefaultBurnIn = 200;

/// Declarative description of a generating mechanism.
struct ModelSpec {
  ModelId model = ModelId::M1;
  Index n = 500;
  Index d = 1;
  Index burn_in = kDefaultBurnIn;
  /// Degrees of freedom of the multivariate-t innovations (M5 only).
  double t_df = 5.0;
  /// Off-diagonal entry of the tridiagonal coupling matrix (M2 only).
  double band_value = 0.2;
  std::optional<Eigen::VectorXd> beta;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument when the invariants do not hold.
  void validate() const;
};

/// An n x d sample; row i (0-based) holds the observation at time i + 1.
class TimeSeriesMatrix {
 public:
  TimeSeriesMatrix() = default;
  /// Throws NumericalError if any entry is not finite.
  explicit TimeSeriesMatrix(Eigen::MatrixXd data);

  Index n() const noexcept { return data_.rows(); }
  Index d() const noexcept { return data_.cols(); }
  const Eigen::MatrixXd& data() const noexcept { return data_; }

 private:
  Eigen::MatrixXd data_;
};

struct RegressionDataset {
  TimeSeriesMatrix X;
  Eigen::VectorXd y;
  Eigen::VectorXd beta_true;
  Eigen::VectorXd eps;
};

/// Fills `out` with the innovation for (signed) time index t.  Burn-in
/// steps use t <= 0; the retained sample uses t = 1..n.
using InnovationFn = std::function<void(std::int64_t t, std::span<double> out)>;

/// Time-varying AR coefficient of model M1..M5 at retained index i.
/// Indices below 1 are clamped to 1 so burn-in reuses the first coefficient.
double ar_coefficient(ModelId model, Index i, Index n);

/// Coefficient 14(i/n)^2(1-i/n)^2 - 0.5 of the regression error process.
double error_coefficient(Index i, Index n);

/// Tridiagonal M2 coupling matrix: 1 on the diagonal, band off-diagonal.
Eigen::MatrixXd band_matrix(Index d, double band);

/// Innovation source of the stock models, keyed by `seed` and the
/// predictor tag.  Gaussian for M1..M4, scaled multivariate t for M5.
InnovationFn model_innovations(const ModelSpec& spec);
InnovationFn model_innovations(const ModelSpec& spec, std::uint64_t seed,
                               StreamTag tag);

/// One recursion step: state <- a(t) * M * state + innovation, with M = I
/// except for M2.  `t` may be a burn-in index.
void advance_state(const ModelSpec& spec, std::int64_t t,
                   std::span<double> state, std::span<const double> innovation);

/// Runs burn_in + n steps from the zero vector and keeps the last n.
TimeSeriesMatrix simulate_model(const ModelSpec& spec);
TimeSeriesMatrix simulate_model(const ModelSpec& spec,
                                const InnovationFn& innovations);

/// Regression error process epsilon_1..epsilon_n (zero start, burn-in
/// handled like the predictors).
Eigen::VectorXd simulate_error_process(Index n, std::uint64_t seed,
                                       Index burn_in = kDefaultBurnIn);
Eigen::VectorXd simulate_error_process(Index n, const InnovationFn& eta,
                                       Index burn_in = kDefaultBurnIn);

/// Predictors from simulate_model, errors from an independent stream keyed
/// by `error_seed`, and y = X beta + eps.
RegressionDataset generate_regression(const ModelSpec& spec,
                                      const Eigen::VectorXd& beta,
                                      std::uint64_t error_seed);
/// Uses spec.seed for the error stream as well; the tags keep them apart.
RegressionDataset generate_regression(const ModelSpec& spec,
                                      const Eigen::VectorXd& beta);

/// beta0 = [0_r, 1_{d-r}].
Eigen::VectorXd sparse_ones(Index d, Index r);

}  // namespace hdboot
