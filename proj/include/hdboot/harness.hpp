#pragma once

#include "hdboot/error.hpp"
#include "hdboot/inference.hpp"
#include "hdboot/models.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hdboot {

enum class ExperimentKind {
  Type1Combined,
  Type1Threshold,
  PowerCombined,
  PowerThreshold,
  RateDelta,
  RateGa,
};
std::string_view to_string(ExperimentKind kind) noexcept;
ExperimentKind parse_experiment_kind(std::string_view name);

/// Combined-test power alternatives: beta0 + delta e_1 or (1 + delta) beta0.
enum class Alternative { Sparse, Uniform };
std::string_view to_string(Alternative a) noexcept;
Alternative parse_alternative(std::string_view name);

/// What the Gaussian-approximation probe samples: the null regression
/// statistic sqrt(n)(beta_hat - beta) or the raw scaled sum X_n / sqrt(n).
enum class GaSource { Regression, Series };
std::string_view to_string(GaSource s) noexcept;
GaSource parse_ga_source(std::string_view name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Type1Combined;
  /// Generator template; n, d and seed are filled in per cell and rep.
  ModelSpec model;
  std::vector<Index> d_grid = {5, 10, 15, 20, 25};
  std::vector<double> alpha_grid = {0.05, 0.10};
  Index reps = 2000;
  Index B = 1000;
  Index n = 500;
  std::vector<double> delta_grid;
  Alternative alternative = Alternative::Sparse;
  /// Threshold sparsity fractions; r = round(fraction * d) leading zeros.
  std::vector<double> r_grid = {0.0};
  std::optional<Index> L;  ///< fixed window; minimal-volatility choice if empty
  Index b_sigma = kDefaultSigmaDraws;
  std::vector<Index> n_grid;  ///< rate kinds only
  Index aux_series = 2000;    ///< Monte Carlo target size for rate kinds
  Index ga_samples = 2000;
  Index gauss_draws = 0;  ///< 0 means ga_samples
  GaSource ga_source = GaSource::Regression;
  std::uint64_t seed = 0;
  int workers = 1;

  void validate() const;
};

struct ReportCell {
  ExperimentKind kind = ExperimentKind::Type1Combined;
  ModelId model = ModelId::M1;
  Index n = 0;
  Index d = 0;
  std::optional<double> alpha;
  std::optional<double> delta;
  std::optional<double> r;
  std::optional<double> rejection_rate;
  std::optional<double> mc_se;
  Index reps = 0;
  /// Named diagnostics of the rate kinds, in emission order.
  std::vector<std::pair<std::string, double>> metrics;

  double metric(std::string_view name) const;
  bool operator==(const ReportCell&) const = default;
};

struct SeedLedgerEntry {
  Index scenario = 0;
  Index rep = 0;
  Index attempt = 0;
  std::uint64_t stream_seed = 0;
  bool operator==(const SeedLedgerEntry&) const = default;
};

struct ExperimentReport {
  std::vector<ReportCell> cells;
  double runtime_seconds = 0.0;
  ExperimentConfig config;
  std::vector<SeedLedgerEntry> seed_ledger;
  Index failed_attempts = 0;
};

/// More than 1% of a scenario's reps failed (e.g. singular designs).
class ExperimentAborted : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

ExperimentReport run_type1(const ExperimentConfig& config);
ExperimentReport run_power(const ExperimentConfig& config);
ExperimentReport run_rate_delta(const ExperimentConfig& config);
ExperimentReport run_rate_ga(const ExperimentConfig& config);
/// Dispatches on config.kind.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Result of one Monte Carlo rep of a testing experiment.
struct RepResult {
  double p_value = 1.0;
  Index attempts = 1;
  std::uint64_t stream_seed = 0;
  bool failed = false;
};

/// Generates one dataset for `scenario` / `rep` and runs the configured
/// test, resampling with a fresh stream after a singular design up to
/// `max_attempts` times.
RepResult run_test_rep(const ExperimentConfig& config, Index d,
                       const Eigen::VectorXd& beta_true,
                       const Eigen::VectorXd& beta0, Index scenario, Index rep,
                       Index max_attempts);

/// Reference curve d (sqrt(L / n) + 1 / L) for the covariance mismatch.
double delta_reference(Index n, Index d, Index L);

/// Statistic used by the GA probe: the combined norm for d >= 2, |v| for d = 1.
double ga_statistic(const Eigen::VectorXd& v);

enum class ReportFormat { Csv, Json };

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& j);

/// CSV columns kind,model,n,d,alpha,delta,r,rejection_rate,mc_se,reps plus
/// one column per metric name (rate kinds).  Absent values are empty fields.
std::string report_csv(const ExperimentReport& report);
void emit_report(const ExperimentReport& report, ReportFormat format,
                 const std::filesystem::path& path);

}  // namespace hdboot
