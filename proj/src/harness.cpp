#include "hdboot/harness.hpp"

#include "hdboot/bootstrap.hpp"
#include "hdboot/csv_io.hpp"
#include "hdboot/gaussian.hpp"
#include "hdboot/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace hdboot {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Index allowed_failures(Index reps) { return reps / 100; }

Index round_r(double fraction, Index d) {
  return static_cast<Index>(std::llround(fraction * static_cast<double>(d)));
}

ModelSpec cell_spec(const ExperimentConfig& config, Index n, Index d,
                    std::uint64_t seed) {
  ModelSpec spec = config.model;
  spec.n = n;
  spec.d = d;
  spec.seed = seed;
  spec.beta.reset();
  return spec;
}

bool is_threshold(ExperimentKind k) {
  return k == ExperimentKind::Type1Threshold || k == ExperimentKind::PowerThreshold;
}

double median(std::vector<double> v) {
  require(!v.empty(), "median of an empty sample");
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

// Row s is the column sum of series s divided by sqrt(n).
Eigen::MatrixXd scaled_sums(const ExperimentConfig& config, Index n, Index d,
                            Index count, std::uint64_t base_seed, int workers) {
  Eigen::MatrixXd out(count, d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
#pragma omp parallel for num_threads(workers) schedule(dynamic, 16)
  for (Index s = 0; s < count; ++s) {
    const ModelSpec spec =
        cell_spec(config, n, d, derive_seed(base_seed, {static_cast<std::uint64_t>(s)}));
    out.row(s) = simulate_model(spec).data().colwise().sum() * scale;
  }
  return out;
}

// Row s is sqrt(n)(beta_hat - beta) for a null regression dataset.
Eigen::MatrixXd null_regression_stats(const ExperimentConfig& config, Index n,
                                      Index d, Index count,
                                      std::uint64_t base_seed, int workers) {
  Eigen::MatrixXd out(count, d);
  const Eigen::VectorXd beta = Eigen::VectorXd::Ones(d);
  const double root_n = std::sqrt(static_cast<double>(n));
  std::vector<char> failed(static_cast<std::size_t>(count), 0);
#pragma omp parallel for num_threads(workers) schedule(dynamic, 16)
  for (Index s = 0; s < count; ++s) {
    for (Index attempt = 0; attempt < 3; ++attempt) {
      const std::uint64_t seed = derive_seed(
          base_seed, {static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(attempt)});
      try {
        const RegressionDataset data = generate_regression(cell_spec(config, n, d, seed), beta);
        out.row(s) = (root_n * (ols_fit(data).beta_hat - beta)).transpose();
        failed[static_cast<std::size_t>(s)] = 0;
        break;
      } catch (const SingularDesign&) {
        failed[static_cast<std::size_t>(s)] = 1;
      }
    }
  }
  if (std::count(failed.begin(), failed.end(), 1) > 0) {
    throw ExperimentAborted("GA probe: repeated singular designs");
  }
  return out;
}

Eigen::MatrixXd second_moment(const Eigen::MatrixXd& rows) {
  return rows.transpose() * rows / static_cast<double>(rows.rows());
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& rows) {
  const Eigen::RowVectorXd mean = rows.colwise().mean();
  const Eigen::MatrixXd centered = rows.rowwise() - mean;
  return centered.transpose() * centered / static_cast<double>(rows.rows() - 1);
}

}  // namespace

// ---------------------------------------------------------------------------
// enum names

std::string_view to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::Type1Combined: return "TYPE1_COMBINED";
    case ExperimentKind::Type1Threshold: return "TYPE1_THRESHOLD";
    case ExperimentKind::PowerCombined: return "POWER_COMBINED";
    case ExperimentKind::PowerThreshold: return "POWER_THRESHOLD";
    case ExperimentKind::RateDelta: return "RATE_DELTA";
    case ExperimentKind::RateGa: return "RATE_GA";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (ExperimentKind k :
       {ExperimentKind::Type1Combined, ExperimentKind::Type1Threshold,
        ExperimentKind::PowerCombined, ExperimentKind::PowerThreshold,
        ExperimentKind::RateDelta, ExperimentKind::RateGa}) {
    if (name == to_string(k)) return k;
  }
  throw InvalidArgument("unknown experiment kind '" + std::string(name) + "'");
}

std::string_view to_string(Alternative a) noexcept {
  return a == Alternative::Sparse ? "SPARSE" : "UNIFORM";
}

Alternative parse_alternative(std::string_view name) {
  if (name == "SPARSE" || name == "sparse") return Alternative::Sparse;
  if (name == "UNIFORM" || name == "uniform") return Alternative::Uniform;
  throw InvalidArgument("unknown alternative '" + std::string(name) + "'");
}

std::string_view to_string(GaSource s) noexcept {
  return s == GaSource::Regression ? "regression" : "series";
}

GaSource parse_ga_source(std::string_view name) {
  if (name == "regression") return GaSource::Regression;
  if (name == "series") return GaSource::Series;
  throw InvalidArgument("unknown GA source '" + std::string(name) + "'");
}

double ReportCell::metric(std::string_view name) const {
  for (const auto& [key, value] : metrics) {
    if (key == name) return value;
  }
  throw InvalidArgument("report cell has no metric '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  require(reps >= 1, "config: reps must be at least 1");
  require(B >= 1, "config: B must be at least 1");
  require(workers >= 1, "config: workers must be at least 1");
  require(!d_grid.empty(), "config: d_grid is empty");
  require(model.model != ModelId::Regression,
          "config: the model template must be one of M1..M5");
  const bool rate = kind == ExperimentKind::RateDelta || kind == ExperimentKind::RateGa;
  if (rate) {
    require(!n_grid.empty(), "config: rate experiments need a non-empty n_grid");
    for (Index nn : n_grid) require(nn >= 2, "config: every n must be at least 2");
    for (Index d : d_grid) require(d >= 1, "config: every d must be positive");
    require(aux_series >= 2, "config: aux_series must be at least 2");
    if (kind == ExperimentKind::RateGa) {
      require(ga_samples >= 2, "config: ga_samples must be at least 2");
      require(gauss_draws == 0 || gauss_draws >= ga_samples,
              "config: gauss_draws must be 0 or at least ga_samples");
      if (ga_source == GaSource::Regression) {
        for (Index nn : n_grid) {
          for (Index d : d_grid) require(d < nn, "config: regression GA needs d < n");
        }
      }
    }
    return;
  }
  require(n >= 3, "config: n must be at least 3");
  for (Index d : d_grid) {
    require(d >= 2 && d < n, "config: every d must satisfy 2 <= d < n");
  }
  require(!alpha_grid.empty(), "config: alpha_grid is empty");
  for (double a : alpha_grid) require(a > 0.0 && a < 1.0, "config: alpha must lie in (0, 1)");
  if (kind == ExperimentKind::PowerCombined || kind == ExperimentKind::PowerThreshold) {
    require(!delta_grid.empty(), "config: power experiments need a delta_grid");
  }
  if (is_threshold(kind)) {
    require(!r_grid.empty(), "config: r_grid is empty");
    for (double r : r_grid) require(r >= 0.0 && r <= 1.0, "config: r fractions lie in [0, 1]");
    require(b_sigma >= 50, "config: b_sigma must be at least 50");
  }
  if (L) require(*L >= 1 && *L <= n, "config: L must satisfy 1 <= L <= n");
}

// ---------------------------------------------------------------------------
// testing experiments

RepResult run_test_rep(const ExperimentConfig& config, Index d,
                       const Eigen::VectorXd& beta_true,
                       const Eigen::VectorXd& beta0, Index scenario, Index rep,
                       Index max_attempts) {
  RepResult result;
  const bool threshold = is_threshold(config.kind);
  for (Index attempt = 0; attempt < max_attempts; ++attempt) {
    const std::uint64_t stream_seed = derive_seed(
        config.seed, {static_cast<std::uint64_t>(StreamTag::Experiment),
                      static_cast<std::uint64_t>(scenario),
                      static_cast<std::uint64_t>(rep),
                      static_cast<std::uint64_t>(attempt)});
    result.stream_seed = stream_seed;
    result.attempts = attempt + 1;
    try {
      const RegressionDataset data =
          generate_regression(cell_spec(config, config.n, d, stream_seed), beta_true);
      const double alpha = config.alpha_grid.front();
      const TestOutcome outcome =
          threshold ? run_threshold_test(data, beta0, alpha, config.L, config.B,
                                         config.b_sigma, stream_seed)
                    : run_combined_test(data, beta0, alpha, config.L, config.B,
                                        stream_seed);
      result.p_value = outcome.p_value;
      result.failed = false;
      return result;
    } catch (const SingularDesign&) {
      result.failed = true;
    }
  }
  return result;
}

namespace {

struct Scenario {
  Index d = 0;
  std::optional<double> delta;
  std::optional<Index> r;
  Eigen::VectorXd beta0;
  Eigen::VectorXd beta_true;
};

std::vector<Scenario> build_scenarios(const ExperimentConfig& config) {
  const bool power = config.kind == ExperimentKind::PowerCombined ||
                     config.kind == ExperimentKind::PowerThreshold;
  const bool threshold = is_threshold(config.kind);
  std::vector<std::optional<double>> deltas;
  if (power) {
    for (double delta : config.delta_grid) deltas.emplace_back(delta);
  } else {
    deltas.emplace_back(std::nullopt);
  }
  std::vector<Scenario> out;
  for (Index d : config.d_grid) {
    std::vector<std::optional<Index>> rs;
    if (threshold) {
      for (double f : config.r_grid) rs.emplace_back(round_r(f, d));
    } else {
      rs.emplace_back(std::nullopt);
    }
    for (const auto& r : rs) {
      for (const auto& delta : deltas) {
        Scenario s;
        s.d = d;
        s.r = r;
        s.delta = delta;
        s.beta0 = threshold ? sparse_ones(d, *r) : Eigen::VectorXd::Ones(d);
        s.beta_true = s.beta0;
        if (delta) {
          if (!threshold && config.alternative == Alternative::Uniform) {
            s.beta_true = (1.0 + *delta) * s.beta0;
          } else {
            s.beta_true(0) += *delta;
          }
        }
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

ExperimentReport run_testing(const ExperimentConfig& config) {
  config.validate();
  const auto start = Clock::now();
  const std::vector<Scenario> scenarios = build_scenarios(config);
  const Index reps = config.reps;
  const Index cap = allowed_failures(reps);

  ExperimentReport report;
  report.config = config;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const Scenario& sc = scenarios[s];
    std::vector<RepResult> results(static_cast<std::size_t>(reps));
#pragma omp parallel for num_threads(config.workers) schedule(dynamic)
    for (Index r = 0; r < reps; ++r) {
      results[static_cast<std::size_t>(r)] = run_test_rep(
          config, sc.d, sc.beta_true, sc.beta0, static_cast<Index>(s), r, cap + 1);
    }

    Index failures = 0;
    for (Index r = 0; r < reps; ++r) {
      const RepResult& res = results[static_cast<std::size_t>(r)];
      failures += res.attempts - 1 + (res.failed ? 1 : 0);
      report.seed_ledger.push_back(
          {static_cast<Index>(s), r, res.attempts - 1, res.stream_seed});
    }
    report.failed_attempts += failures;
    if (failures > cap) {
      std::ostringstream msg;
      msg << "scenario " << s << " (d=" << sc.d << "): " << failures
          << " failed reps exceed the 1% cap of " << cap;
      throw ExperimentAborted(msg.str());
    }

    for (double alpha : config.alpha_grid) {
      Index rejections = 0;
      for (const RepResult& res : results) rejections += res.p_value <= alpha ? 1 : 0;
      ReportCell cell;
      cell.kind = config.kind;
      cell.model = config.model.model;
      cell.n = config.n;
      cell.d = sc.d;
      cell.alpha = alpha;
      cell.delta = sc.delta;
      if (sc.r) cell.r = static_cast<double>(*sc.r);
      const double rate = static_cast<double>(rejections) / static_cast<double>(reps);
      cell.rejection_rate = rate;
      cell.mc_se = std::sqrt(rate * (1.0 - rate) / static_cast<double>(reps));
      cell.reps = reps;
      report.cells.push_back(std::move(cell));
    }
  }
  report.runtime_seconds = seconds_since(start);
  return report;
}

}  // namespace

ExperimentReport run_type1(const ExperimentConfig& config) {
  require(config.kind == ExperimentKind::Type1Combined ||
              config.kind == ExperimentKind::Type1Threshold,
          "run_type1: kind must be a TYPE1 variant");
  return run_testing(config);
}

ExperimentReport run_power(const ExperimentConfig& config) {
  require(config.kind == ExperimentKind::PowerCombined ||
              config.kind == ExperimentKind::PowerThreshold,
          "run_power: kind must be a POWER variant");
  return run_testing(config);
}

// ---------------------------------------------------------------------------
// rate probes

double delta_reference(Index n, Index d, Index L) {
  const double nn = static_cast<double>(n);
  const double ll = static_cast<double>(L);
  return static_cast<double>(d) * (std::sqrt(ll / nn) + 1.0 / ll);
}

double ga_statistic(const Eigen::VectorXd& v) {
  return v.size() >= 2 ? combined_norm(v) : std::abs(v(0));
}

ExperimentReport run_rate_delta(const ExperimentConfig& config) {
  require(config.kind == ExperimentKind::RateDelta, "run_rate_delta: wrong kind");
  config.validate();
  const auto start = Clock::now();
  ExperimentReport report;
  report.config = config;
  Index cell_index = 0;
  for (Index n : config.n_grid) {
    for (Index d : config.d_grid) {
      const auto ci = static_cast<std::uint64_t>(cell_index);
      const Index L = std::clamp<Index>(
          static_cast<Index>(std::ceil(std::cbrt(static_cast<double>(n)) - 1e-12)), 1, n);
      // Population mean is zero, so the second moment estimates Cov(X_n / sqrt(n)).
      const Eigen::MatrixXd target = second_moment(scaled_sums(
          config, n, d, config.aux_series,
          derive_seed(config.seed, {static_cast<std::uint64_t>(StreamTag::Auxiliary), ci}),
          config.workers));

      std::vector<double> frob(static_cast<std::size_t>(config.reps));
      std::vector<double> maxn(static_cast<std::size_t>(config.reps));
      std::vector<std::uint64_t> seeds(static_cast<std::size_t>(config.reps));
#pragma omp parallel for num_threads(config.workers) schedule(dynamic)
      for (Index r = 0; r < config.reps; ++r) {
        const std::uint64_t seed = derive_seed(
            config.seed, {static_cast<std::uint64_t>(StreamTag::Experiment), ci,
                          static_cast<std::uint64_t>(r)});
        const TimeSeriesMatrix x = simulate_model(cell_spec(config, n, d, seed));
        const CovarianceDiagnostics diag =
            delta_diagnostics(target, conditional_covariance(block_sums(x, L)));
        frob[static_cast<std::size_t>(r)] = diag.delta_frobenius;
        maxn[static_cast<std::size_t>(r)] = diag.delta_max;
        seeds[static_cast<std::size_t>(r)] = seed;
      }
      for (Index r = 0; r < config.reps; ++r) {
        report.seed_ledger.push_back({cell_index, r, 0, seeds[static_cast<std::size_t>(r)]});
      }

      ReportCell cell;
      cell.kind = config.kind;
      cell.model = config.model.model;
      cell.n = n;
      cell.d = d;
      cell.reps = config.reps;
      const double reference = delta_reference(n, d, L);
      const double med = median(frob);
      cell.metrics = {{"L", static_cast<double>(L)},
                      {"median_delta_frobenius", med},
                      {"median_delta_max", median(maxn)},
                      {"reference", reference},
                      {"ratio", med / reference}};
      report.cells.push_back(std::move(cell));
      ++cell_index;
    }
  }
  report.runtime_seconds = seconds_since(start);
  return report;
}

ExperimentReport run_rate_ga(const ExperimentConfig& config) {
  require(config.kind == ExperimentKind::RateGa, "run_rate_ga: wrong kind");
  config.validate();
  const auto start = Clock::now();
  ExperimentReport report;
  report.config = config;
  const Index m = config.ga_samples;
  const Index g = config.gauss_draws == 0 ? m : config.gauss_draws;
  Index cell_index = 0;
  for (Index n : config.n_grid) {
    for (Index d : config.d_grid) {
      const auto ci = static_cast<std::uint64_t>(cell_index);
      const auto sample = [&](Index count, std::uint64_t base) {
        return config.ga_source == GaSource::Regression
                   ? null_regression_stats(config, n, d, count, base, config.workers)
                   : scaled_sums(config, n, d, count, base, config.workers);
      };
      const std::uint64_t draw_seed = derive_seed(
          config.seed, {static_cast<std::uint64_t>(StreamTag::Experiment), ci});
      const Eigen::MatrixXd draws = sample(m, draw_seed);
      const Eigen::MatrixXd target = second_moment(sample(
          config.aux_series,
          derive_seed(config.seed, {static_cast<std::uint64_t>(StreamTag::Auxiliary), ci})));

      const SpdMatrix fitted(sample_covariance(draws));
      const Eigen::MatrixXd root = spd_sqrt(fitted).entries();
      Eigen::MatrixXd gauss(g, d);
      const std::uint64_t gauss_seed = derive_seed(
          config.seed, {static_cast<std::uint64_t>(StreamTag::Coupling), ci});
#pragma omp parallel for num_threads(config.workers) schedule(static)
      for (Index i = 0; i < g; ++i) {
        Stream s(gauss_seed, StreamTag::Coupling, static_cast<std::uint64_t>(i));
        Eigen::VectorXd z(d);
        for (Index j = 0; j < d; ++j) z(j) = s.normal();
        gauss.row(i) = (root * z).transpose();
      }

      std::vector<double> t_stat(static_cast<std::size_t>(m));
      std::vector<double> t_gauss(static_cast<std::size_t>(g));
      for (Index i = 0; i < m; ++i) t_stat[static_cast<std::size_t>(i)] = ga_statistic(draws.row(i).transpose());
      for (Index i = 0; i < g; ++i) t_gauss[static_cast<std::size_t>(i)] = ga_statistic(gauss.row(i).transpose());

      std::vector<double> first_stat(static_cast<std::size_t>(m));
      std::vector<double> first_gauss(static_cast<std::size_t>(m));
      for (Index i = 0; i < m; ++i) {
        first_stat[static_cast<std::size_t>(i)] = draws(i, 0);
        first_gauss[static_cast<std::size_t>(i)] = gauss(i, 0);
      }

      report.seed_ledger.push_back({cell_index, 0, 0, draw_seed});
      ReportCell cell;
      cell.kind = config.kind;
      cell.model = config.model.model;
      cell.n = n;
      cell.d = d;
      cell.reps = m;
      cell.metrics = {
          {"kolmogorov", empirical_kolmogorov(t_stat, t_gauss)},
          {"w2_1d", empirical_w2_1d(first_stat, first_gauss)},
          {"gaussian_w2", gaussian_w2(fitted, SpdMatrix(target))},
      };
      report.cells.push_back(std::move(cell));
      ++cell_index;
    }
  }
  report.runtime_seconds = seconds_since(start);
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  switch (config.kind) {
    case ExperimentKind::Type1Combined:
    case ExperimentKind::Type1Threshold:
      return run_type1(config);
    case ExperimentKind::PowerCombined:
    case ExperimentKind::PowerThreshold:
      return run_power(config);
    case ExperimentKind::RateDelta:
      return run_rate_delta(config);
    case ExperimentKind::RateGa:
      return run_rate_ga(config);
  }
  throw InvalidArgument("run_experiment: unknown kind");
}

// ---------------------------------------------------------------------------
// serialization

namespace {

template <typename T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(c.kind));
  j["model"] = {{"id", std::string(to_string(c.model.model))},
                {"burn_in", c.model.burn_in},
                {"t_df", c.model.t_df},
                {"band_value", c.model.band_value}};
  j["d_grid"] = c.d_grid;
  j["alpha_grid"] = c.alpha_grid;
  j["reps"] = c.reps;
  j["B"] = c.B;
  j["n"] = c.n;
  j["delta_grid"] = c.delta_grid;
  j["alternative"] = std::string(to_string(c.alternative));
  j["r_grid"] = c.r_grid;
  j["L"] = optional_json(c.L);
  j["b_sigma"] = c.b_sigma;
  j["n_grid"] = c.n_grid;
  j["aux_series"] = c.aux_series;
  j["ga_samples"] = c.ga_samples;
  j["gauss_draws"] = c.gauss_draws;
  j["ga_source"] = std::string(to_string(c.ga_source));
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  if (j.contains("kind")) c.kind = parse_experiment_kind(j.at("kind").get<std::string>());
  if (j.contains("model")) {
    const auto& m = j.at("model");
    if (m.is_string()) {
      c.model.model = parse_model_id(m.get<std::string>());
    } else {
      if (m.contains("id")) c.model.model = parse_model_id(m.at("id").get<std::string>());
      if (m.contains("burn_in")) c.model.burn_in = m.at("burn_in").get<Index>();
      if (m.contains("t_df")) c.model.t_df = m.at("t_df").get<double>();
      if (m.contains("band_value")) c.model.band_value = m.at("band_value").get<double>();
    }
  }
  const auto read = [&j](const char* key, auto& field) {
    if (j.contains(key) && !j.at(key).is_null()) {
      field = j.at(key).get<std::decay_t<decltype(field)>>();
    }
  };
  read("d_grid", c.d_grid);
  read("alpha_grid", c.alpha_grid);
  read("reps", c.reps);
  read("B", c.B);
  read("n", c.n);
  read("delta_grid", c.delta_grid);
  if (j.contains("alternative")) c.alternative = parse_alternative(j.at("alternative").get<std::string>());
  read("r_grid", c.r_grid);
  c.L = optional_from<Index>(j, "L");
  read("b_sigma", c.b_sigma);
  read("n_grid", c.n_grid);
  read("aux_series", c.aux_series);
  read("ga_samples", c.ga_samples);
  read("gauss_draws", c.gauss_draws);
  if (j.contains("ga_source")) c.ga_source = parse_ga_source(j.at("ga_source").get<std::string>());
  read("seed", c.seed);
  read("workers", c.workers);
  return c;
}

nlohmann::json to_json(const ExperimentReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const ReportCell& c : report.cells) {
    nlohmann::json metrics = nlohmann::json::array();
    for (const auto& [name, value] : c.metrics) metrics.push_back({name, value});
    cells.push_back({{"kind", std::string(to_string(c.kind))},
                     {"model", std::string(to_string(c.model))},
                     {"n", c.n},
                     {"d", c.d},
                     {"alpha", optional_json(c.alpha)},
                     {"delta", optional_json(c.delta)},
                     {"r", optional_json(c.r)},
                     {"rejection_rate", optional_json(c.rejection_rate)},
                     {"mc_se", optional_json(c.mc_se)},
                     {"reps", c.reps},
                     {"metrics", metrics}});
  }
  nlohmann::json ledger = nlohmann::json::array();
  for (const SeedLedgerEntry& e : report.seed_ledger) {
    ledger.push_back({e.scenario, e.rep, e.attempt, e.stream_seed});
  }
  return {{"cells", cells},
          {"runtime_seconds", report.runtime_seconds},
          {"config", to_json(report.config)},
          {"failed_attempts", report.failed_attempts},
          {"seed_ledger", ledger}};
}

ExperimentReport report_from_json(const nlohmann::json& j) {
  ExperimentReport r;
  for (const auto& c : j.at("cells")) {
    ReportCell cell;
    cell.kind = parse_experiment_kind(c.at("kind").get<std::string>());
    cell.model = parse_model_id(c.at("model").get<std::string>());
    cell.n = c.at("n").get<Index>();
    cell.d = c.at("d").get<Index>();
    cell.alpha = optional_from<double>(c, "alpha");
    cell.delta = optional_from<double>(c, "delta");
    cell.r = optional_from<double>(c, "r");
    cell.rejection_rate = optional_from<double>(c, "rejection_rate");
    cell.mc_se = optional_from<double>(c, "mc_se");
    cell.reps = c.at("reps").get<Index>();
    for (const auto& m : c.at("metrics")) {
      cell.metrics.emplace_back(m.at(0).get<std::string>(), m.at(1).get<double>());
    }
    r.cells.push_back(std::move(cell));
  }
  r.runtime_seconds = j.at("runtime_seconds").get<double>();
  r.config = config_from_json(j.at("config"));
  r.failed_attempts = j.value("failed_attempts", Index{0});
  for (const auto& e : j.at("seed_ledger")) {
    r.seed_ledger.push_back({e.at(0).get<Index>(), e.at(1).get<Index>(),
                             e.at(2).get<Index>(), e.at(3).get<std::uint64_t>()});
  }
  return r;
}

std::string report_csv(const ExperimentReport& report) {
  std::vector<std::string> metric_names;
  for (const ReportCell& c : report.cells) {
    for (const auto& [name, value] : c.metrics) {
      if (std::find(metric_names.begin(), metric_names.end(), name) == metric_names.end()) {
        metric_names.push_back(name);
      }
    }
  }
  std::ostringstream out;
  out << "kind,model,n,d,alpha,delta,r,rejection_rate,mc_se,reps";
  for (const auto& name : metric_names) out << ',' << name;
  out << '\n';
  const auto opt = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  for (const ReportCell& c : report.cells) {
    out << to_string(c.kind) << ',' << to_string(c.model) << ',' << c.n << ',' << c.d
        << ',' << opt(c.alpha) << ',' << opt(c.delta) << ',' << opt(c.r) << ','
        << opt(c.rejection_rate) << ',' << opt(c.mc_se) << ',' << c.reps;
    for (const auto& name : metric_names) {
      out << ',';
      for (const auto& [key, value] : c.metrics) {
        if (key == name) out << format_double(value);
      }
    }
    out << '\n';
  }
  return out.str();
}

void emit_report(const ExperimentReport& report, ReportFormat format,
                 const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  if (format == ReportFormat::Json) {
    out << to_json(report).dump(2) << '\n';
  } else {
    out << report_csv(report);
  }
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace hdboot
