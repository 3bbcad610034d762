#include "hdboot/bootstrap.hpp"
#include "hdboot/csv_io.hpp"
#include "hdboot/dependence.hpp"
#include "hdboot/harness.hpp"
#include "hdboot/inference.hpp"
#include "hdboot/models.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace hdboot;

namespace {

std::optional<Index> parse_window(const std::string& text) {
  if (text == "auto") return std::nullopt;
  std::size_t used = 0;
  const long long v = std::stoll(text, &used);
  require(used == text.size() && v >= 1, "--L must be 'auto' or a positive integer");
  return static_cast<Index>(v);
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
}

ReportFormat format_for(const std::string& path, const std::string& requested) {
  if (requested == "json") return ReportFormat::Json;
  if (requested == "csv") return ReportFormat::Csv;
  require(requested.empty(), "--format must be csv or json");
  const auto ext = std::filesystem::path(path).extension().string();
  return ext == ".json" ? ReportFormat::Json : ReportFormat::Csv;
}

struct SimulateArgs {
  std::string model = "M1";
  Index n = 500;
  Index d = 1;
  std::uint64_t seed = 0;
  Index burn_in = kDefaultBurnIn;
  double t_df = 5.0;
  double band = 0.2;
  std::string out;
  std::string y_out;
  double beta_value = 1.0;
};

int cmd_simulate(const SimulateArgs& a) {
  ModelSpec spec;
  spec.model = parse_model_id(a.model);
  spec.n = a.n;
  spec.d = a.d;
  spec.seed = a.seed;
  spec.burn_in = a.burn_in;
  spec.t_df = a.t_df;
  spec.band_value = a.band;
  if (a.y_out.empty()) {
    write_series_csv(a.out, simulate_model(spec));
    return 0;
  }
  const RegressionDataset data =
      generate_regression(spec, Eigen::VectorXd::Constant(a.d, a.beta_value));
  write_series_csv(a.out, data.X);
  write_vector(a.y_out, data.y);
  return 0;
}

struct DepsArgs {
  std::string model = "M1";
  Index n = 500;
  Index d = 1;
  Index k_max = 10;
  double q = 2.0;
  Index reps = 1000;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_deps(const DepsArgs& a) {
  require(a.k_max >= 0, "--k-max must be non-negative");
  ModelSpec spec;
  spec.model = parse_model_id(a.model);
  spec.n = a.n;
  spec.d = a.d;
  spec.seed = a.seed;
  std::ofstream out(a.out);
  if (!out) throw std::runtime_error("cannot open '" + a.out + "' for writing");
  out << "k,coord,theta_hat,mc_se\n";
  for (Index k = 0; k <= a.k_max; ++k) {
    const DependenceEstimate est = estimate_theta(spec, k, a.q, a.reps, a.seed);
    Index worst = 0;
    for (Index j = 0; j < a.d; ++j) {
      out << k << ',' << (j + 1) << ',' << format_double(est.per_coord(j)) << ','
          << format_double(est.mc_se(j)) << '\n';
      if (est.per_coord(j) > est.per_coord(worst)) worst = j;
    }
    out << k << ",max," << format_double(est.max_over_coords) << ','
        << format_double(est.mc_se(worst)) << '\n';
  }
  return 0;
}

struct DiagArgs {
  std::string in;
  std::string L = "auto";
  Index B = 1000;
  std::uint64_t seed = 0;
  std::string target;
  std::string out;
};

int cmd_bootstrap_diag(const DiagArgs& a) {
  const TimeSeriesMatrix x(read_matrix_csv(a.in));
  const std::optional<Index> fixed = parse_window(a.L);
  const Index L = fixed ? *fixed : select_block_size(x);
  require(L <= x.n(), "--L exceeds the series length");
  const BlockSums psi = block_sums(x, L);
  const Eigen::MatrixXd sigma_boot = conditional_covariance(psi);

  Eigen::MatrixXd target;
  if (!a.target.empty()) {
    target = read_matrix_csv(a.target);
  } else {
    // Without a known target, compare against the empirical covariance of B draws.
    const Eigen::MatrixXd draws = bootstrap_draws(psi, a.B, a.seed).draws;
    const Eigen::MatrixXd centered = draws.rowwise() - draws.colwise().mean();
    target = centered.transpose() * centered / static_cast<double>(std::max<Index>(a.B - 1, 1));
  }
  const CovarianceDiagnostics diag = delta_diagnostics(target, sigma_boot);
  write_json(a.out, {{"L", L},
                     {"B", a.B},
                     {"seed", a.seed},
                     {"delta_frobenius", diag.delta_frobenius},
                     {"delta_max", diag.delta_max},
                     {"min_eigenvalue_boot", min_eigenvalue(sigma_boot)}});
  return 0;
}

struct TestArgs {
  std::string kind;
  std::string x;
  std::string y;
  std::string beta0;
  double alpha = 0.05;
  std::string L = "auto";
  Index B = 1000;
  Index b_sigma = kDefaultSigmaDraws;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_test(const TestArgs& a) {
  const Eigen::MatrixXd x = read_matrix_csv(a.x);
  const Eigen::VectorXd y = read_vector(a.y);
  const Eigen::VectorXd beta0 = read_vector(a.beta0);
  const TestKind kind = parse_test_kind(a.kind);
  const std::optional<Index> L = parse_window(a.L);
  const TestOutcome t =
      kind == TestKind::Combined
          ? run_combined_test(x, y, beta0, a.alpha, L, a.B, a.seed)
          : run_threshold_test(x, y, beta0, a.alpha, L, a.B, a.b_sigma, a.seed);
  write_json(a.out, {{"kind", std::string(to_string(t.kind))},
                     {"statistic", t.statistic},
                     {"critical_value", t.critical_value},
                     {"p_value", t.p_value},
                     {"alpha", t.alpha},
                     {"reject", t.reject},
                     {"L", t.L},
                     {"B", t.B},
                     {"seed", t.seed},
                     {"boot_draws", t.boot_draws}});
  return 0;
}

struct McArgs {
  std::string family;
  std::string config;
  std::string test = "combined";
  std::string model;
  std::optional<Index> n;
  std::vector<Index> d;
  std::vector<double> alpha;
  std::optional<Index> reps;
  std::optional<Index> B;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::vector<double> delta;
  std::string alternative;
  std::vector<double> r;
  std::string L;
  std::optional<Index> b_sigma;
  std::vector<Index> n_grid;
  std::optional<Index> aux_series;
  std::optional<Index> ga_samples;
  std::optional<Index> gauss_draws;
  std::string ga_source;
  std::string out;
  std::string format;
};

ExperimentKind kind_for(const std::string& family, const std::string& test) {
  const bool threshold = parse_test_kind(test) == TestKind::Threshold;
  if (family == "type1") return threshold ? ExperimentKind::Type1Threshold : ExperimentKind::Type1Combined;
  if (family == "power") return threshold ? ExperimentKind::PowerThreshold : ExperimentKind::PowerCombined;
  if (family == "rate-delta") return ExperimentKind::RateDelta;
  return ExperimentKind::RateGa;
}

bool same_family(ExperimentKind a, ExperimentKind b) {
  const auto family = [](ExperimentKind k) {
    switch (k) {
      case ExperimentKind::Type1Combined:
      case ExperimentKind::Type1Threshold: return 0;
      case ExperimentKind::PowerCombined:
      case ExperimentKind::PowerThreshold: return 1;
      case ExperimentKind::RateDelta: return 2;
      case ExperimentKind::RateGa: return 3;
    }
    return -1;
  };
  return family(a) == family(b);
}

int cmd_mc(const McArgs& a, bool test_given) {
  ExperimentConfig c;
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) throw std::runtime_error("cannot open '" + a.config + "'");
    const nlohmann::json j = nlohmann::json::parse(in);
    c = config_from_json(j);
    const ExperimentKind wanted = kind_for(a.family, a.test);
    if (!j.contains("kind") || test_given) {
      c.kind = wanted;
    } else {
      require(same_family(c.kind, wanted),
              "config kind " + std::string(to_string(c.kind)) + " does not match 'mc " + a.family + "'");
    }
  } else {
    c.kind = kind_for(a.family, a.test);
  }
  if (!a.model.empty()) c.model.model = parse_model_id(a.model);
  if (a.n) c.n = *a.n;
  if (!a.d.empty()) c.d_grid = a.d;
  if (!a.alpha.empty()) c.alpha_grid = a.alpha;
  if (a.reps) c.reps = *a.reps;
  if (a.B) c.B = *a.B;
  if (a.seed) c.seed = *a.seed;
  if (a.workers) c.workers = *a.workers;
  if (!a.delta.empty()) c.delta_grid = a.delta;
  if (!a.alternative.empty()) c.alternative = parse_alternative(a.alternative);
  if (!a.r.empty()) c.r_grid = a.r;
  if (!a.L.empty()) c.L = parse_window(a.L);
  if (a.b_sigma) c.b_sigma = *a.b_sigma;
  if (!a.n_grid.empty()) c.n_grid = a.n_grid;
  if (a.aux_series) c.aux_series = *a.aux_series;
  if (a.ga_samples) c.ga_samples = *a.ga_samples;
  if (a.gauss_draws) c.gauss_draws = *a.gauss_draws;
  if (!a.ga_source.empty()) c.ga_source = parse_ga_source(a.ga_source);

  const ExperimentReport report = run_experiment(c);
  if (a.out.empty()) {
    std::cout << report_csv(report);
  } else {
    emit_report(report, format_for(a.out, a.format), a.out);
  }
  std::cerr << "runtime " << report.runtime_seconds << " s, "
            << report.failed_attempts << " failed attempts\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiplier-bootstrap inference for non-stationary time series"};
  app.require_subcommand(1);
  int code = 0;

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate a model path to CSV");
  simulate->add_option("--model", sim.model, "M1..M5")->required();
  simulate->add_option("--n", sim.n)->required();
  simulate->add_option("--d", sim.d)->required();
  simulate->add_option("--seed", sim.seed)->required();
  simulate->add_option("--burn-in", sim.burn_in);
  simulate->add_option("--t-df", sim.t_df, "degrees of freedom for M5");
  simulate->add_option("--band", sim.band, "off-diagonal of A for M2");
  simulate->add_option("--out", sim.out)->required();
  simulate->add_option("--y-out", sim.y_out, "also write y = X beta + eps");
  simulate->add_option("--beta-value", sim.beta_value, "common entry of beta for --y-out");
  simulate->callback([&] { code = cmd_simulate(sim); });

  DepsArgs dep;
  auto* deps = app.add_subcommand("deps", "Estimate physical dependence measures");
  deps->add_option("--model", dep.model)->required();
  deps->add_option("--n", dep.n)->required();
  deps->add_option("--d", dep.d)->required();
  deps->add_option("--k-max", dep.k_max)->required();
  deps->add_option("--q", dep.q);
  deps->add_option("--reps", dep.reps);
  deps->add_option("--seed", dep.seed)->required();
  deps->add_option("--out", dep.out)->required();
  deps->callback([&] { code = cmd_deps(dep); });

  DiagArgs diag;
  auto* bdiag = app.add_subcommand("bootstrap-diag", "Bootstrap covariance diagnostics");
  bdiag->add_option("--in", diag.in)->required();
  bdiag->add_option("--L", diag.L, "INT or auto");
  bdiag->add_option("--B", diag.B);
  bdiag->add_option("--seed", diag.seed)->required();
  bdiag->add_option("--target", diag.target, "CSV matrix of the target covariance");
  bdiag->add_option("--out", diag.out)->required();
  bdiag->callback([&] { code = cmd_bootstrap_diag(diag); });

  TestArgs ta;
  auto* test = app.add_subcommand("test", "Bootstrap test of H0: beta = beta0");
  test->add_option("kind", ta.kind, "combined|threshold")
      ->required()
      ->check(CLI::IsMember({"combined", "threshold"}));
  test->add_option("--x", ta.x)->required();
  test->add_option("--y", ta.y)->required();
  test->add_option("--beta0", ta.beta0)->required();
  test->add_option("--alpha", ta.alpha);
  test->add_option("--L", ta.L, "INT or auto");
  test->add_option("--B", ta.B);
  test->add_option("--b-sigma", ta.b_sigma);
  test->add_option("--seed", ta.seed)->required();
  test->add_option("--out", ta.out)->required();
  test->callback([&] { code = cmd_test(ta); });

  McArgs mc;
  auto* mcc = app.add_subcommand("mc", "Monte Carlo experiments");
  mcc->add_option("family", mc.family, "type1|power|rate-delta|rate-ga")
      ->required()
      ->check(CLI::IsMember({"type1", "power", "rate-delta", "rate-ga"}));
  mcc->add_option("--config", mc.config, "JSON experiment config");
  auto* test_opt = mcc->add_option("--test", mc.test, "combined|threshold");
  mcc->add_option("--model", mc.model);
  mcc->add_option("--n", mc.n);
  mcc->add_option("--d", mc.d)->delimiter(',');
  mcc->add_option("--alpha", mc.alpha)->delimiter(',');
  mcc->add_option("--reps", mc.reps);
  mcc->add_option("--B", mc.B);
  mcc->add_option("--seed", mc.seed);
  mcc->add_option("--workers", mc.workers);
  mcc->add_option("--delta", mc.delta)->delimiter(',');
  mcc->add_option("--alternative", mc.alternative, "sparse|uniform");
  mcc->add_option("--r", mc.r, "threshold sparsity fractions")->delimiter(',');
  mcc->add_option("--L", mc.L, "INT or auto");
  mcc->add_option("--b-sigma", mc.b_sigma);
  mcc->add_option("--n-grid", mc.n_grid)->delimiter(',');
  mcc->add_option("--aux-series", mc.aux_series);
  mcc->add_option("--ga-samples", mc.ga_samples);
  mcc->add_option("--gauss-draws", mc.gauss_draws);
  mcc->add_option("--ga-source", mc.ga_source, "regression|series");
  mcc->add_option("--out", mc.out, "CSV or JSON report; stdout CSV if omitted");
  mcc->add_option("--format", mc.format, "csv|json (default from extension)");
  mcc->callback([&] { code = cmd_mc(mc, test_opt->count() > 0); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ExperimentAborted& e) {
    std::cerr << "aborted: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return code;
}
