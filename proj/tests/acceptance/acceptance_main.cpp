// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--quick] [--only N[,N...]]
//
// --quick runs the Type I error cells with 500 reps and a 2.5 pp tolerance.
#include "hdboot/error.hpp"
#include "hdboot/gaussian.hpp"
#include "hdboot/harness.hpp"
#include "hdboot/inference.hpp"
#include "hdboot/rng.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#ifndef HDBOOT_CLI_PATH
#define HDBOOT_CLI_PATH "hdboot"
#endif

using namespace hdboot;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (ok ? "" : "[miss] ") << what << "; ";
  }
};

struct Options {
  bool quick = false;
  std::set<int> only;
  int workers = 1;
};

std::string pct(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * p);
  return buf;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

constexpr std::uint64_t kNullSeed = 20240;

ExperimentConfig type1_config(const Options& o, ExperimentKind kind, ModelId model) {
  ExperimentConfig c;
  c.kind = kind;
  c.model.model = model;
  c.n = 500;
  c.B = 1000;
  c.reps = o.quick ? 500 : 2000;
  c.d_grid = {5};
  c.alpha_grid = {0.05, 0.10};
  c.seed = kNullSeed;
  c.workers = o.workers;
  return c;
}

const ReportCell& find_cell(const ExperimentReport& r, double alpha, double rval = -1.0) {
  for (const ReportCell& c : r.cells) {
    if (c.alpha && std::abs(*c.alpha - alpha) < 1e-12 && (rval < 0 || (c.r && *c.r == rval))) return c;
  }
  throw std::runtime_error("cell not found");
}

void within(Verdict& v, const std::string& label, const ReportCell& cell, double target, double tol) {
  const double rate = *cell.rejection_rate;
  v.check(std::abs(rate - target) <= tol,
          label + " " + pct(rate) + " vs " + pct(target) + " (tol " + num(100 * tol) + " pp)");
}

// Null cells reused by criterion 4.
ExperimentReport g_null_combined_m1;
ExperimentReport g_null_threshold_m1;

Verdict criterion1(const Options& o) {
  Verdict v;
  const double tol = o.quick ? 0.025 : 0.015;
  g_null_combined_m1 = run_type1(type1_config(o, ExperimentKind::Type1Combined, ModelId::M1));
  within(v, "M1 d=5 a=5%", find_cell(g_null_combined_m1, 0.05), 0.0510, tol);
  within(v, "M1 d=5 a=10%", find_cell(g_null_combined_m1, 0.10), 0.0965, tol);
  return v;
}

Verdict criterion2(const Options& o) {
  Verdict v;
  const double tol = o.quick ? 0.025 : 0.02;
  const std::vector<std::pair<ModelId, double>> printed{
      {ModelId::M2, 0.0520}, {ModelId::M3, 0.0515}, {ModelId::M4, 0.0560}, {ModelId::M5, 0.0445}};
  for (const auto& [model, target] : printed) {
    ExperimentConfig c = type1_config(o, ExperimentKind::Type1Combined, model);
    c.alpha_grid = {0.05};
    const ExperimentReport r = run_type1(c);
    within(v, std::string(to_string(model)) + " d=5 a=5%", find_cell(r, 0.05), target, tol);
  }
  return v;
}

Verdict criterion3(const Options& o) {
  Verdict v;
  const double tol = o.quick ? 0.025 : 0.015;
  ExperimentConfig c = type1_config(o, ExperimentKind::Type1Threshold, ModelId::M1);
  c.r_grid = {0.0, 0.4};
  g_null_threshold_m1 = run_type1(c);
  within(v, "r=0 a=5%", find_cell(g_null_threshold_m1, 0.05, 0.0), 0.0480, tol);
  within(v, "r=0 a=10%", find_cell(g_null_threshold_m1, 0.10, 0.0), 0.1015, tol);
  within(v, "r=2 a=5%", find_cell(g_null_threshold_m1, 0.05, 2.0), 0.0510, tol);
  within(v, "r=2 a=10%", find_cell(g_null_threshold_m1, 0.10, 2.0), 0.0965, tol);
  return v;
}

void power_curve(Verdict& v, const std::string& label, const ExperimentReport& r,
                 const ReportCell& null_cell) {
  const auto& cells = r.cells;
  std::ostringstream rates;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    rates << (i ? "," : "") << num(*cells[i].rejection_rate);
    if (i == 0) continue;
    const double slack = 2.0 * std::max(*cells[i].mc_se, *cells[i - 1].mc_se);
    v.check(*cells[i].rejection_rate >= *cells[i - 1].rejection_rate - slack,
            label + " monotone at delta=" + num(*cells[i].delta));
  }
  v.check(*cells.back().rejection_rate >= 0.99,
          label + " top power " + num(*cells.back().rejection_rate) + " (rates " + rates.str() + ")");
  // The power run shares the null run's seed, so at delta = 0 it must
  // regenerate the null datasets and decisions exactly.
  const double diff = std::abs(*cells.front().rejection_rate - *null_cell.rejection_rate);
  v.check(diff <= 2.0 * *cells.front().mc_se && diff == 0.0,
          label + " delta=0 " + pct(*cells.front().rejection_rate) + " vs null " +
              pct(*null_cell.rejection_rate));
}

// Delta grids come from a 200-rep pilot at M1, d = 5, alpha = 5%.
Verdict criterion4(const Options& o) {
  Verdict v;
  if (g_null_combined_m1.cells.empty()) criterion1(o);
  if (g_null_threshold_m1.cells.empty()) criterion3(o);
  const auto base = [&](ExperimentKind kind) {
    ExperimentConfig c = type1_config(o, kind, ModelId::M1);
    c.alpha_grid = {0.05};
    return c;
  };
  ExperimentConfig uni = base(ExperimentKind::PowerCombined);
  uni.alternative = Alternative::Uniform;
  uni.delta_grid = {0.0, 0.03, 0.06, 0.09, 0.12};
  power_curve(v, "combined/uniform", run_power(uni), find_cell(g_null_combined_m1, 0.05));

  ExperimentConfig sparse = base(ExperimentKind::PowerCombined);
  sparse.alternative = Alternative::Sparse;
  sparse.delta_grid = {0.075, 0.15, 0.225, 0.3};
  const ExperimentReport rs = run_power(sparse);
  std::ostringstream rates;
  bool mono = true;
  for (std::size_t i = 1; i < rs.cells.size(); ++i) {
    const double slack = 2.0 * std::max(*rs.cells[i].mc_se, *rs.cells[i - 1].mc_se);
    mono = mono && *rs.cells[i].rejection_rate >= *rs.cells[i - 1].rejection_rate - slack;
  }
  for (const auto& c : rs.cells) rates << num(*c.rejection_rate) << ' ';
  v.check(mono, "combined/sparse monotone (rates " + rates.str() + ")");
  v.check(*rs.cells.back().rejection_rate >= 0.99, "combined/sparse top power");

  ExperimentConfig thr = base(ExperimentKind::PowerThreshold);
  thr.r_grid = {0.0};
  thr.delta_grid = {0.0, 0.075, 0.15, 0.225, 0.3};
  power_curve(v, "threshold", run_power(thr), find_cell(g_null_threshold_m1, 0.05, 0.0));
  return v;
}

Eigen::MatrixXd random_spd(Index d, std::uint64_t seed) {
  Stream s(seed, StreamTag::Generic, 0);
  Eigen::MatrixXd a(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) a(i, j) = s.normal();
  return a * a.transpose() / static_cast<double>(d) + 0.2 * Eigen::MatrixXd::Identity(d, d);
}

Verdict criterion5(const Options&) {
  Verdict v;
  double worst = 0.0;
  for (double s1 : {0.01, 0.5, 1.0, 3.0, 10.0}) {
    for (double s2 : {0.02, 1.0, 2.5, 40.0}) {
      const double w = gaussian_w2(SpdMatrix(Eigen::MatrixXd::Constant(1, 1, s1 * s1)),
                                   SpdMatrix(Eigen::MatrixXd::Constant(1, 1, s2 * s2)));
      worst = std::max(worst, std::abs(w - std::abs(s1 - s2)));
    }
  }
  v.check(worst <= 1e-10, "scalar W2 max error " + num(worst));

  double worst_rel = 0.0;
  int over_bound = 0;
  for (std::uint64_t p = 0; p < 20; ++p) {
    const SpdMatrix a(random_spd(5, 1000 + 2 * p)), b(random_spd(5, 1001 + 2 * p));
    const Eigen::MatrixXd ra = spd_sqrt(a).entries(), rb = spd_sqrt(b).entries();
    const double exact = (ra - rb).squaredNorm();
    double sum = 0.0;
    for (std::uint64_t i = 0; i < 100000; ++i) {
      Stream st(p, StreamTag::Coupling, i);
      Eigen::VectorXd z(5);
      for (Index j = 0; j < 5; ++j) z(j) = st.normal();
      const CoupledPair cp = coupled_gaussian_pair(a, b, z);
      sum += (cp.x - cp.y).squaredNorm();
    }
    const double mc = sum / 100000.0;
    worst_rel = std::max(worst_rel, std::abs(mc - exact) / exact);
    const double lam = std::min(a.min_eigenvalue(), b.min_eigenvalue());
    if (mc > coupling_bound(a, b, lam)) ++over_bound;
  }
  v.check(worst_rel <= 0.05, "coupling MC vs trace worst rel err " + num(worst_rel));
  v.check(over_bound == 0, "pairs exceeding bound " + std::to_string(over_bound) + "/20");
  return v;
}

Verdict criterion6(const Options&) {
  Verdict v;
  int violations = 0;
  double tightest = 0.0;
  for (std::uint64_t p = 0; p < 100; ++p) {
    const Index d = 2 + static_cast<Index>(p % 7);
    const SpdMatrix a(random_spd(d, 5000 + 2 * p)), b(random_spd(d, 5001 + 2 * p));
    const double lam = std::min(a.min_eigenvalue(), b.min_eigenvalue());
    const auto [lhs, rhs] = vha_check(a, b, lam);
    if (lhs > rhs) ++violations;
    tightest = std::max(tightest, lhs / rhs);
  }
  v.check(violations == 0, "violations " + std::to_string(violations) + "/100, max lhs/rhs " + num(tightest));
  return v;
}

Verdict criterion7(const Options& o) {
  Verdict v;
  ExperimentConfig c;
  c.kind = ExperimentKind::RateDelta;
  c.model.model = ModelId::M1;
  c.d_grid = {5};
  c.n_grid = {250, 1000, 4000};
  c.reps = 50;
  c.aux_series = 2000;
  c.seed = 7001;
  c.workers = o.workers;
  const ExperimentReport r = run_rate_delta(c);
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    const ReportCell& cell = r.cells[i];
    const double ratio = cell.metric("ratio");
    v.check(ratio <= 3.0 && ratio >= 1.0 / 3.0,
            "n=" + std::to_string(cell.n) + " median " + num(cell.metric("median_delta_frobenius")) +
                " ref " + num(cell.metric("reference")) + " ratio " + num(ratio));
    if (i > 0) {
      v.check(cell.metric("median_delta_frobenius") < r.cells[i - 1].metric("median_delta_frobenius"),
              "decrease to n=" + std::to_string(cell.n));
    }
  }
  return v;
}

Verdict criterion8(const Options& o) {
  Verdict v;
  ExperimentConfig c;
  c.kind = ExperimentKind::RateGa;
  c.model.model = ModelId::M1;
  c.d_grid = {5};
  c.n_grid = {125, 500, 2000};
  c.ga_samples = 100000;
  c.gauss_draws = 1000000;
  c.aux_series = 2000;
  c.ga_source = GaSource::Regression;
  c.seed = 8001;
  c.workers = o.workers;
  const ExperimentReport r = run_rate_ga(c);
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    const double k = r.cells[i].metric("kolmogorov");
    std::string label = "n=" + std::to_string(r.cells[i].n) + " kolmogorov " + num(k);
    if (i == 0) {
      v.check(true, label);
    } else {
      v.check(k < r.cells[i - 1].metric("kolmogorov"), label);
    }
  }

  ExperimentConfig one = c;
  one.d_grid = {1};
  one.n_grid = {2000};
  one.ga_samples = 20000;
  one.gauss_draws = 0;
  one.ga_source = GaSource::Series;
  const double w2 = run_rate_ga(one).cells.front().metric("w2_1d");
  v.check(w2 < 0.1, "d=1 n=2000 empirical W2 " + num(w2));
  return v;
}

bool run_cli(const std::string& args) {
  const std::string cmd = std::string(HDBOOT_CLI_PATH) + " " + args + " 2>/dev/null";
  return std::system(cmd.c_str()) == 0;
}

nlohmann::json load_without_runtime(const std::filesystem::path& p) {
  std::ifstream in(p);
  nlohmann::json j = nlohmann::json::parse(in);
  j.erase("runtime_seconds");
  j["config"].erase("workers");
  return j;
}

Verdict criterion9(const Options&) {
  Verdict v;
  // Soft threshold on a dyadic grid, where every difference is exact.
  Stream s(9, StreamTag::Generic, 0);
  const auto grid = [&s](double scale) { return std::round(scale * s.normal() * 1024.0) / 1024.0; };
  int lip_fail = 0;
  for (int i = 0; i < 10000; ++i) {
    const double x = grid(3), y = grid(3), lam = std::abs(grid(1));
    if (std::abs(soft_threshold(x, lam) - soft_threshold(y, lam)) > std::abs(x - y)) ++lip_fail;
  }
  v.check(lip_fail == 0, "soft-threshold Lipschitz failures " + std::to_string(lip_fail) + "/10000");

  double worst = 0.0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    ModelSpec spec;
    spec.model = static_cast<ModelId>(t % 5);
    spec.n = 300;
    spec.d = 5 + static_cast<Index>(t % 20);
    spec.seed = 900 + t;
    const RegressionDataset data = generate_regression(spec, Eigen::VectorXd::Ones(spec.d));
    const OlsFit fit = ols_fit(data);
    const Eigen::MatrixXd& x = data.X.data();
    worst = std::max(worst, (x.transpose() * fit.residuals).norm() / (x.norm() * data.y.norm()));
  }
  v.check(worst <= 1e-6, "normal-equation residual worst relative " + num(worst));

  const auto dir = std::filesystem::temp_directory_path() / "hdboot_acceptance";
  std::filesystem::create_directories(dir);
  const std::string common =
      "mc type1 --model M2 --n 300 --d 5,10 --alpha 0.05,0.10 --reps 200 --B 500 --seed 99 --L auto";
  const bool ok1 = run_cli(common + " --workers 1 --out " + (dir / "w1.json").string());
  const bool ok8 = run_cli(common + " --workers 8 --out " + (dir / "w8.json").string());
  v.check(ok1 && ok8, "CLI runs succeeded");
  if (ok1 && ok8) {
    v.check(load_without_runtime(dir / "w1.json") == load_without_runtime(dir / "w8.json"),
            "mc type1 report identical for workers 1 and 8");
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--quick") {
      o.quick = true;
    } else if (a == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string tok;
      while (std::getline(ss, tok, ',')) o.only.insert(std::stoi(tok));
    } else {
      std::cerr << "usage: acceptance [--quick] [--only N[,N...]]\n";
      return 64;
    }
  }
  o.workers = std::max(1, omp_get_num_procs());
  set_warning_handler([](std::string_view) {});

  const std::vector<std::function<Verdict(const Options&)>> criteria{
      criterion1, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, criterion9};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!o.only.empty() && !o.only.count(id)) continue;
    Verdict v;
    try {
      v = criteria[i](o);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << "exception: " << e.what();
    }
    if (!v.pass) ++failures;
    std::cout << "CRITERION " << id << ' ' << (v.pass ? "PASS" : "FAIL") << ": "
              << v.detail.str() << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
