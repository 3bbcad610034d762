#include "hdboot/dependence.hpp"

#include "hdboot/error.hpp"
#include "hdboot/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace hdboot {

namespace {

// Neumaier's variant of Kahan summation.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) noexcept {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const noexcept { return sum + carry; }
};

}  // namespace

std::vector<Index> probe_indices(Index n) {
  std::vector<Index> p = {(n + 3) / 4, (n + 1) / 2, (3 * n + 3) / 4, n};
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  return p;
}

namespace detail {

void validate_theta_args(const ModelSpec& spec, double q, Index reps) {
  spec.validate();
  require(spec.model != ModelId::Regression,
          "estimate_theta: REGRESSION is not a generator");
  require(q >= 1.0 && std::isfinite(q), "estimate_theta: q must be >= 1");
  require(reps >= 100, "estimate_theta: reps must be at least 100");
}

void rep_difference_moments(const ModelSpec& spec, Index k, double q,
                            std::span<const Index> probes,
                            std::uint64_t rep_seed, std::span<double> out) {
  const Index d = spec.d;
  const std::int64_t first = 1 - spec.burn_in;
  const std::int64_t last = *std::max_element(probes.begin(), probes.end());
  const auto steps = static_cast<std::size_t>(last - first + 1);
  const auto ud = static_cast<std::size_t>(d);

  const InnovationFn base =
      model_innovations(spec, rep_seed, StreamTag::PredictorInnovation);
  const InnovationFn replacement =
      model_innovations(spec, rep_seed, StreamTag::ReplacementInnovation);

  std::vector<double> innovations(steps * ud);
  std::vector<double> states(steps * ud);
  std::vector<double> state(ud, 0.0);
  for (std::int64_t t = first; t <= last; ++t) {
    const auto row = static_cast<std::size_t>(t - first) * ud;
    std::span<double> e(innovations.data() + row, ud);
    base(t, e);
    advance_state(spec, t, state, e);
    std::copy(state.begin(), state.end(), states.begin() + static_cast<std::ptrdiff_t>(row));
  }

  std::vector<double> swapped(ud);
  for (std::size_t p = 0; p < probes.size(); ++p) {
    std::span<double> dst = out.subspan(p * ud, ud);
    const std::int64_t probe = probes[p];
    const std::int64_t t0 = probe - k;
    if (t0 < first) {
      // The swapped innovation predates the zero start.
      std::fill(dst.begin(), dst.end(), 0.0);
      continue;
    }
    if (t0 == first) {
      std::fill(state.begin(), state.end(), 0.0);
    } else {
      const auto row = static_cast<std::size_t>(t0 - 1 - first) * ud;
      std::copy_n(states.begin() + static_cast<std::ptrdiff_t>(row), ud, state.begin());
    }
    replacement(t0, swapped);
    advance_state(spec, t0, state, swapped);
    for (std::int64_t t = t0 + 1; t <= probe; ++t) {
      const auto row = static_cast<std::size_t>(t - first) * ud;
      advance_state(spec, t, state,
                    std::span<const double>(innovations.data() + row, ud));
    }
    const auto row = static_cast<std::size_t>(probe - first) * ud;
    for (std::size_t j = 0; j < ud; ++j) {
      dst[j] = std::pow(std::abs(states[row + j] - state[j]), q);
    }
  }
}

DependenceEstimate finish_theta(const ModelSpec& spec, Index k, double q,
                                Index reps, std::span<const Index> probes,
                                const std::vector<double>& moments) {
  const Index d = spec.d;
  const auto np = static_cast<Index>(probes.size());
  DependenceEstimate est;
  est.k = k;
  est.q = q;
  est.reps = reps;
  est.per_coord = Eigen::VectorXd::Zero(d);
  est.mc_se = Eigen::VectorXd::Zero(d);

  for (Index p = 0; p < np; ++p) {
    for (Index j = 0; j < d; ++j) {
      CompensatedSum s1, s2;
      for (Index r = 0; r < reps; ++r) {
        const double m = moments[static_cast<std::size_t>((r * np + p) * d + j)];
        s1.add(m);
        s2.add(m * m);
      }
      const double rn = static_cast<double>(reps);
      const double mean = s1.value() / rn;
      const double var =
          std::max(0.0, (s2.value() - rn * mean * mean) / (rn - 1.0));
      const double theta = std::pow(mean, 1.0 / q);
      if (p == 0 || theta > est.per_coord(j)) {
        est.per_coord(j) = theta;
        // Delta method for the q-th root of the sample mean.
        est.mc_se(j) = mean > 0.0 ? std::sqrt(var / rn) / q * std::pow(mean, 1.0 / q - 1.0)
                                  : 0.0;
      }
    }
  }
  est.max_over_coords = est.per_coord.maxCoeff();
  return est;
}

}  // namespace detail

DependenceEstimate estimate_theta(const ModelSpec& spec, Index k, double q,
                                  Index reps, std::uint64_t seed) {
  detail::validate_theta_args(spec, q, reps);
  require(k >= 0, "estimate_theta: k must be non-negative");
  const std::vector<Index> probes = probe_indices(spec.n);
  const auto stride = probes.size() * static_cast<std::size_t>(spec.d);
  std::vector<double> moments(static_cast<std::size_t>(reps) * stride);

#pragma omp parallel for schedule(static)
  for (Index r = 0; r < reps; ++r) {
    const std::uint64_t rep_seed = derive_seed(seed, {static_cast<std::uint64_t>(r)});
    detail::rep_difference_moments(
        spec, k, q, probes, rep_seed,
        std::span<double>(moments.data() + static_cast<std::size_t>(r) * stride, stride));
  }
  return detail::finish_theta(spec, k, q, reps, probes, moments);
}

double cumulative_theta(std::span<const DependenceEstimate> estimates) {
  require(!estimates.empty(), "cumulative_theta: no estimates");
  std::map<Index, const DependenceEstimate*> by_lag;
  for (const auto& e : estimates) {
    require(by_lag.emplace(e.k, &e).second, "cumulative_theta: duplicate lag");
  }
  const Index k0 = by_lag.begin()->first;
  const Index k1 = by_lag.rbegin()->first;
  require(k1 - k0 + 1 == static_cast<Index>(by_lag.size()),
          "cumulative_theta: gap in lag range");
  const Index d = by_lag.begin()->second->per_coord.size();
  Eigen::VectorXd totals = Eigen::VectorXd::Zero(d);
  for (const auto& [lag, e] : by_lag) {
    require(e->per_coord.size() == d, "cumulative_theta: dimension mismatch");
    totals += e->per_coord;
  }
  return totals.maxCoeff();
}

double theta_tail_bound(std::span<const DependenceEstimate> estimates) {
  require(estimates.size() >= 2, "theta_tail_bound: need at least two lags");
  const DependenceEstimate* last = &estimates[0];
  const DependenceEstimate* prev = nullptr;
  for (const auto& e : estimates) {
    if (e.k > last->k) last = &e;
  }
  for (const auto& e : estimates) {
    if (e.k == last->k - 1) prev = &e;
  }
  require(prev != nullptr, "theta_tail_bound: last two lags must be contiguous");
  if (last->max_over_coords == 0.0) return 0.0;
  if (prev->max_over_coords <= 0.0) return std::numeric_limits<double>::infinity();
  const double ratio = last->max_over_coords / prev->max_over_coords;
  if (ratio >= 1.0) return std::numeric_limits<double>::infinity();
  return last->max_over_coords * ratio / (1.0 - ratio);
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  require(m.rows() == m.cols() && m.rows() > 0, "min_eigenvalue: matrix must be square");
  if (!m.allFinite()) throw NumericalError("min_eigenvalue: non-finite entry");
  if (m.rows() == 1) return m(0, 0);
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace hdboot
