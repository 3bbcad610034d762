#include "hdboot/models.hpp"

#include "hdboot/error.hpp"
#include "hdboot/rng.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace hdboot {

std::string_view to_string(ModelId id) noexcept {
  switch (id) {
    case ModelId::M1: return "M1";
    case ModelId::M2: return "M2";
    case ModelId::M3: return "M3";
    case ModelId::M4: return "M4";
    case ModelId::M5: return "M5";
    case ModelId::Regression: return "REGRESSION";
  }
  return "?";
}

ModelId parse_model_id(std::string_view name) {
  for (ModelId id : {ModelId::M1, ModelId::M2, ModelId::M3, ModelId::M4,
                     ModelId::M5, ModelId::Regression}) {
    if (name == to_string(id)) return id;
  }
  throw InvalidArgument("unknown model id '" + std::string(name) + "'");
}

void ModelSpec::validate() const {
  require(n >= 2, "ModelSpec: n must be at least 2");
  require(d >= 1, "ModelSpec: d must be at least 1");
  require(burn_in >= 0, "ModelSpec: burn_in must be non-negative");
  if (model == ModelId::Regression) {
    require(d < n, "ModelSpec: regression requires d < n");
  }
  if (model == ModelId::M5) {
    require(std::isfinite(t_df) && t_df > 2.0,
            "ModelSpec: M5 requires t_df > 2");
  }
  if (model == ModelId::M2) {
    require(std::isfinite(band_value), "ModelSpec: band_value must be finite");
  }
  if (beta) {
    require(beta->size() == d, "ModelSpec: beta has the wrong dimension");
    require(beta->allFinite(), "ModelSpec: beta must be finite");
  }
}

TimeSeriesMatrix::TimeSeriesMatrix(Eigen::MatrixXd data)
    : data_(std::move(data)) {
  if (!data_.allFinite()) {
    throw NumericalError("TimeSeriesMatrix: non-finite entry");
  }
}

double ar_coefficient(ModelId model, Index i, Index n) {
  if (i < 1) i = 1;
  const double u = static_cast<double>(i) / static_cast<double>(n);
  const double wave = std::cos(2.0 * std::numbers::pi * u);
  switch (model) {
    case ModelId::M1:
    case ModelId::M2:
    case ModelId::M5:
      return 0.6 * wave;
    case ModelId::M3:
      return u < 0.75 ? 0.25 * wave : u - 0.3;
    case ModelId::M4:
      if (u < 0.25) return 0.25 * wave;
      if (u < 0.6) return u - 0.6;
      return 0.6 * std::exp(-50.0 * (u - 0.75) * (u - 0.75));
    case ModelId::Regression:
      break;
  }
  throw InvalidArgument("ar_coefficient: model has no AR coefficient");
}

double error_coefficient(Index i, Index n) {
  if (i < 1) i = 1;
  const double u = static_cast<double>(i) / static_cast<double>(n);
  return 14.0 * u * u * (1.0 - u) * (1.0 - u) - 0.5;
}

Eigen::MatrixXd band_matrix(Index d, double band) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(d, d);
  for (Index j = 0; j + 1 < d; ++j) {
    a(j, j + 1) = band;
    a(j + 1, j) = band;
  }
  return a;
}

InnovationFn model_innovations(const ModelSpec& spec, std::uint64_t seed,
                               StreamTag stream_tag) {
  if (spec.model == ModelId::M5) {
    const double nu = spec.t_df;
    // Unit marginal variance: Var(t_nu) = nu / (nu - 2).
    const double unit_scale = std::sqrt(nu / (nu - 2.0));
    return [seed, stream_tag, nu, unit_scale](std::int64_t t,
                                              std::span<double> out) {
      Stream s(seed, stream_tag, static_cast<std::uint64_t>(t));
      for (double& v : out) v = s.normal();
      // One chi-square shared by all coordinates of the time point.
      const double w = s.chi_squared(nu);
      const double factor = 1.0 / (std::sqrt(w / nu) * unit_scale);
      for (double& v : out) v *= factor;
    };
  }
  return [seed, stream_tag](std::int64_t t, std::span<double> out) {
    Stream s(seed, stream_tag, static_cast<std::uint64_t>(t));
    for (double& v : out) v = s.normal();
  };
}

InnovationFn model_innovations(const ModelSpec& spec) {
  return model_innovations(spec, spec.seed, StreamTag::PredictorInnovation);
}

void advance_state(const ModelSpec& spec, std::int64_t t,
                   std::span<double> state, std::span<const double> innovation) {
  const double a = ar_coefficient(spec.model, static_cast<Index>(t), spec.n);
  const std::size_t d = state.size();
  if (spec.model == ModelId::M2 && d > 1) {
    const double b = spec.band_value;
    double prev = state[0];
    for (std::size_t j = 0; j < d; ++j) {
      const double here = state[j];
      double coupled = here;
      if (j > 0) coupled += b * prev;
      if (j + 1 < d) coupled += b * state[j + 1];
      prev = here;
      state[j] = a * coupled + innovation[j];
    }
    return;
  }
  for (std::size_t j = 0; j < d; ++j) {
    state[j] = a * state[j] + innovation[j];
  }
}

TimeSeriesMatrix simulate_model(const ModelSpec& spec,
                                const InnovationFn& innovations) {
  spec.validate();
  require(spec.model != ModelId::Regression,
          "simulate_model: REGRESSION is not a predictor model");
  const Index n = spec.n;
  const Index d = spec.d;
  std::vector<double> state(static_cast<std::size_t>(d), 0.0);
  std::vector<double> e(static_cast<std::size_t>(d));
  Eigen::MatrixXd out(n, d);
  for (std::int64_t t = 1 - spec.burn_in; t <= n; ++t) {
    innovations(t, e);
    advance_state(spec, t, state, e);
    if (t >= 1) {
      for (Index j = 0; j < d; ++j) out(t - 1, j) = state[static_cast<std::size_t>(j)];
    }
  }
  return TimeSeriesMatrix(std::move(out));
}

TimeSeriesMatrix simulate_model(const ModelSpec& spec) {
  spec.validate();
  return simulate_model(spec, model_innovations(spec));
}

Eigen::VectorXd simulate_error_process(Index n, const InnovationFn& eta,
                                       Index burn_in) {
  require(n >= 2, "simulate_error_process: n must be at least 2");
  require(burn_in >= 0, "simulate_error_process: burn_in must be non-negative");
  Eigen::VectorXd eps(n);
  double state = 0.0;
  double shock = 0.0;
  for (std::int64_t t = 1 - burn_in; t <= n; ++t) {
    eta(t, std::span<double>(&shock, 1));
    state = error_coefficient(static_cast<Index>(t), n) * state + shock;
    if (t >= 1) eps(t - 1) = state;
  }
  return eps;
}

Eigen::VectorXd simulate_error_process(Index n, std::uint64_t seed,
                                       Index burn_in) {
  const InnovationFn eta = [seed](std::int64_t t, std::span<double> out) {
    Stream s(seed, StreamTag::ErrorInnovation, static_cast<std::uint64_t>(t));
    out[0] = s.normal();
  };
  return simulate_error_process(n, eta, burn_in);
}

RegressionDataset generate_regression(const ModelSpec& spec,
                                      const Eigen::VectorXd& beta,
                                      std::uint64_t error_seed) {
  spec.validate();
  require(beta.size() == spec.d,
          "generate_regression: beta dimension does not match d");
  require(beta.allFinite(), "generate_regression: beta must be finite");
  RegressionDataset out;
  out.X = simulate_model(spec);
  out.eps = simulate_error_process(spec.n, error_seed, spec.burn_in);
  out.beta_true = beta;
  out.y = out.X.data() * beta + out.eps;
  return out;
}

RegressionDataset generate_regression(const ModelSpec& spec,
                                      const Eigen::VectorXd& beta) {
  return generate_regression(spec, beta, spec.seed);
}

Eigen::VectorXd sparse_ones(Index d, Index r) {
  require(r >= 0 && r <= d, "sparse_ones: r must lie in [0, d]");
  Eigen::VectorXd v = Eigen::VectorXd::Ones(d);
  v.head(r).setZero();
  return v;
}

}  // namespace hdboot
