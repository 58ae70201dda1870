#include "core/simulation.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace spinn {

namespace {

constexpr std::uint64_t kSigmaStream = 0x5160A;
constexpr std::uint64_t kTrainStream = 0x7121;
constexpr std::uint64_t kTestStream = 0x7357;
constexpr std::uint64_t kRateSalt = 0x2A7E;
constexpr std::uint64_t kSweepSalt = 0x53EE9;

double teacher_truth(const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  return std::tanh(x(0) + 2.0 * x(1) - 3.0 * x(2) + 2.0 * x(3)) +
         2.0 * std::tanh(x(0) - 2.0 * x(4) + 2.0 * x(5)) +
         std::tanh(-x(1) - x(2) - x(5)) +
         std::tanh(x(4) - 0.5 * x(2) + 0.5 * x(5));
}

double additive_truth(const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  return std::sin(2.0 * x(0)) + std::cos(5.0 * x(1)) + x(2) * x(2) * x(2) -
         std::sin(x(3)) + x(4) - x(5) * x(5);
}

double complex_truth(const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  return std::sin(x(0) * (x(0) + x(1))) * std::cos(x(2) + x(3) * x(4)) *
         std::sin(std::exp(x(4)) + std::exp(x(5)) - x(1));
}

double highdim_truth(const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  return std::min(x(0), x(1)) * std::cos(1.5 * x(2) + 2.0 * x(3)) +
         std::exp(x(4) + std::sin(x(3))) * x(1) +
         std::sin(std::max(x(5), x(2))) * (x(4) - x(0));
}

void fill_uniform(Eigen::MatrixXd& m, Rng& rng) {
  for (long i = 0; i < m.rows(); ++i) {
    for (long j = 0; j < m.cols(); ++j) {
      m(i, j) = rng.uniform();
    }
  }
}

Dataset draw_dataset(ScenarioKind kind, int n, int p, double sigma,
                     std::uint64_t stream_seed) {
  Dataset data;
  data.task = Task::regression;
  data.features.resize(n, p);
  data.responses.resize(n);
  Rng rng(stream_seed);
  fill_uniform(data.features, rng);
  for (long i = 0; i < n; ++i) {
    data.responses(i) =
        scenario_truth(kind, data.features.row(i)) + sigma * rng.normal();
  }
  return data;
}

struct PointStats {
  double mean = 0.0;
  double se = 0.0;
};

PointStats summarize(const std::vector<double>& values) {
  PointStats stats;
  const auto r = static_cast<double>(values.size());
  for (double v : values) stats.mean += v;
  stats.mean /= r;
  if (values.size() > 1) {
    double var = 0.0;
    for (double v : values) var += (v - stats.mean) * (v - stats.mean);
    var /= (r - 1.0);
    stats.se = std::sqrt(var / r);
  }
  return stats;
}

}  // namespace

std::vector<int> relevant_set() { return {0, 1, 2, 3, 4, 5}; }

void ScenarioSpec::validate() const {
  if (p < kNumRelevant) {
    std::ostringstream msg;
    msg << "scenario needs p >= " << kNumRelevant << ", got " << p;
    throw Error(ErrorKind::argument, msg.str());
  }
  if (n_train < 1 || n_test < 1) {
    throw Error(ErrorKind::argument, "scenario sample sizes must be positive");
  }
  if (snr <= 0.0) throw Error(ErrorKind::argument, "snr must be positive");
}

double scenario_truth(ScenarioKind kind,
                      const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  if (x.size() < kNumRelevant) {
    throw Error(ErrorKind::argument, "truth input is shorter than the relevant set");
  }
  switch (kind) {
    case ScenarioKind::teacher_net: return teacher_truth(x);
    case ScenarioKind::additive_univariate: return additive_truth(x);
    case ScenarioKind::complex_multivariate: return complex_truth(x);
    case ScenarioKind::highdim_additive_multivariate: return highdim_truth(x);
  }
  throw Error(ErrorKind::argument, "unknown scenario kind");
}

TruthFn scenario_truth_fn(ScenarioKind kind) {
  return [kind](const Eigen::Ref<const Eigen::RowVectorXd>& x) {
    return scenario_truth(kind, x);
  };
}

double scenario_truth_sd(ScenarioKind kind) {
  static const std::array<double, 4> sds = [] {
    std::array<double, 4> out{};
    constexpr int n_draws = 100000;
    for (int k = 0; k < 4; ++k) {
      Rng rng(derive_seed(kSigmaStream, {static_cast<std::uint64_t>(k)}));
      Eigen::RowVectorXd x(kNumRelevant);
      double sum = 0.0, sum_sq = 0.0;
      for (int i = 0; i < n_draws; ++i) {
        for (int j = 0; j < kNumRelevant; ++j) x(j) = rng.uniform();
        const double f = scenario_truth(static_cast<ScenarioKind>(k), x);
        sum += f;
        sum_sq += f * f;
      }
      const double mean = sum / n_draws;
      out[static_cast<std::size_t>(k)] =
          std::sqrt((sum_sq - n_draws * mean * mean) / (n_draws - 1));
    }
    return out;
  }();
  return sds[static_cast<std::size_t>(kind)];
}

double scenario_sigma(ScenarioKind kind, double snr) {
  if (snr <= 0.0) throw Error(ErrorKind::argument, "snr must be positive");
  return scenario_truth_sd(kind) / snr;
}

ScenarioData generate(const ScenarioSpec& spec) {
  spec.validate();
  ScenarioData data;
  data.spec = spec;
  data.sigma = scenario_sigma(spec.kind, spec.snr);
  data.train = draw_dataset(spec.kind, spec.n_train, spec.p, data.sigma,
                            derive_seed(spec.seed, {kTrainStream}));
  data.test = draw_dataset(spec.kind, spec.n_test, spec.p, data.sigma,
                           derive_seed(spec.seed, {kTestStream}));
  return data;
}

NetworkArchitecture teacher_architecture(int p) {
  return make_architecture(p, {4}, Task::regression, Activation::tanh);
}

NetworkParameters teacher_parameters(int p) {
  NetworkParameters params = NetworkParameters::zero(teacher_architecture(p));
  Eigen::MatrixXd& theta1 = params.weights[0];
  theta1(0, 0) = 1.0;  theta1(0, 1) = 2.0;  theta1(0, 2) = -3.0; theta1(0, 3) = 2.0;
  theta1(1, 0) = 1.0;  theta1(1, 4) = -2.0; theta1(1, 5) = 2.0;
  theta1(2, 1) = -1.0; theta1(2, 2) = -1.0; theta1(2, 5) = -1.0;
  theta1(3, 2) = -0.5; theta1(3, 4) = 1.0;  theta1(3, 5) = 0.5;
  params.weights[1] << 1.0, 2.0, 1.0, 1.0;
  return params;
}

double excess_loss(const FitResult& fit, const TruthFn& truth,
                   const Eigen::Ref<const Eigen::MatrixXd>& test_x) {
  if (test_x.rows() < 1) {
    throw Error(ErrorKind::argument, "excess loss needs at least one test point");
  }
  const Eigen::VectorXd preds = forward_batch(fit.params, fit.arch, test_x);
  double total = 0.0;
  for (long i = 0; i < test_x.rows(); ++i) {
    const double d = truth(test_x.row(i)) - preds(i);
    total += d * d;
  }
  return total / static_cast<double>(test_x.rows());
}

double irrelevant_penalty_mass(const FitResult& fit,
                               const std::vector<int>& relevant, double alpha) {
  const Eigen::MatrixXd& theta1 = fit.params.weights[0];
  std::vector<char> is_relevant(static_cast<std::size_t>(theta1.cols()), 0);
  for (int j : relevant) {
    if (j < 0 || j >= theta1.cols()) {
      throw Error(ErrorKind::argument, "relevant index out of range");
    }
    is_relevant[static_cast<std::size_t>(j)] = 1;
  }
  double mass = 0.0;
  for (long j = 0; j < theta1.cols(); ++j) {
    if (!is_relevant[static_cast<std::size_t>(j)]) {
      mass += omega_alpha(theta1.col(j), alpha);
    }
  }
  return mass;
}

RateSlopes rate_slopes(RateAxis axis, const std::vector<RatePoint>& points) {
  RateSlopes slopes;
  const int n = static_cast<int>(points.size());
  if (axis == RateAxis::n_obs) {
    Eigen::MatrixXd design(n, 2);
    Eigen::VectorXd response(n);
    bool loggable = true;
    for (int i = 0; i < n; ++i) {
      const double nv = points[static_cast<std::size_t>(i)].grid_value;
      design(i, 0) = 1.0;
      design(i, 1) = std::log(std::log(nv) / nv);
      if (points[static_cast<std::size_t>(i)].mean_excess <= 0.0) loggable = false;
      else response(i) = std::log(points[static_cast<std::size_t>(i)].mean_excess);
    }
    if (!loggable) {
      slopes.degenerate = true;
      return slopes;
    }
    const OlsFit excess_fit = ols(design, response);
    if (excess_fit.degenerate) {
      slopes.degenerate = true;
      return slopes;
    }
    slopes.excess_intercept = excess_fit.coef(0);
    slopes.excess_slope = excess_fit.coef(1);

    // the paper's irrelevant-mass fit only uses n >= 400
    std::vector<int> keep;
    for (int i = 0; i < n; ++i) {
      if (points[static_cast<std::size_t>(i)].grid_value >= 400.0 &&
          points[static_cast<std::size_t>(i)].mean_mass > 0.0) {
        keep.push_back(i);
      }
    }
    if (keep.size() >= 2) {
      Eigen::MatrixXd mass_design(static_cast<long>(keep.size()), 2);
      Eigen::VectorXd mass_response(static_cast<long>(keep.size()));
      for (std::size_t i = 0; i < keep.size(); ++i) {
        const auto& pt = points[static_cast<std::size_t>(keep[i])];
        mass_design(static_cast<long>(i), 0) = 1.0;
        mass_design(static_cast<long>(i), 1) = std::log(std::log(pt.grid_value) / pt.grid_value);
        mass_response(static_cast<long>(i)) = std::log(pt.mean_mass);
      }
      const OlsFit mass_fit = ols(mass_design, mass_response);
      if (!mass_fit.degenerate) {
        slopes.mass_intercept = mass_fit.coef(0);
        slopes.mass_slope = mass_fit.coef(1);
      }
    }
    return slopes;
  }

  if (axis == RateAxis::n_features) {
    Eigen::MatrixXd excess_design(n, 3), mass_design(n, 3);
    Eigen::VectorXd excess_response(n), mass_response(n);
    for (int i = 0; i < n; ++i) {
      const auto& pt = points[static_cast<std::size_t>(i)];
      excess_design(i, 0) = 1.0;
      excess_design(i, 1) = pt.grid_value;
      excess_design(i, 2) = std::log(pt.grid_value);
      mass_design(i, 0) = 1.0;
      mass_design(i, 1) = pt.grid_value;
      mass_design(i, 2) = std::sqrt(std::log(pt.grid_value));
      excess_response(i) = pt.mean_excess;
      mass_response(i) = pt.mean_mass;
    }
    const OlsFit excess_fit = ols(excess_design, excess_response);
    if (excess_fit.degenerate) {
      slopes.degenerate = true;
      return slopes;
    }
    slopes.excess_p_coef = excess_fit.coef(1);
    slopes.excess_logp_coef = excess_fit.coef(2);
    const OlsFit mass_fit = ols(mass_design, mass_response);
    if (!mass_fit.degenerate) {
      slopes.mass_p_coef = mass_fit.coef(1);
      slopes.mass_sqrtlogp_coef = mass_fit.coef(2);
    }
    return slopes;
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& pt : points) {
    lo = std::min(lo, pt.mean_excess);
    hi = std::max(hi, pt.mean_excess);
  }
  slopes.excess_max_min_ratio = hi / lo;
  slopes.degenerate = !(lo > 0.0);
  return slopes;
}

RateExperimentResult rate_experiment(RateAxis axis,
                                     const std::vector<double>& grid,
                                     const ScenarioSpec& base,
                                     const PenaltyConfig& penalty,
                                     const TrainConfig& config, int replicates) {
  base.validate();
  penalty.validate();
  config.validate();
  if (grid.size() < 3) {
    throw Error(ErrorKind::argument, "rate experiment needs at least 3 grid points");
  }
  for (double g : grid) {
    if (g < 2.0) throw Error(ErrorKind::argument, "grid values must be at least 2");
  }
  if (replicates < 1) throw Error(ErrorKind::argument, "replicates must be positive");

  // The n-axis penalty shrinks like (log n / n)^0.9: the theoretical
  // sqrt(log n / n) scale adjusted so that fits at desk-scale n stay in the
  // partial-shrinkage regime instead of zeroing every irrelevant column.
  constexpr double kNAxisExponent = 0.9;
  const auto schedule = [&](double value) {
    switch (axis) {
      case RateAxis::n_obs: {
        const double ref = std::log(static_cast<double>(base.n_train)) /
                           static_cast<double>(base.n_train);
        return penalty.lambda *
               std::pow((std::log(value) / value) / ref, kNAxisExponent);
      }
      case RateAxis::n_features:
        return penalty.lambda *
               std::sqrt(std::log(value) / std::log(static_cast<double>(base.p)));
      case RateAxis::hidden_nodes: return penalty.lambda;
    }
    return penalty.lambda;
  };

  const int n_points = static_cast<int>(grid.size());
  const int n_jobs = n_points * replicates;
  std::vector<double> excess_values(static_cast<std::size_t>(n_jobs),
                                    std::numeric_limits<double>::quiet_NaN());
  std::vector<double> mass_values(static_cast<std::size_t>(n_jobs),
                                  std::numeric_limits<double>::quiet_NaN());

  parallel_for(n_jobs, [&](int job) {
    const int point = job / replicates;
    const int rep = job % replicates;
    const double value = grid[static_cast<std::size_t>(point)];

    ScenarioSpec spec = base;
    int m1 = 4;
    switch (axis) {
      case RateAxis::n_obs: spec.n_train = static_cast<int>(value); break;
      case RateAxis::n_features: spec.p = static_cast<int>(value); break;
      case RateAxis::hidden_nodes: m1 = static_cast<int>(value); break;
    }
    spec.seed = derive_seed(base.seed,
                            {kRateSalt, static_cast<std::uint64_t>(axis),
                             hash_double(value), static_cast<std::uint64_t>(rep)});

    PenaltyConfig point_penalty = penalty;
    point_penalty.lambda = schedule(value);
    TrainConfig fit_config = config;
    fit_config.seed = derive_seed(spec.seed, {kRateSalt});

    try {
      const ScenarioData data = generate(spec);
      const NetworkArchitecture arch =
          make_architecture(spec.p, {m1}, Task::regression, Activation::tanh);
      const FitResult result = fit(arch, data.train, point_penalty, fit_config);
      excess_values[static_cast<std::size_t>(job)] =
          excess_loss(result, scenario_truth_fn(spec.kind), data.test.features);
      mass_values[static_cast<std::size_t>(job)] =
          irrelevant_penalty_mass(result, relevant_set(), point_penalty.alpha);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::numeric) throw;
      // leave NaN; the point fails only if every replicate does
    }
  });

  RateExperimentResult result;
  result.axis = axis;
  result.replicates = replicates;
  for (int point = 0; point < n_points; ++point) {
    std::vector<double> excess_ok, mass_ok;
    for (int rep = 0; rep < replicates; ++rep) {
      const double e = excess_values[static_cast<std::size_t>(point * replicates + rep)];
      if (std::isfinite(e)) {
        excess_ok.push_back(e);
        mass_ok.push_back(mass_values[static_cast<std::size_t>(point * replicates + rep)]);
      }
    }
    if (excess_ok.empty()) {
      std::ostringstream msg;
      msg << "all replicates failed at grid point " << grid[static_cast<std::size_t>(point)];
      throw Error(ErrorKind::numeric, msg.str());
    }
    RatePoint pt;
    pt.grid_value = grid[static_cast<std::size_t>(point)];
    const PointStats excess_stats = summarize(excess_ok);
    const PointStats mass_stats = summarize(mass_ok);
    pt.mean_excess = excess_stats.mean;
    pt.se_excess = excess_stats.se;
    pt.mean_mass = mass_stats.mean;
    pt.se_mass = mass_stats.se;
    result.points.push_back(pt);
  }
  result.slopes = rate_slopes(axis, result.points);
  return result;
}

std::vector<SweepCell> alpha_sweep(
    const std::vector<std::pair<double, double>>& weight_pairs,
    const ScenarioSpec& spec, const TrainConfig& config, double lambda0) {
  if (spec.kind != ScenarioKind::complex_multivariate) {
    throw Error(ErrorKind::argument,
                "alpha sweep is defined on the complex multivariate scenario");
  }
  if (weight_pairs.empty()) {
    throw Error(ErrorKind::argument, "alpha sweep needs at least one weight pair");
  }
  spec.validate();
  config.validate();

  const ScenarioData data = generate(spec);
  const int n_cells = static_cast<int>(weight_pairs.size());
  std::vector<SweepCell> cells(static_cast<std::size_t>(n_cells));

  parallel_for(n_cells, [&](int c) {
    const auto [lasso_w, group_w] = weight_pairs[static_cast<std::size_t>(c)];
    if (lasso_w < 0.0 || group_w < 0.0) {
      throw Error(ErrorKind::argument, "penalty weights must be nonnegative");
    }
    SweepCell& cell = cells[static_cast<std::size_t>(c)];
    cell.lambda_lasso = lasso_w;
    cell.lambda_group = group_w;

    const double lambda = lasso_w + group_w;
    const double alpha = lambda > 0.0 ? group_w / lambda : 0.5;
    PenaltyConfig penalty{lambda0, lambda, alpha};
    TrainConfig cell_config = config;
    cell_config.seed = derive_seed(
        spec.seed, {kSweepSalt, hash_double(lasso_w), hash_double(group_w)});

    const NetworkArchitecture arch =
        make_architecture(spec.p, {8}, Task::regression, Activation::tanh);
    const FitResult result = fit(arch, data.train, penalty, cell_config);
    cell.mse = excess_loss(result, scenario_truth_fn(spec.kind), data.test.features);
    cell.n_selected = static_cast<int>(result.selected_features.size());

    const Eigen::MatrixXd& theta1 = result.params.weights[0];
    double relevant_mass = 0.0, total_mass = 0.0;
    for (long j = 0; j < theta1.cols(); ++j) {
      const double m = omega_alpha(theta1.col(j), alpha);
      total_mass += m;
      if (j < kNumRelevant) relevant_mass += m;
    }
    if (total_mass == 0.0) {
      cell.empty = true;
    } else {
      cell.relevant_share = relevant_mass / total_mass;
      cell.irrelevant_share = (total_mass - relevant_mass) / total_mass;
    }
  });
  return cells;
}

}  // namespace spinn
