#pragma once

#include <functional>
#include <vector>

#include "core/model_selection.hpp"

namespace spinn {

enum class ScenarioKind {
  teacher_net,
  additive_univariate,
  complex_multivariate,
  highdim_additive_multivariate,
};

/// Every scenario's true function depends on the first six features only.
inline constexpr int kNumRelevant = 6;

std::vector<int> relevant_set();

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::teacher_net;
  int p = 10;
  int n_train = 200;
  int n_test = 2000;
  double snr = 2.0;
  std::uint64_t seed = 0;

  void validate() const;
};

using TruthFn = std::function<double(const Eigen::Ref<const Eigen::RowVectorXd>&)>;

double scenario_truth(ScenarioKind kind,
                      const Eigen::Ref<const Eigen::RowVectorXd>& x);
TruthFn scenario_truth_fn(ScenarioKind kind);

/// Monte Carlo standard deviation of f*(X) under X ~ U(0,1)^p, computed once
/// per scenario from a fixed internal stream (1e5 draws).
double scenario_truth_sd(ScenarioKind kind);

/// Noise scale sigma = sd(f*(X)) / snr.
double scenario_sigma(ScenarioKind kind, double snr);

struct ScenarioData {
  ScenarioSpec spec;
  Dataset train;
  Dataset test;
  double sigma = 0.0;
};

/// Draws X i.i.d. Uniform(0,1) and y = f*(x) + sigma * eps from independent
/// seeded train/test streams.
ScenarioData generate(const ScenarioSpec& spec);

/// The teacher network of the rate experiments: one hidden layer, four tanh
/// nodes. Copying these parameters into a fit reproduces f* exactly.
NetworkArchitecture teacher_architecture(int p);
NetworkParameters teacher_parameters(int p);

/// Mean over test rows of (f*(x) - f_fit(x))^2.
double excess_loss(const FitResult& fit, const TruthFn& truth,
                   const Eigen::Ref<const Eigen::MatrixXd>& test_x);

/// Sum of Omega_alpha over first-layer columns outside the relevant set.
double irrelevant_penalty_mass(const FitResult& fit,
                               const std::vector<int>& relevant, double alpha);

enum class RateAxis { n_obs, n_features, hidden_nodes };

struct RatePoint {
  double grid_value = 0.0;
  double mean_excess = 0.0;
  double se_excess = 0.0;
  double mean_mass = 0.0;
  double se_mass = 0.0;
};

struct RateSlopes {
  bool degenerate = false;
  // axis N: log mean excess ~ log(log n / n); mass fit restricted to n >= 400
  double excess_slope = std::numeric_limits<double>::quiet_NaN();
  double excess_intercept = std::numeric_limits<double>::quiet_NaN();
  double mass_slope = std::numeric_limits<double>::quiet_NaN();
  double mass_intercept = std::numeric_limits<double>::quiet_NaN();
  // axis P: mean excess ~ 1 + p + log p; mean mass ~ 1 + p + sqrt(log p)
  double excess_p_coef = std::numeric_limits<double>::quiet_NaN();
  double excess_logp_coef = std::numeric_limits<double>::quiet_NaN();
  double mass_p_coef = std::numeric_limits<double>::quiet_NaN();
  double mass_sqrtlogp_coef = std::numeric_limits<double>::quiet_NaN();
  // axis M1
  double excess_max_min_ratio = std::numeric_limits<double>::quiet_NaN();
};

struct RateExperimentResult {
  RateAxis axis = RateAxis::n_obs;
  std::vector<RatePoint> points;
  RateSlopes slopes;
  int replicates = 0;
};

/// Regression summaries alone, reusable on injected tables.
RateSlopes rate_slopes(RateAxis axis, const std::vector<RatePoint>& points);

/// Sweeps one axis (observations, features, or first-layer width) of the
/// teacher-style experiment. penalty.lambda is interpreted at the base
/// spec's (n_train, p) and rescaled along the axis: proportional to
/// sqrt(log n / n) on the N axis and to sqrt(log p) on the P axis.
RateExperimentResult rate_experiment(RateAxis axis,
                                     const std::vector<double>& grid,
                                     const ScenarioSpec& base,
                                     const PenaltyConfig& penalty,
                                     const TrainConfig& config, int replicates);

struct SweepCell {
  double lambda_lasso = 0.0;   // lambda * (1 - alpha)
  double lambda_group = 0.0;   // lambda * alpha
  double mse = 0.0;
  double relevant_share = 0.0;
  double irrelevant_share = 0.0;
  bool empty = false;          // first layer identically zero, shares undefined
  int n_selected = 0;
};

/// Lasso-weight vs group-lasso-weight sweep on the complex multivariate
/// scenario. Each pair (l1, l2) is fit at lambda = l1 + l2, alpha = l2 / lambda.
std::vector<SweepCell> alpha_sweep(
    const std::vector<std::pair<double, double>>& weight_pairs,
    const ScenarioSpec& spec, const TrainConfig& config, double lambda0);

}  // namespace spinn
