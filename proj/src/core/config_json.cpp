#include "core/config_json.hpp"

namespace spinn {

using nlohmann::json;

namespace {

double number_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) {
    throw Error(ErrorKind::argument, std::string("field '") + key + "' must be a number");
  }
  return j.at(key).get<double>();
}

int int_or(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) {
    throw Error(ErrorKind::argument, std::string("field '") + key + "' must be an integer");
  }
  return j.at(key).get<int>();
}

std::uint64_t required_seed(const json& j) {
  if (!j.contains("seed")) {
    throw Error(ErrorKind::argument, "a 'seed' field is required");
  }
  if (!j.at("seed").is_number_integer() && !j.at("seed").is_number_unsigned()) {
    throw Error(ErrorKind::argument, "'seed' must be an integer");
  }
  return j.at("seed").get<std::uint64_t>();
}

}  // namespace

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::format, std::string("invalid JSON: ") + e.what());
  }
}

std::string task_to_name(Task task) {
  return task == Task::regression ? "regression" : "classification";
}

Task task_from_name(const std::string& name) {
  if (name == "regression") return Task::regression;
  if (name == "classification") return Task::classification;
  throw Error(ErrorKind::argument, "unknown task '" + name + "'");
}

std::string activation_to_name(Activation activation) {
  return activation == Activation::tanh ? "tanh" : "sigmoid";
}

Activation activation_from_name(const std::string& name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "sigmoid") return Activation::sigmoid;
  throw Error(ErrorKind::argument, "unknown activation '" + name + "'");
}

std::string scenario_kind_to_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::teacher_net: return "teacher";
    case ScenarioKind::additive_univariate: return "additive";
    case ScenarioKind::complex_multivariate: return "complex";
    case ScenarioKind::highdim_additive_multivariate: return "highdim";
  }
  throw Error(ErrorKind::argument, "unknown scenario kind");
}

ScenarioKind scenario_kind_from_name(const std::string& name) {
  if (name == "teacher") return ScenarioKind::teacher_net;
  if (name == "additive") return ScenarioKind::additive_univariate;
  if (name == "complex") return ScenarioKind::complex_multivariate;
  if (name == "highdim") return ScenarioKind::highdim_additive_multivariate;
  throw Error(ErrorKind::argument, "unknown scenario '" + name + "'");
}

std::string rate_axis_to_name(RateAxis axis) {
  switch (axis) {
    case RateAxis::n_obs: return "n";
    case RateAxis::n_features: return "p";
    case RateAxis::hidden_nodes: return "m1";
  }
  throw Error(ErrorKind::argument, "unknown rate axis");
}

RateAxis rate_axis_from_name(const std::string& name) {
  if (name == "n") return RateAxis::n_obs;
  if (name == "p") return RateAxis::n_features;
  if (name == "m1") return RateAxis::hidden_nodes;
  throw Error(ErrorKind::argument, "unknown axis '" + name + "', expected n, p, or m1");
}

NetworkArchitecture architecture_from_json(const json& j, int p, Task task) {
  if (!j.contains("hidden") || !j.at("hidden").is_array() || j.at("hidden").empty()) {
    throw Error(ErrorKind::argument, "architecture needs a non-empty 'hidden' width list");
  }
  const auto hidden = j.at("hidden").get<std::vector<int>>();
  const Activation activation =
      j.contains("activation")
          ? activation_from_name(j.at("activation").get<std::string>())
          : Activation::tanh;
  return make_architecture(p, hidden, task, activation);
}

json architecture_to_json(const NetworkArchitecture& arch) {
  std::vector<int> hidden(arch.layer_widths.begin() + 1, arch.layer_widths.end() - 1);
  return json{{"hidden", hidden},
              {"activation", activation_to_name(arch.activation)}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig config;
  config.seed = required_seed(j);
  config.gamma_init = number_or(j, "gamma_init", config.gamma_init);
  config.shrink = number_or(j, "shrink", config.shrink);
  config.line_search_t = number_or(j, "line_search_t", config.line_search_t);
  config.max_iters = int_or(j, "max_iters", config.max_iters);
  config.rel_tol = number_or(j, "rel_tol", config.rel_tol);
  config.max_backtracks = int_or(j, "max_backtracks", config.max_backtracks);
  config.n_restarts = int_or(j, "n_restarts", config.n_restarts);
  config.init_scale = number_or(j, "init_scale", config.init_scale);
  config.validate();
  return config;
}

json train_config_to_json(const TrainConfig& config) {
  return json{{"seed", config.seed},
              {"gamma_init", config.gamma_init},
              {"shrink", config.shrink},
              {"line_search_t", config.line_search_t},
              {"max_iters", config.max_iters},
              {"rel_tol", config.rel_tol},
              {"max_backtracks", config.max_backtracks},
              {"n_restarts", config.n_restarts},
              {"init_scale", config.init_scale}};
}

PenaltyConfig penalty_from_json(const json& j) {
  PenaltyConfig penalty;
  penalty.lambda0 = number_or(j, "lambda0", penalty.lambda0);
  penalty.lambda = number_or(j, "lambda", penalty.lambda);
  penalty.alpha = number_or(j, "alpha", penalty.alpha);
  penalty.validate();
  return penalty;
}

json penalty_to_json(const PenaltyConfig& penalty) {
  return json{{"lambda0", penalty.lambda0},
              {"lambda", penalty.lambda},
              {"alpha", penalty.alpha}};
}

ScenarioSpec scenario_from_json(const json& j) {
  ScenarioSpec spec;
  if (!j.contains("scenario")) {
    throw Error(ErrorKind::argument, "a 'scenario' field is required");
  }
  spec.kind = scenario_kind_from_name(j.at("scenario").get<std::string>());
  spec.p = int_or(j, "p", spec.p);
  spec.n_train = int_or(j, "n_train", spec.n_train);
  spec.n_test = int_or(j, "n_test", spec.n_test);
  spec.snr = number_or(j, "snr", spec.snr);
  spec.seed = required_seed(j);
  spec.validate();
  return spec;
}

json scenario_to_json(const ScenarioSpec& spec) {
  return json{{"scenario", scenario_kind_to_name(spec.kind)},
              {"p", spec.p},
              {"n_train", spec.n_train},
              {"n_test", spec.n_test},
              {"snr", spec.snr},
              {"seed", spec.seed}};
}

HyperGrid hyper_grid_from_json(const json& j, const Dataset& data, Task task,
                               const TrainConfig& config) {
  HyperGrid grid;
  grid.lambda0 = number_or(j, "lambda0", grid.lambda0);
  if (j.contains("alphas")) {
    grid.alphas = j.at("alphas").get<std::vector<double>>();
  } else {
    grid.alphas = {0.0, 0.25, 0.5, 0.75, 1.0};
  }
  if (j.contains("architectures")) {
    for (const json& a : j.at("architectures")) {
      grid.architectures.push_back(
          architecture_from_json(a, static_cast<int>(data.p()), task));
    }
  } else {
    grid.architectures =
        default_architecture_grid(static_cast<int>(data.p()), task);
  }
  if (j.contains("lambdas")) {
    grid.lambdas = j.at("lambdas").get<std::vector<double>>();
  } else {
    const double ref_alpha = grid.alphas[grid.alphas.size() / 2];
    grid.lambdas = default_lambda_grid(data, grid.architectures.front(),
                                       grid.lambda0, ref_alpha, config);
  }
  grid.validate();
  return grid;
}

json hyper_grid_to_json(const HyperGrid& grid) {
  json archs = json::array();
  for (const auto& arch : grid.architectures) {
    archs.push_back(architecture_to_json(arch));
  }
  return json{{"lambdas", grid.lambdas},
              {"alphas", grid.alphas},
              {"lambda0", grid.lambda0},
              {"architectures", std::move(archs)}};
}

json fit_metrics_json(const FitResult& fit) {
  return json{{"final_objective", fit.final_objective()},
              {"n_iters", fit.n_iters},
              {"converged", fit.converged},
              {"objective_trace", fit.objective_trace},
              {"selected_features", fit.selected_features},
              {"n_selected", static_cast<int>(fit.selected_features.size())},
              {"n_active_hidden", fit.n_active_hidden},
              {"restart_objectives", fit.restart_objectives}};
}

json cv_report_to_json(const CVReport& report, const HyperGrid& grid) {
  json cells = json::array();
  for (const auto& cell : report.cells) {
    const auto& arch = grid.architectures[static_cast<std::size_t>(cell.arch_index)];
    json c{{"lambda", cell.lambda},
           {"alpha", cell.alpha},
           {"architecture", arch.layer_widths},
           {"failed", cell.failed},
           {"fold_losses", cell.fold_losses}};
    if (cell.failed) {
      c["mean_loss"] = nullptr;
      c["se"] = nullptr;
    } else {
      c["mean_loss"] = cell.mean_loss;
      c["se"] = cell.se;
    }
    cells.push_back(std::move(c));
  }
  const CVCell& best = report.cells[static_cast<std::size_t>(report.best_cell)];
  return json{{"k", report.k},
              {"cells", std::move(cells)},
              {"best",
               {{"lambda", best.lambda},
                {"alpha", best.alpha},
                {"architecture", report.best_arch.layer_widths},
                {"mean_loss", best.mean_loss},
                {"se", best.se}}},
              {"refit", fit_metrics_json(report.refit)},
              {"grid", hyper_grid_to_json(grid)}};
}

json rate_result_to_json(const RateExperimentResult& result) {
  json points = json::array();
  for (const auto& pt : result.points) {
    points.push_back(json{{"grid_value", pt.grid_value},
                          {"mean_excess", pt.mean_excess},
                          {"se_excess", pt.se_excess},
                          {"mean_mass", pt.mean_mass},
                          {"se_mass", pt.se_mass}});
  }
  const auto number_or_null = [](double v) -> json {
    return std::isfinite(v) ? json(v) : json(nullptr);
  };
  json slopes{{"degenerate", result.slopes.degenerate}};
  switch (result.axis) {
    case RateAxis::n_obs:
      slopes["excess_slope"] = number_or_null(result.slopes.excess_slope);
      slopes["excess_intercept"] = number_or_null(result.slopes.excess_intercept);
      slopes["mass_slope"] = number_or_null(result.slopes.mass_slope);
      slopes["mass_intercept"] = number_or_null(result.slopes.mass_intercept);
      break;
    case RateAxis::n_features:
      slopes["excess_p_coef"] = number_or_null(result.slopes.excess_p_coef);
      slopes["excess_logp_coef"] = number_or_null(result.slopes.excess_logp_coef);
      slopes["mass_p_coef"] = number_or_null(result.slopes.mass_p_coef);
      slopes["mass_sqrtlogp_coef"] = number_or_null(result.slopes.mass_sqrtlogp_coef);
      break;
    case RateAxis::hidden_nodes:
      slopes["excess_max_min_ratio"] =
          number_or_null(result.slopes.excess_max_min_ratio);
      break;
  }
  return json{{"axis", rate_axis_to_name(result.axis)},
              {"replicates", result.replicates},
              {"points", std::move(points)},
              {"slopes", std::move(slopes)}};
}

json sweep_result_to_json(const std::vector<SweepCell>& cells) {
  json rows = json::array();
  for (const auto& cell : cells) {
    rows.push_back(json{{"lambda_lasso", cell.lambda_lasso},
                        {"lambda_group", cell.lambda_group},
                        {"mse", cell.mse},
                        {"relevant_share", cell.relevant_share},
                        {"irrelevant_share", cell.irrelevant_share},
                        {"empty", cell.empty},
                        {"n_selected", cell.n_selected}});
  }
  return json{{"cells", std::move(rows)}};
}

json scenario_meta_json(const ScenarioData& data) {
  json meta = scenario_to_json(data.spec);
  meta["sigma"] = data.sigma;
  meta["truth_sd"] = scenario_truth_sd(data.spec.kind);
  meta["relevant_features"] = relevant_set();
  return meta;
}

}  // namespace spinn
