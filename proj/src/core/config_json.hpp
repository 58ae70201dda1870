#pragma once

#include <string>

#include <json.hpp>

#include "core/model_selection.hpp"
#include "core/simulation.hpp"

namespace spinn {

/// JSON <-> core-struct translation used by the C API. Every *_from_json
/// accepts missing optional fields and fills library defaults; seeds are
/// always required so runs are reproducible by construction.

nlohmann::json parse_json_text(const std::string& text);

std::string task_to_name(Task task);
Task task_from_name(const std::string& name);
std::string activation_to_name(Activation activation);
Activation activation_from_name(const std::string& name);
std::string scenario_kind_to_name(ScenarioKind kind);
ScenarioKind scenario_kind_from_name(const std::string& name);
std::string rate_axis_to_name(RateAxis axis);
RateAxis rate_axis_from_name(const std::string& name);

NetworkArchitecture architecture_from_json(const nlohmann::json& j, int p, Task task);
nlohmann::json architecture_to_json(const NetworkArchitecture& arch);

TrainConfig train_config_from_json(const nlohmann::json& j);
nlohmann::json train_config_to_json(const TrainConfig& config);

PenaltyConfig penalty_from_json(const nlohmann::json& j);
nlohmann::json penalty_to_json(const PenaltyConfig& penalty);

ScenarioSpec scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioSpec& spec);

/// Resolves the hyperparameter grid; when "lambdas" is absent the default
/// log-spaced grid is computed from the data.
HyperGrid hyper_grid_from_json(const nlohmann::json& j, const Dataset& data,
                               Task task, const TrainConfig& config);
nlohmann::json hyper_grid_to_json(const HyperGrid& grid);

nlohmann::json fit_metrics_json(const FitResult& fit);
nlohmann::json cv_report_to_json(const CVReport& report, const HyperGrid& grid);
nlohmann::json rate_result_to_json(const RateExperimentResult& result);
nlohmann::json sweep_result_to_json(const std::vector<SweepCell>& cells);
nlohmann::json scenario_meta_json(const ScenarioData& data);

}  // namespace spinn
