#include "spinn/spinn.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "core/config_json.hpp"
#include "core/csv.hpp"
#include "core/model_io.hpp"

using nlohmann::json;

struct spinn_dataset {
  spinn::Dataset data;
};

struct spinn_model {
  spinn::ModelFile model;
};

namespace {

thread_local std::string g_last_error;

spinn_status status_from(spinn::ErrorKind kind) {
  switch (kind) {
    case spinn::ErrorKind::argument: return SPINN_ERR_ARGUMENT;
    case spinn::ErrorKind::numeric: return SPINN_ERR_NUMERIC;
    case spinn::ErrorKind::io: return SPINN_ERR_IO;
    case spinn::ErrorKind::format: return SPINN_ERR_FORMAT;
  }
  return SPINN_ERR_ARGUMENT;
}

template <typename Fn>
spinn_status guarded(Fn&& fn) {
  try {
    fn();
    return SPINN_OK;
  } catch (const spinn::Error& e) {
    g_last_error = e.what();
    return status_from(e.kind());
  } catch (const json::exception& e) {
    g_last_error = e.what();
    return SPINN_ERR_FORMAT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SPINN_ERR_ARGUMENT;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw spinn::Error(spinn::ErrorKind::argument, what);
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

spinn::Task task_from(spinn_task task) {
  return task == SPINN_TASK_CLASSIFICATION ? spinn::Task::classification
                                           : spinn::Task::regression;
}

json parse_config(const char* config_json) {
  require(config_json != nullptr, "config_json is null");
  return spinn::parse_json_text(config_json);
}

struct TrainParts {
  spinn::NetworkArchitecture arch;
  spinn::PenaltyConfig penalty;
  spinn::TrainConfig config;
};

TrainParts train_parts(const json& doc, const spinn::Dataset& data) {
  TrainParts parts;
  require(doc.contains("architecture"), "config needs an 'architecture' section");
  require(doc.contains("train"), "config needs a 'train' section");
  parts.config = spinn::train_config_from_json(doc.at("train"));
  parts.arch = spinn::architecture_from_json(
      doc.at("architecture"), static_cast<int>(data.p()), data.task);
  parts.penalty = doc.contains("penalty")
                      ? spinn::penalty_from_json(doc.at("penalty"))
                      : spinn::PenaltyConfig{};
  return parts;
}

json resolved_train_config(const TrainParts& parts) {
  return json{{"architecture", spinn::architecture_to_json(parts.arch)},
              {"penalty", spinn::penalty_to_json(parts.penalty)},
              {"train", spinn::train_config_to_json(parts.config)}};
}

}  // namespace

extern "C" {

const char* spinn_version(void) { return "0.1.0"; }

const char* spinn_last_error(void) { return g_last_error.c_str(); }

spinn_status spinn_dataset_create(int64_t n_rows, int64_t n_features,
                                  const double* features,
                                  const double* responses, spinn_task task,
                                  spinn_dataset** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    require(features != nullptr, "features is null");
    require(n_rows >= 1 && n_features >= 1, "dataset dimensions must be positive");
    auto handle = std::make_unique<spinn_dataset>();
    handle->data.task = task_from(task);
    handle->data.features.resize(n_rows, n_features);
    for (int64_t i = 0; i < n_rows; ++i) {
      for (int64_t j = 0; j < n_features; ++j) {
        handle->data.features(i, j) = features[i * n_features + j];
      }
    }
    if (responses) {
      handle->data.responses =
          Eigen::Map<const Eigen::VectorXd>(responses, n_rows);
      handle->data.validate();
    } else {
      handle->data.responses = Eigen::VectorXd::Zero(n_rows);
    }
    *out = handle.release();
  });
}

spinn_status spinn_dataset_load_csv(const char* path, int has_response,
                                    spinn_task task, spinn_dataset** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    require(path != nullptr, "path is null");
    auto handle = std::make_unique<spinn_dataset>();
    handle->data = spinn::dataset_from_table(spinn::read_csv(path),
                                             has_response != 0, task_from(task));
    *out = handle.release();
  });
}

spinn_status spinn_dataset_save_csv(const spinn_dataset* data, const char* path,
                                    int with_response) {
  return guarded([&] {
    require(data != nullptr, "dataset is null");
    require(path != nullptr, "path is null");
    spinn::write_dataset_csv(path, data->data, with_response != 0);
  });
}

spinn_status spinn_dataset_dims(const spinn_dataset* data, int64_t* n_rows,
                                int64_t* n_features) {
  return guarded([&] {
    require(data != nullptr, "dataset is null");
    if (n_rows) *n_rows = data->data.n();
    if (n_features) *n_features = data->data.p();
  });
}

void spinn_dataset_free(spinn_dataset* data) { delete data; }

spinn_status spinn_train(const spinn_dataset* data, const char* config_json,
                         spinn_model** out_model, char** out_metrics_json) {
  return guarded([&] {
    require(data != nullptr, "dataset is null");
    require(out_model != nullptr, "out_model is null");
    const json doc = parse_config(config_json);
    const TrainParts parts = train_parts(doc, data->data);
    const spinn::FitResult result =
        spinn::fit(parts.arch, data->data, parts.penalty, parts.config);

    auto handle = std::make_unique<spinn_model>();
    handle->model = spinn::model_from_fit(result, parts.penalty, parts.config.seed);
    if (out_metrics_json) {
      json metrics = spinn::fit_metrics_json(result);
      metrics["resolved_config"] = resolved_train_config(parts);
      *out_metrics_json = copy_string(metrics.dump(2) + "\n");
    }
    *out_model = handle.release();
  });
}

spinn_status spinn_cross_validate(const spinn_dataset* data,
                                  const char* config_json,
                                  spinn_model** out_model,
                                  char** out_report_json) {
  return guarded([&] {
    require(data != nullptr, "dataset is null");
    require(out_model != nullptr, "out_model is null");
    const json doc = parse_config(config_json);
    require(doc.contains("train"), "config needs a 'train' section");
    const spinn::TrainConfig config =
        spinn::train_config_from_json(doc.at("train"));
    const int k = doc.contains("k") ? doc.at("k").get<int>() : 3;
    const spinn::HyperGrid grid = spinn::hyper_grid_from_json(
        doc.value("grid", json::object()), data->data, data->data.task, config);

    const spinn::CVReport report =
        spinn::cross_validate(data->data, grid, k, config);

    auto handle = std::make_unique<spinn_model>();
    handle->model = spinn::model_from_fit(report.refit, report.best_penalty,
                                          config.seed);
    if (out_report_json) {
      json out = spinn::cv_report_to_json(report, grid);
      out["resolved_config"] = json{
          {"k", k},
          {"grid", spinn::hyper_grid_to_json(grid)},
          {"train", spinn::train_config_to_json(config)}};
      *out_report_json = copy_string(out.dump(2) + "\n");
    }
    *out_model = handle.release();
  });
}

spinn_status spinn_model_save(const spinn_model* model, const char* path) {
  return guarded([&] {
    require(model != nullptr, "model is null");
    require(path != nullptr, "path is null");
    spinn::save_model(model->model, path);
  });
}

spinn_status spinn_model_load(const char* path, spinn_model** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    require(path != nullptr, "path is null");
    auto handle = std::make_unique<spinn_model>();
    handle->model = spinn::load_model(path);
    *out = handle.release();
  });
}

spinn_status spinn_model_num_features(const spinn_model* model,
                                      int64_t* n_features) {
  return guarded([&] {
    require(model != nullptr, "model is null");
    require(n_features != nullptr, "n_features is null");
    *n_features = model->model.arch.input_dim();
  });
}

spinn_status spinn_model_predict(const spinn_model* model,
                                 const spinn_dataset* data,
                                 double* out_predictions) {
  return guarded([&] {
    require(model != nullptr, "model is null");
    require(data != nullptr, "dataset is null");
    require(out_predictions != nullptr, "out_predictions is null");
    const Eigen::VectorXd preds = spinn::forward_batch(
        model->model.params, model->model.arch, data->data.features);
    Eigen::Map<Eigen::VectorXd>(out_predictions, preds.size()) = preds;
  });
}

spinn_status spinn_model_info_json(const spinn_model* model, char** out_json) {
  return guarded([&] {
    require(model != nullptr, "model is null");
    require(out_json != nullptr, "out_json is null");
    const spinn::ModelFile& m = model->model;
    json info{{"format_version", spinn::kModelFormatVersion},
              {"layer_widths", m.arch.layer_widths},
              {"task", spinn::task_to_name(m.arch.task)},
              {"activation", spinn::activation_to_name(m.arch.activation)},
              {"penalty", spinn::penalty_to_json(m.penalty)},
              {"training",
               {{"seed", m.meta.seed},
                {"n_iters", m.meta.n_iters},
                {"final_objective", m.meta.final_objective},
                {"converged", m.meta.converged}}},
              {"selected_features", m.selected_features}};
    *out_json = copy_string(info.dump(2) + "\n");
  });
}

void spinn_model_free(spinn_model* model) { delete model; }

spinn_status spinn_simulate(const char* scenario_json,
                            spinn_dataset** out_train, spinn_dataset** out_test,
                            char** out_meta_json) {
  return guarded([&] {
    require(out_train != nullptr, "out_train is null");
    require(out_test != nullptr, "out_test is null");
    const json doc = parse_config(scenario_json);
    const spinn::ScenarioSpec spec = spinn::scenario_from_json(doc);
    spinn::ScenarioData data = spinn::generate(spec);

    auto train = std::make_unique<spinn_dataset>();
    auto test = std::make_unique<spinn_dataset>();
    train->data = std::move(data.train);
    test->data = std::move(data.test);
    if (out_meta_json) {
      *out_meta_json = copy_string(spinn::scenario_meta_json(data).dump(2) + "\n");
    }
    *out_train = train.release();
    *out_test = test.release();
  });
}

spinn_status spinn_rate_experiment(const char* config_json,
                                   char** out_result_json) {
  return guarded([&] {
    require(out_result_json != nullptr, "out_result_json is null");
    const json doc = parse_config(config_json);
    require(doc.contains("axis"), "config needs an 'axis' field");
    require(doc.contains("grid"), "config needs a 'grid' list");
    require(doc.contains("scenario"), "config needs a 'scenario' section");
    require(doc.contains("train"), "config needs a 'train' section");
    const spinn::RateAxis axis =
        spinn::rate_axis_from_name(doc.at("axis").get<std::string>());
    const auto grid = doc.at("grid").get<std::vector<double>>();
    const int replicates =
        doc.contains("replicates") ? doc.at("replicates").get<int>() : 5;
    const spinn::ScenarioSpec base = spinn::scenario_from_json(doc.at("scenario"));
    const spinn::PenaltyConfig penalty =
        doc.contains("penalty") ? spinn::penalty_from_json(doc.at("penalty"))
                                : spinn::PenaltyConfig{};
    const spinn::TrainConfig config =
        spinn::train_config_from_json(doc.at("train"));

    const spinn::RateExperimentResult result =
        spinn::rate_experiment(axis, grid, base, penalty, config, replicates);
    json out = spinn::rate_result_to_json(result);
    out["resolved_config"] = json{{"axis", spinn::rate_axis_to_name(axis)},
                                  {"grid", grid},
                                  {"replicates", replicates},
                                  {"scenario", spinn::scenario_to_json(base)},
                                  {"penalty", spinn::penalty_to_json(penalty)},
                                  {"train", spinn::train_config_to_json(config)}};
    *out_result_json = copy_string(out.dump(2) + "\n");
  });
}

spinn_status spinn_rate_slopes_from_table(const char* axis,
                                          const double* grid_values,
                                          const double* mean_excess,
                                          const double* mean_mass,
                                          int64_t n_points,
                                          char** out_result_json) {
  return guarded([&] {
    require(out_result_json != nullptr, "out_result_json is null");
    require(axis != nullptr, "axis is null");
    require(grid_values != nullptr && mean_excess != nullptr, "table is null");
    require(n_points >= 1, "table is empty");
    spinn::RateExperimentResult result;
    result.axis = spinn::rate_axis_from_name(axis);
    result.replicates = 0;
    for (int64_t i = 0; i < n_points; ++i) {
      spinn::RatePoint pt;
      pt.grid_value = grid_values[i];
      pt.mean_excess = mean_excess[i];
      pt.mean_mass = mean_mass ? mean_mass[i] : 0.0;
      result.points.push_back(pt);
    }
    result.slopes = spinn::rate_slopes(result.axis, result.points);
    *out_result_json = copy_string(spinn::rate_result_to_json(result).dump(2) + "\n");
  });
}

spinn_status spinn_alpha_sweep(const char* config_json, char** out_result_json) {
  return guarded([&] {
    require(out_result_json != nullptr, "out_result_json is null");
    const json doc = parse_config(config_json);
    require(doc.contains("scenario"), "config needs a 'scenario' section");
    require(doc.contains("train"), "config needs a 'train' section");
    require(doc.contains("lasso_weights") && doc.contains("group_weights"),
            "config needs 'lasso_weights' and 'group_weights' lists");
    const spinn::ScenarioSpec spec = spinn::scenario_from_json(doc.at("scenario"));
    const spinn::TrainConfig config =
        spinn::train_config_from_json(doc.at("train"));
    const double lambda0 =
        doc.contains("lambda0") ? doc.at("lambda0").get<double>() : 0.001;
    const auto lasso = doc.at("lasso_weights").get<std::vector<double>>();
    const auto group = doc.at("group_weights").get<std::vector<double>>();
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(lasso.size() * group.size());
    for (double l1 : lasso) {
      for (double l2 : group) pairs.emplace_back(l1, l2);
    }
    const std::vector<spinn::SweepCell> cells =
        spinn::alpha_sweep(pairs, spec, config, lambda0);
    json out = spinn::sweep_result_to_json(cells);
    out["resolved_config"] = json{{"lasso_weights", lasso},
                                  {"group_weights", group},
                                  {"lambda0", lambda0},
                                  {"scenario", spinn::scenario_to_json(spec)},
                                  {"train", spinn::train_config_to_json(config)}};
    *out_result_json = copy_string(out.dump(2) + "\n");
  });
}

void spinn_string_free(char* text) { std::free(text); }

}  // extern "C"
