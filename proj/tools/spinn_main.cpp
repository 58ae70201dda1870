// spinn command-line interface. Everything goes through the C API in
// spinn/spinn.h; this translation unit only handles flags, config files and
// output layout.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinn/spinn.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

int exit_code_for(spinn_status status) {
  switch (status) {
    case SPINN_OK: return 0;
    case SPINN_ERR_ARGUMENT:
    case SPINN_ERR_FORMAT: return kExitValidation;
    case SPINN_ERR_NUMERIC: return kExitNumeric;
    case SPINN_ERR_IO: return kExitIo;
  }
  return kExitValidation;
}

[[noreturn]] void fail(int code, const std::string& message) {
  std::cerr << "spinn: " << message << "\n";
  std::exit(code);
}

void check(spinn_status status) {
  if (status != SPINN_OK) fail(exit_code_for(status), spinn_last_error());
}

std::string take_string(char* text) {
  std::string out = text ? text : "";
  spinn_string_free(text);
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(kExitIo, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(kExitValidation, path + ": " + e.what());
  }
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(kExitIo, "cannot write " + path.string());
  out << text;
  if (!out) fail(kExitIo, "failed while writing " + path.string());
}

void write_json_file(const fs::path& path, const json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

fs::path make_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(kExitIo, "cannot create output directory " + dir);
  return {dir};
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

spinn_task task_from_config(const json& doc) {
  const std::string name = doc.value("task", "regression");
  if (name == "regression") return SPINN_TASK_REGRESSION;
  if (name == "classification") return SPINN_TASK_CLASSIFICATION;
  fail(kExitValidation, "unknown task '" + name + "'");
}

std::string widths_label(const json& widths) {
  std::string label;
  for (const auto& w : widths) {
    if (!label.empty()) label += '-';
    label += std::to_string(w.get<int>());
  }
  return label;
}

struct ScenarioFlags {
  std::string scenario = "teacher";
  int p = 10;
  int n_train = 200;
  int n_test = 2000;
  double snr = 2.0;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;

  void add_options(CLI::App* cmd, bool seed_required = true) {
    cmd->add_option("--scenario", scenario,
                    "Scenario: teacher, additive, complex, highdim")
        ->capture_default_str();
    cmd->add_option("--p", p, "Number of features")->capture_default_str();
    cmd->add_option("--n", n_train, "Training observations")->capture_default_str();
    cmd->add_option("--n-test", n_test, "Test observations")->capture_default_str();
    cmd->add_option("--snr", snr, "Signal-to-noise ratio")->capture_default_str();
    seed_opt = cmd->add_option("--seed", seed, "Random seed");
    if (seed_required) seed_opt->required();
  }

  json to_json() const {
    return json{{"scenario", scenario}, {"p", p},     {"n_train", n_train},
                {"n_test", n_test},     {"snr", snr}, {"seed", seed}};
  }
};

struct TrainFlags {
  int max_iters = 2000;
  int n_restarts = 2;
  double gamma_init = 1.0;
  double rel_tol = 1e-6;
  double init_scale = 0.5;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--max-iters", max_iters, "Optimizer iteration cap")
        ->capture_default_str();
    cmd->add_option("--restarts", n_restarts, "Random restarts per fit")
        ->capture_default_str();
    cmd->add_option("--gamma-init", gamma_init, "Initial step size")
        ->capture_default_str();
    cmd->add_option("--rel-tol", rel_tol, "Relative objective tolerance")
        ->capture_default_str();
    cmd->add_option("--init-scale", init_scale, "Initialization scale")
        ->capture_default_str();
  }

  json to_json(std::uint64_t seed) const {
    return json{{"seed", seed},           {"max_iters", max_iters},
                {"n_restarts", n_restarts}, {"gamma_init", gamma_init},
                {"rel_tol", rel_tol},     {"init_scale", init_scale}};
  }
};

// ---- train ----

int cmd_train(const std::string& config_path) {
  const json doc = read_json_file(config_path);
  if (!doc.contains("data")) fail(kExitValidation, "config needs a 'data' path");
  if (!doc.contains("out_dir")) fail(kExitValidation, "config needs an 'out_dir'");
  const std::string data_path = doc.at("data").get<std::string>();
  const fs::path out_dir = make_out_dir(doc.at("out_dir").get<std::string>());

  spinn_dataset* data = nullptr;
  check(spinn_dataset_load_csv(data_path.c_str(), 1, task_from_config(doc), &data));

  spinn_model* model = nullptr;
  char* metrics_text = nullptr;
  const spinn_status status =
      spinn_train(data, doc.dump().c_str(), &model, &metrics_text);
  spinn_dataset_free(data);
  check(status);

  const json metrics = json::parse(take_string(metrics_text));
  check(spinn_model_save(model, (out_dir / "model.json").string().c_str()));
  spinn_model_free(model);

  write_json_file(out_dir / "metrics.json", metrics);
  json resolved = metrics.at("resolved_config");
  resolved["task"] = doc.value("task", "regression");
  resolved["data"] = data_path;
  resolved["out_dir"] = doc.at("out_dir").get<std::string>();
  write_json_file(out_dir / "config_resolved.json", resolved);

  std::cout << "final objective " << metrics.at("final_objective").get<double>()
            << ", " << metrics.at("n_selected").get<int>()
            << " features selected\n";
  std::cout << "wrote " << (out_dir / "model.json").string() << "\n";
  return 0;
}

// ---- predict ----

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path) {
  spinn_model* model = nullptr;
  check(spinn_model_load(model_path.c_str(), &model));

  spinn_dataset* data = nullptr;
  spinn_status status =
      spinn_dataset_load_csv(data_path.c_str(), 0, SPINN_TASK_REGRESSION, &data);
  if (status != SPINN_OK) {
    spinn_model_free(model);
    check(status);
  }
  int64_t n = 0, p = 0;
  check(spinn_dataset_dims(data, &n, &p));
  std::vector<double> preds(static_cast<std::size_t>(n));
  status = spinn_model_predict(model, data, preds.data());
  spinn_dataset_free(data);
  spinn_model_free(model);
  check(status);

  std::ofstream out(out_path);
  if (!out) fail(kExitIo, "cannot write " + out_path);
  out << "prediction\n";
  for (double v : preds) out << format_double(v) << "\n";
  if (!out) fail(kExitIo, "failed while writing " + out_path);
  std::cout << "wrote " << n << " predictions to " << out_path << "\n";
  return 0;
}

// ---- cv ----

int cmd_cv(const std::string& config_path) {
  const json doc = read_json_file(config_path);
  if (!doc.contains("data")) fail(kExitValidation, "config needs a 'data' path");
  if (!doc.contains("out_dir")) fail(kExitValidation, "config needs an 'out_dir'");
  const std::string data_path = doc.at("data").get<std::string>();
  const fs::path out_dir = make_out_dir(doc.at("out_dir").get<std::string>());

  spinn_dataset* data = nullptr;
  check(spinn_dataset_load_csv(data_path.c_str(), 1, task_from_config(doc), &data));

  spinn_model* model = nullptr;
  char* report_text = nullptr;
  const spinn_status status =
      spinn_cross_validate(data, doc.dump().c_str(), &model, &report_text);
  spinn_dataset_free(data);
  check(status);

  const json report = json::parse(take_string(report_text));
  check(spinn_model_save(model, (out_dir / "model.json").string().c_str()));
  spinn_model_free(model);

  write_json_file(out_dir / "cv_report.json", report);

  std::ostringstream table;
  table << "lambda,alpha,architecture,mean_loss,se,failed\n";
  for (const json& cell : report.at("cells")) {
    table << format_double(cell.at("lambda").get<double>()) << ','
          << format_double(cell.at("alpha").get<double>()) << ','
          << widths_label(cell.at("architecture")) << ',';
    if (cell.at("failed").get<bool>()) {
      table << "nan,nan,1\n";
    } else {
      table << format_double(cell.at("mean_loss").get<double>()) << ','
            << format_double(cell.at("se").get<double>()) << ",0\n";
    }
  }
  write_text_file(out_dir / "cv_report.csv", table.str());

  json resolved = report.at("resolved_config");
  resolved["task"] = doc.value("task", "regression");
  resolved["data"] = data_path;
  resolved["out_dir"] = doc.at("out_dir").get<std::string>();
  write_json_file(out_dir / "config_resolved.json", resolved);

  const json& best = report.at("best");
  std::cout << "best cell: lambda=" << best.at("lambda").get<double>()
            << " alpha=" << best.at("alpha").get<double>() << " architecture="
            << widths_label(best.at("architecture")) << "\n";
  std::cout << "wrote " << (out_dir / "cv_report.csv").string() << "\n";
  return 0;
}

// ---- simulate ----

int cmd_simulate(const ScenarioFlags& flags, const std::string& out) {
  const fs::path out_dir = make_out_dir(out);
  spinn_dataset* train = nullptr;
  spinn_dataset* test = nullptr;
  char* meta_text = nullptr;
  check(spinn_simulate(flags.to_json().dump().c_str(), &train, &test, &meta_text));

  const json meta = json::parse(take_string(meta_text));
  spinn_status status =
      spinn_dataset_save_csv(train, (out_dir / "train.csv").string().c_str(), 1);
  if (status == SPINN_OK) {
    status = spinn_dataset_save_csv(test, (out_dir / "test.csv").string().c_str(), 1);
  }
  spinn_dataset_free(train);
  spinn_dataset_free(test);
  check(status);

  write_json_file(out_dir / "meta.json", meta);
  write_json_file(out_dir / "config_resolved.json", flags.to_json());
  std::cout << "wrote " << (out_dir / "train.csv").string() << " and test.csv"
            << " (sigma=" << meta.at("sigma").get<double>() << ")\n";
  return 0;
}

// ---- rates ----

struct InjectedTable {
  std::vector<double> grid, excess, mass;
};

InjectedTable read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(kExitIo, "cannot open " + path);
  InjectedTable table;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string token;
    std::vector<double> values;
    bool numeric = true;
    while (std::getline(row, token, ',')) {
      char* end = nullptr;
      const double v = std::strtod(token.c_str(), &end);
      if (end == token.c_str()) {
        numeric = false;
        break;
      }
      values.push_back(v);
    }
    if (!numeric) {
      if (line_no == 1) continue;  // header
      fail(kExitValidation, path + ": non-numeric value on line " + std::to_string(line_no));
    }
    if (values.size() < 2) {
      fail(kExitValidation, path + ": expected columns grid,excess[,mass]");
    }
    table.grid.push_back(values[0]);
    table.excess.push_back(values[1]);
    table.mass.push_back(values.size() > 2 ? values[2] : 0.0);
  }
  if (table.grid.empty()) fail(kExitValidation, path + ": no rows");
  return table;
}

void write_rate_outputs(const fs::path& out_dir, const json& result) {
  std::ostringstream table;
  table << "grid_value,mean_excess,se_excess,mean_mass,se_mass\n";
  for (const json& pt : result.at("points")) {
    table << format_double(pt.at("grid_value").get<double>()) << ','
          << format_double(pt.at("mean_excess").get<double>()) << ','
          << format_double(pt.at("se_excess").get<double>()) << ','
          << format_double(pt.at("mean_mass").get<double>()) << ','
          << format_double(pt.at("se_mass").get<double>()) << "\n";
  }
  write_text_file(out_dir / "points.csv", table.str());
  write_json_file(out_dir / "summary.json", result);
}

int cmd_rates(const std::string& axis, const std::vector<double>& grid,
              int replicates, const ScenarioFlags& scenario,
              const TrainFlags& train, double lambda, double alpha,
              double lambda0, const std::string& from_table,
              const std::string& out) {
  const fs::path out_dir = make_out_dir(out);

  if (!from_table.empty()) {
    const InjectedTable table = read_table(from_table);
    char* result_text = nullptr;
    check(spinn_rate_slopes_from_table(
        axis.c_str(), table.grid.data(), table.excess.data(), table.mass.data(),
        static_cast<int64_t>(table.grid.size()), &result_text));
    const json result = json::parse(take_string(result_text));
    write_rate_outputs(out_dir, result);
    std::cout << "slopes written to " << (out_dir / "summary.json").string() << "\n";
    return 0;
  }

  if (grid.empty()) fail(kExitValidation, "--grid is required");
  json config{{"axis", axis},
              {"grid", grid},
              {"replicates", replicates},
              {"scenario", scenario.to_json()},
              {"penalty", {{"lambda", lambda}, {"alpha", alpha}, {"lambda0", lambda0}}},
              {"train", train.to_json(scenario.seed)}};
  char* result_text = nullptr;
  check(spinn_rate_experiment(config.dump().c_str(), &result_text));
  const json result = json::parse(take_string(result_text));
  write_rate_outputs(out_dir, result);
  write_json_file(out_dir / "config_resolved.json", result.at("resolved_config"));

  const json& slopes = result.at("slopes");
  if (axis == "n" && !slopes.at("degenerate").get<bool>()) {
    std::cout << "excess-loss slope " << slopes.at("excess_slope").get<double>()
              << "\n";
  }
  std::cout << "wrote " << (out_dir / "points.csv").string() << "\n";
  return 0;
}

// ---- sweep ----

int cmd_sweep(const std::vector<double>& lasso_grid,
              const std::vector<double>& group_grid,
              const ScenarioFlags& scenario, const TrainFlags& train,
              double lambda0, const std::string& out) {
  const fs::path out_dir = make_out_dir(out);
  json config{{"lasso_weights", lasso_grid},
              {"group_weights", group_grid},
              {"lambda0", lambda0},
              {"scenario", scenario.to_json()},
              {"train", train.to_json(scenario.seed)}};
  char* result_text = nullptr;
  check(spinn_alpha_sweep(config.dump().c_str(), &result_text));
  const json result = json::parse(take_string(result_text));

  std::ostringstream table;
  table << "lambda_lasso,lambda_group,mse,relevant_share,irrelevant_share,empty,n_selected\n";
  for (const json& cell : result.at("cells")) {
    table << format_double(cell.at("lambda_lasso").get<double>()) << ','
          << format_double(cell.at("lambda_group").get<double>()) << ','
          << format_double(cell.at("mse").get<double>()) << ','
          << format_double(cell.at("relevant_share").get<double>()) << ','
          << format_double(cell.at("irrelevant_share").get<double>()) << ','
          << (cell.at("empty").get<bool>() ? 1 : 0) << ','
          << cell.at("n_selected").get<int>() << "\n";
  }
  write_text_file(out_dir / "sweep.csv", table.str());
  write_json_file(out_dir / "sweep.json", result);
  write_json_file(out_dir / "config_resolved.json", result.at("resolved_config"));
  std::cout << "wrote " << (out_dir / "sweep.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spinn: sparse-input neural networks"};
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "Fit a model from a config file");
  std::string train_config;
  train_cmd->add_option("--config", train_config, "JSON run config")->required();

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Predict with a saved model");
  std::string predict_model, predict_data, predict_out;
  predict_cmd->add_option("--model", predict_model, "Model file")->required();
  predict_cmd->add_option("--data", predict_data, "Feature CSV")->required();
  predict_cmd->add_option("--out", predict_out, "Output CSV")->required();

  // cv
  auto* cv_cmd = app.add_subcommand("cv", "Cross-validate a hyperparameter grid");
  std::string cv_config;
  cv_cmd->add_option("--config", cv_config, "JSON cv config")->required();

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Generate synthetic scenario data");
  ScenarioFlags sim_flags;
  std::string sim_out;
  sim_flags.add_options(sim_cmd);
  sim_cmd->add_option("--out", sim_out, "Output directory")->required();

  // rates
  auto* rates_cmd = app.add_subcommand("rates", "Convergence-rate experiment");
  ScenarioFlags rates_scenario;
  TrainFlags rates_train;
  std::string rates_axis = "n";
  std::vector<double> rates_grid;
  int rates_replicates = 5;
  double rates_lambda = 0.15, rates_alpha = 0.5, rates_lambda0 = 1e-4;
  std::string rates_from_table, rates_out;
  rates_cmd->add_option("--axis", rates_axis, "Axis: n, p, or m1")
      ->capture_default_str();
  rates_cmd->add_option("--grid", rates_grid, "Comma-separated grid values")
      ->delimiter(',');
  rates_cmd->add_option("--replicates", rates_replicates, "Replicates per point")
      ->capture_default_str();
  rates_scenario.add_options(rates_cmd, /*seed_required=*/false);
  rates_train.add_options(rates_cmd);
  rates_cmd->add_option("--lambda", rates_lambda, "Penalty at the base grid point")
      ->capture_default_str();
  rates_cmd->add_option("--alpha", rates_alpha, "Lasso/group-lasso balance")
      ->capture_default_str();
  rates_cmd->add_option("--lambda0", rates_lambda0, "Ridge weight")
      ->capture_default_str();
  rates_cmd->add_option("--from-table", rates_from_table,
                        "Compute slopes from an existing points table instead of fitting");
  rates_cmd->add_option("--out", rates_out, "Output directory")->required();

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Lasso vs group-lasso weight sweep");
  ScenarioFlags sweep_scenario;
  sweep_scenario.scenario = "complex";
  sweep_scenario.p = 50;
  sweep_scenario.n_train = 250;
  TrainFlags sweep_train;
  std::vector<double> sweep_lasso, sweep_group;
  double sweep_lambda0 = 0.001;
  std::string sweep_out;
  sweep_cmd->add_option("--lasso-grid", sweep_lasso, "Lasso weight values")
      ->delimiter(',')
      ->required();
  sweep_cmd->add_option("--group-grid", sweep_group, "Group-lasso weight values")
      ->delimiter(',')
      ->required();
  sweep_scenario.add_options(sweep_cmd);
  sweep_train.add_options(sweep_cmd);
  sweep_cmd->add_option("--lambda0", sweep_lambda0, "Ridge weight")
      ->capture_default_str();
  sweep_cmd->add_option("--out", sweep_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  if (*train_cmd) return cmd_train(train_config);
  if (*predict_cmd) return cmd_predict(predict_model, predict_data, predict_out);
  if (*cv_cmd) return cmd_cv(cv_config);
  if (*sim_cmd) return cmd_simulate(sim_flags, sim_out);
  if (*rates_cmd) {
    if (rates_from_table.empty() && rates_scenario.seed_opt->count() == 0) {
      fail(kExitValidation, "--seed is required when running rate fits");
    }
    return cmd_rates(rates_axis, rates_grid, rates_replicates, rates_scenario,
                     rates_train, rates_lambda, rates_alpha, rates_lambda0,
                     rates_from_table, rates_out);
  }
  if (*sweep_cmd) {
    return cmd_sweep(sweep_lasso, sweep_group, sweep_scenario, sweep_train,
                     sweep_lambda0, sweep_out);
  }
  return kExitValidation;
}
