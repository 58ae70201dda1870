#include "core/model_io.hpp"

#include <fstream>

#include <json.hpp>

namespace spinn {

namespace {

using nlohmann::json;

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (long i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (long i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (long j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<long>(i)) = arr[i].get<double>();
  return v;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  if (rows.empty()) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) {
      throw Error(ErrorKind::format, "ragged weight matrix in model file");
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<long>(i), static_cast<long>(j)) = rows[i][j].get<double>();
    }
  }
  return m;
}

std::string task_name(Task task) {
  return task == Task::regression ? "regression" : "classification";
}

Task task_from_name(const std::string& name) {
  if (name == "regression") return Task::regression;
  if (name == "classification") return Task::classification;
  throw Error(ErrorKind::format, "unknown task '" + name + "'");
}

std::string activation_name(Activation act) {
  return act == Activation::tanh ? "tanh" : "sigmoid";
}

Activation activation_from_name(const std::string& name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "sigmoid") return Activation::sigmoid;
  throw Error(ErrorKind::format, "unknown activation '" + name + "'");
}

}  // namespace

ModelFile model_from_fit(const FitResult& fit, const PenaltyConfig& penalty,
                         std::uint64_t seed) {
  ModelFile model;
  model.arch = fit.arch;
  model.params = fit.params;
  model.penalty = penalty;
  model.meta.seed = seed;
  model.meta.n_iters = fit.n_iters;
  model.meta.final_objective = fit.final_objective();
  model.meta.converged = fit.converged;
  model.selected_features = fit.selected_features;
  return model;
}

std::string model_to_json_text(const ModelFile& model) {
  model.params.check_shapes(model.arch);
  json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["architecture"] = {
      {"layer_widths", model.arch.layer_widths},
      {"task", task_name(model.arch.task)},
      {"activation", activation_name(model.arch.activation)},
  };
  json weights = json::array();
  json intercepts = json::array();
  for (std::size_t a = 0; a < model.params.weights.size(); ++a) {
    weights.push_back(matrix_to_json(model.params.weights[a]));
    intercepts.push_back(vector_to_json(model.params.intercepts[a]));
  }
  doc["parameters"] = {{"weights", std::move(weights)},
                       {"intercepts", std::move(intercepts)}};
  doc["penalty"] = {{"lambda0", model.penalty.lambda0},
                    {"lambda", model.penalty.lambda},
                    {"alpha", model.penalty.alpha}};
  doc["training"] = {{"seed", model.meta.seed},
                     {"n_iters", model.meta.n_iters},
                     {"final_objective", model.meta.final_objective},
                     {"converged", model.meta.converged}};
  doc["selected_features"] = model.selected_features;
  return doc.dump(2) + "\n";
}

void save_model(const ModelFile& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path);
  out << model_to_json_text(model);
  if (!out) throw Error(ErrorKind::io, "failed while writing " + path);
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::format, path + ": " + e.what());
  }
  try {
    const int version = doc.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw Error(ErrorKind::format,
                  path + ": unsupported model format version " +
                      std::to_string(version) + ", expected " +
                      std::to_string(kModelFormatVersion));
    }
    ModelFile model;
    const json& arch = doc.at("architecture");
    model.arch.layer_widths = arch.at("layer_widths").get<std::vector<int>>();
    model.arch.task = task_from_name(arch.at("task").get<std::string>());
    model.arch.activation =
        activation_from_name(arch.at("activation").get<std::string>());
    model.arch.validate();

    const json& params = doc.at("parameters");
    for (const json& w : params.at("weights")) {
      model.params.weights.push_back(matrix_from_json(w));
    }
    for (const json& t : params.at("intercepts")) {
      model.params.intercepts.push_back(vector_from_json(t));
    }
    model.params.check_shapes(model.arch);

    const json& penalty = doc.at("penalty");
    model.penalty.lambda0 = penalty.at("lambda0").get<double>();
    model.penalty.lambda = penalty.at("lambda").get<double>();
    model.penalty.alpha = penalty.at("alpha").get<double>();

    const json& training = doc.at("training");
    model.meta.seed = training.at("seed").get<std::uint64_t>();
    model.meta.n_iters = training.at("n_iters").get<int>();
    model.meta.final_objective = training.at("final_objective").get<double>();
    model.meta.converged = training.at("converged").get<bool>();

    model.selected_features =
        doc.at("selected_features").get<std::vector<int>>();
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::format, path + ": " + e.what());
  }
}

}  // namespace spinn
