#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "core/common.hpp"

namespace spinn {

enum class Task { regression, classification };
enum class Activation { tanh, sigmoid };

/// Predictions feeding a logistic loss are kept this far inside (0, 1).
inline constexpr double kProbClamp = 1e-12;

/// Layer widths [m_0 = p, m_1, ..., m_L, m_{L+1} = 1] plus task and
/// activation. The output width is always 1.
struct NetworkArchitecture {
  std::vector<int> layer_widths;
  Task task = Task::regression;
  Activation activation = Activation::tanh;

  int input_dim() const { return layer_widths.front(); }
  int n_hidden_layers() const { return static_cast<int>(layer_widths.size()) - 2; }
  int n_weight_layers() const { return static_cast<int>(layer_widths.size()) - 1; }
  long total_params() const;
  void validate() const;

  bool operator==(const NetworkArchitecture&) const = default;
};

NetworkArchitecture make_architecture(int p, const std::vector<int>& hidden,
                                      Task task = Task::regression,
                                      Activation activation = Activation::tanh);

/// Weight matrices and intercept vectors for every layer. weights[a] has
/// shape m_{a+1} x m_a in 0-based storage, i.e. weights[0] is the first
/// layer matrix whose columns correspond to input features.
struct NetworkParameters {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> intercepts;

  static NetworkParameters zero(const NetworkArchitecture& arch);

  void check_shapes(const NetworkArchitecture& arch) const;
  long size() const;

  double squared_distance(const NetworkParameters& other) const;
  bool all_finite() const;
};

using Gradient = NetworkParameters;

struct Dataset {
  Eigen::MatrixXd features;   // n x p, rows are observations
  Eigen::VectorXd responses;  // length n
  Task task = Task::regression;

  long n() const { return features.rows(); }
  long p() const { return features.cols(); }
  void validate() const;
};

double forward(const NetworkParameters& params, const NetworkArchitecture& arch,
               const Eigen::Ref<const Eigen::VectorXd>& x);

/// One prediction per row of X.
Eigen::VectorXd forward_batch(const NetworkParameters& params,
                              const NetworkArchitecture& arch,
                              const Eigen::Ref<const Eigen::MatrixXd>& X);

/// Mean training loss plus the ridge term on upper-layer weights:
/// (1/n) sum l(y_i, f(x_i)) + lambda0 * sum_{a>=2} |theta_a|_F^2.
/// The first-layer weights and all intercepts carry no ridge.
double smooth_loss(const NetworkParameters& params,
                   const NetworkArchitecture& arch, const Dataset& data,
                   double lambda0);

/// Exact gradient of smooth_loss via backpropagation.
Gradient smooth_loss_gradient(const NetworkParameters& params,
                              const NetworkArchitecture& arch,
                              const Dataset& data, double lambda0);

}  // namespace spinn
