#pragma once

#include <cstdint>
#include <vector>

#include "core/penalty.hpp"

namespace spinn {

struct TrainConfig {
  double gamma_init = 1.0;      // step size each outer iteration starts from
  double shrink = 0.5;          // step multiplier on line-search rejection
  double line_search_t = 0.1;   // descent margin coefficient
  int max_iters = 5000;
  double rel_tol = 1e-6;        // stop when the relative objective decrease falls below
  int max_backtracks = 50;
  int n_restarts = 3;
  std::uint64_t seed = 0;
  double init_scale = 0.5;      // layer weights start uniform on +-init_scale/sqrt(fan_in)

  void validate() const;
};

struct FitResult {
  NetworkArchitecture arch;
  NetworkParameters params;
  std::vector<double> objective_trace;  // accepted objectives, non-increasing
  int n_iters = 0;
  bool converged = false;
  double final_gamma = 0.0;             // step size of the last accepted iteration
  std::vector<int> selected_features;   // columns of theta_1 that are exactly nonzero
  int n_active_hidden = 0;              // first-layer rows with any nonzero weight
  std::vector<double> restart_objectives;

  double final_objective() const {
    return objective_trace.empty()
               ? std::numeric_limits<double>::quiet_NaN()
               : objective_trace.back();
  }
};

NetworkParameters random_init(const NetworkArchitecture& arch, double init_scale,
                              std::uint64_t seed);

/// One proximal gradient step at step size gamma: gradient step on all
/// parameters, then the sparse group lasso prox on the first layer.
NetworkParameters gist_step(const NetworkParameters& params,
                            const NetworkArchitecture& arch, const Dataset& data,
                            const PenaltyConfig& penalty, double gamma);

/// Same step with the gradient already computed, so backtracking does not
/// redo backpropagation.
NetworkParameters apply_gist_step(const NetworkParameters& params,
                                  const Gradient& grad,
                                  const PenaltyConfig& penalty, double gamma);

/// Accepts gamma iff obj_new <= obj_old - t * gamma * |new - old|^2.
bool line_search_accept(double obj_new, double obj_old,
                        const NetworkParameters& params_new,
                        const NetworkParameters& params_old, double gamma,
                        double t);

std::vector<int> exactly_nonzero_columns(const Eigen::MatrixXd& theta1);

FitResult fit(const NetworkArchitecture& arch, const Dataset& data,
              const PenaltyConfig& penalty, const TrainConfig& config);

}  // namespace spinn
