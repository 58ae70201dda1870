#pragma once

#include <Eigen/Dense>

#include "core/network.hpp"

namespace spinn {

struct PenaltyConfig {
  double lambda0 = 0.001;  // ridge weight on upper-layer weights
  double lambda = 0.0;     // sparse group lasso weight on first-layer columns
  double alpha = 0.5;      // 0 = pure lasso, 1 = pure group lasso

  void validate() const;
};

/// Omega_alpha(v) = (1 - alpha) * |v|_1 + alpha * |v|_2.
double omega_alpha(const Eigen::Ref<const Eigen::VectorXd>& v, double alpha);

/// Componentwise sign(z_j) * (|z_j| - c)_+. Shrunk entries are exactly 0.
Eigen::VectorXd soft_threshold(const Eigen::Ref<const Eigen::VectorXd>& z,
                               double c);

/// (1 - c / |v|_2)_+ * v, with the zero vector returned whenever
/// |v|_2 <= c (in particular at v = 0).
Eigen::VectorXd group_soft_scale(const Eigen::Ref<const Eigen::VectorXd>& v,
                                 double c);

/// Proximal map of step * lambda * sum_j Omega_alpha(theta_{.j}):
/// soft-threshold every entry at step*lambda*(1-alpha), then soft-scale each
/// column at step*lambda*alpha. Zeroed columns are bit-exact zeros.
Eigen::MatrixXd sgl_prox(const Eigen::Ref<const Eigen::MatrixXd>& theta1,
                         double step, double lambda, double alpha);

/// lambda * sum over columns of Omega_alpha.
double sgl_penalty(const Eigen::Ref<const Eigen::MatrixXd>& theta1,
                   double lambda, double alpha);

/// smooth_loss plus the sparse group lasso penalty on the first layer.
double full_objective(const NetworkParameters& params,
                      const NetworkArchitecture& arch, const Dataset& data,
                      const PenaltyConfig& penalty);

}  // namespace spinn
