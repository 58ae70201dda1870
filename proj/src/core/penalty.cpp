#include "core/penalty.hpp"

#include <cmath>

namespace spinn {

void PenaltyConfig::validate() const {
  if (lambda0 < 0.0 || lambda < 0.0) {
    throw Error(ErrorKind::argument, "penalty weights must be nonnegative");
  }
  if (alpha < 0.0 || alpha > 1.0) {
    throw Error(ErrorKind::argument, "alpha must lie in [0, 1]");
  }
}

double omega_alpha(const Eigen::Ref<const Eigen::VectorXd>& v, double alpha) {
  return (1.0 - alpha) * v.lpNorm<1>() + alpha * v.norm();
}

namespace {

inline double soft(double z, double c) {
  const double a = std::abs(z) - c;
  if (a <= 0.0) return 0.0;
  return z > 0.0 ? a : -a;
}

}  // namespace

Eigen::VectorXd soft_threshold(const Eigen::Ref<const Eigen::VectorXd>& z,
                               double c) {
  if (c == 0.0) return z;
  return z.unaryExpr([c](double v) { return soft(v, c); });
}

Eigen::VectorXd group_soft_scale(const Eigen::Ref<const Eigen::VectorXd>& v,
                                 double c) {
  const double norm = v.norm();
  if (norm <= c) return Eigen::VectorXd::Zero(v.size());
  if (c == 0.0) return v;
  return (1.0 - c / norm) * v;
}

Eigen::MatrixXd sgl_prox(const Eigen::Ref<const Eigen::MatrixXd>& theta1,
                         double step, double lambda, double alpha) {
  if (step <= 0.0) throw Error(ErrorKind::argument, "prox step must be positive");
  if (lambda == 0.0) return theta1;
  const double entry_c = step * lambda * (1.0 - alpha);
  Eigen::MatrixXd out =
      entry_c == 0.0 ? theta1
                     : theta1.unaryExpr([entry_c](double v) { return soft(v, entry_c); });
  const double c = step * lambda * alpha;
  for (long j = 0; j < out.cols(); ++j) {
    const double norm = out.col(j).norm();
    if (norm <= c) {
      out.col(j).setZero();
    } else if (c > 0.0) {
      out.col(j) *= 1.0 - c / norm;
    }
  }
  return out;
}

double sgl_penalty(const Eigen::Ref<const Eigen::MatrixXd>& theta1,
                   double lambda, double alpha) {
  if (lambda == 0.0) return 0.0;
  double total = 0.0;
  for (long j = 0; j < theta1.cols(); ++j) {
    total += omega_alpha(theta1.col(j), alpha);
  }
  return lambda * total;
}

double full_objective(const NetworkParameters& params,
                      const NetworkArchitecture& arch, const Dataset& data,
                      const PenaltyConfig& penalty) {
  penalty.validate();
  return smooth_loss(params, arch, data, penalty.lambda0) +
         sgl_penalty(params.weights[0], penalty.lambda, penalty.alpha);
}

}  // namespace spinn
