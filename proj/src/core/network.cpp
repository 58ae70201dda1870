#include "core/network.hpp"

#include <cmath>
#include <sstream>

namespace spinn {

namespace {

void apply_activation(Eigen::MatrixXd& z, Activation activation) {
  if (activation == Activation::tanh) {
    // scalar std::tanh keeps forward passes bit-identical to definitional
    // evaluations of the same expressions
    z = z.unaryExpr([](double v) { return std::tanh(v); });
  } else {
    // numerically stable logistic
    z = z.unaryExpr([](double v) {
      if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
      const double e = std::exp(v);
      return e / (1.0 + e);
    });
  }
}

// derivative expressed through the activation value itself
Eigen::ArrayXXd activation_derivative(const Eigen::MatrixXd& activated,
                                      Activation activation) {
  if (activation == Activation::tanh) {
    return 1.0 - activated.array().square();
  }
  return activated.array() * (1.0 - activated.array());
}

double clamp_prob(double z) {
  return std::min(1.0 - kProbClamp, std::max(kProbClamp, z));
}

}  // namespace

long NetworkArchitecture::total_params() const {
  long q = 0;
  for (std::size_t a = 1; a < layer_widths.size(); ++a) {
    q += static_cast<long>(layer_widths[a]) * (layer_widths[a - 1] + 1);
  }
  return q;
}

void NetworkArchitecture::validate() const {
  if (layer_widths.size() < 3) {
    throw Error(ErrorKind::argument,
                "architecture needs at least one hidden layer");
  }
  if (layer_widths.back() != 1) {
    throw Error(ErrorKind::argument, "output width must be 1");
  }
  for (int w : layer_widths) {
    if (w < 1) throw Error(ErrorKind::argument, "layer widths must be positive");
  }
}

NetworkArchitecture make_architecture(int p, const std::vector<int>& hidden,
                                      Task task, Activation activation) {
  NetworkArchitecture arch;
  arch.layer_widths.reserve(hidden.size() + 2);
  arch.layer_widths.push_back(p);
  arch.layer_widths.insert(arch.layer_widths.end(), hidden.begin(), hidden.end());
  arch.layer_widths.push_back(1);
  arch.task = task;
  arch.activation = activation;
  arch.validate();
  return arch;
}

NetworkParameters NetworkParameters::zero(const NetworkArchitecture& arch) {
  NetworkParameters params;
  const int n_layers = arch.n_weight_layers();
  params.weights.reserve(n_layers);
  params.intercepts.reserve(n_layers);
  for (int a = 0; a < n_layers; ++a) {
    params.weights.emplace_back(Eigen::MatrixXd::Zero(arch.layer_widths[a + 1],
                                                      arch.layer_widths[a]));
    params.intercepts.emplace_back(Eigen::VectorXd::Zero(arch.layer_widths[a + 1]));
  }
  return params;
}

void NetworkParameters::check_shapes(const NetworkArchitecture& arch) const {
  const std::size_t n_layers = static_cast<std::size_t>(arch.n_weight_layers());
  if (weights.size() != n_layers || intercepts.size() != n_layers) {
    throw Error(ErrorKind::argument, "parameter layer count does not match architecture");
  }
  for (std::size_t a = 0; a < n_layers; ++a) {
    if (weights[a].rows() != arch.layer_widths[a + 1] ||
        weights[a].cols() != arch.layer_widths[a] ||
        intercepts[a].size() != arch.layer_widths[a + 1]) {
      std::ostringstream msg;
      msg << "parameter shape mismatch at layer " << (a + 1) << ": got "
          << weights[a].rows() << "x" << weights[a].cols() << ", expected "
          << arch.layer_widths[a + 1] << "x" << arch.layer_widths[a];
      throw Error(ErrorKind::argument, msg.str());
    }
  }
}

long NetworkParameters::size() const {
  long q = 0;
  for (std::size_t a = 0; a < weights.size(); ++a) {
    q += weights[a].size() + intercepts[a].size();
  }
  return q;
}

double NetworkParameters::squared_distance(const NetworkParameters& other) const {
  double d = 0.0;
  for (std::size_t a = 0; a < weights.size(); ++a) {
    d += (weights[a] - other.weights[a]).squaredNorm();
    d += (intercepts[a] - other.intercepts[a]).squaredNorm();
  }
  return d;
}

bool NetworkParameters::all_finite() const {
  for (std::size_t a = 0; a < weights.size(); ++a) {
    if (!weights[a].allFinite() || !intercepts[a].allFinite()) return false;
  }
  return true;
}

void Dataset::validate() const {
  if (features.rows() < 1 || features.cols() < 1) {
    throw Error(ErrorKind::argument, "dataset needs at least one row and one feature");
  }
  if (responses.size() != features.rows()) {
    throw Error(ErrorKind::argument, "response length does not match feature rows");
  }
  for (long i = 0; i < features.rows(); ++i) {
    for (long j = 0; j < features.cols(); ++j) {
      if (!std::isfinite(features(i, j))) {
        std::ostringstream msg;
        msg << "non-finite feature value at row " << i << " column " << j;
        throw Error(ErrorKind::argument, msg.str());
      }
    }
    if (!std::isfinite(responses(i))) {
      std::ostringstream msg;
      msg << "non-finite response at row " << i;
      throw Error(ErrorKind::argument, msg.str());
    }
    if (task == Task::classification && responses(i) != 0.0 && responses(i) != 1.0) {
      std::ostringstream msg;
      msg << "classification response at row " << i << " is not 0 or 1";
      throw Error(ErrorKind::argument, msg.str());
    }
  }
}

double forward(const NetworkParameters& params, const NetworkArchitecture& arch,
               const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != arch.input_dim()) {
    std::ostringstream msg;
    msg << "input has length " << x.size() << ", expected " << arch.input_dim();
    throw Error(ErrorKind::argument, msg.str());
  }
  return forward_batch(params, arch, x.transpose())(0);
}

Eigen::VectorXd forward_batch(const NetworkParameters& params,
                              const NetworkArchitecture& arch,
                              const Eigen::Ref<const Eigen::MatrixXd>& X) {
  params.check_shapes(arch);
  if (X.cols() != arch.input_dim()) {
    std::ostringstream msg;
    msg << "feature matrix has " << X.cols() << " columns, expected "
        << arch.input_dim();
    throw Error(ErrorKind::argument, msg.str());
  }
  const int L = arch.n_hidden_layers();
  Eigen::MatrixXd z = X.transpose();  // m_0 x n
  for (int a = 0; a < L; ++a) {
    Eigen::MatrixXd s = (params.weights[a] * z).colwise() + params.intercepts[a];
    apply_activation(s, arch.activation);
    z = std::move(s);
  }
  Eigen::VectorXd out =
      ((params.weights[L] * z).colwise() + params.intercepts[L]).transpose();
  if (arch.task == Task::classification) {
    out = out.unaryExpr([](double v) {
      const double s = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v))
                                : std::exp(v) / (1.0 + std::exp(v));
      return clamp_prob(s);
    });
  }
  return out;
}

double smooth_loss(const NetworkParameters& params,
                   const NetworkArchitecture& arch, const Dataset& data,
                   double lambda0) {
  if (lambda0 < 0.0) throw Error(ErrorKind::argument, "lambda0 must be nonnegative");
  if (data.task != arch.task) {
    throw Error(ErrorKind::argument, "dataset task does not match architecture task");
  }
  const Eigen::VectorXd preds = forward_batch(params, arch, data.features);
  const long n = data.n();
  double loss = 0.0;
  if (arch.task == Task::regression) {
    loss = (data.responses - preds).squaredNorm() / static_cast<double>(n);
  } else {
    for (long i = 0; i < n; ++i) {
      const double f = preds(i);  // already clamped inside (0, 1)
      loss -= data.responses(i) * std::log(f) +
              (1.0 - data.responses(i)) * std::log(1.0 - f);
    }
    loss /= static_cast<double>(n);
  }
  for (std::size_t a = 1; a < params.weights.size(); ++a) {
    loss += lambda0 * params.weights[a].squaredNorm();
  }
  if (!std::isfinite(loss)) {
    throw Error(ErrorKind::numeric, "smooth loss is not finite");
  }
  return loss;
}

Gradient smooth_loss_gradient(const NetworkParameters& params,
                              const NetworkArchitecture& arch,
                              const Dataset& data, double lambda0) {
  if (lambda0 < 0.0) throw Error(ErrorKind::argument, "lambda0 must be nonnegative");
  if (data.task != arch.task) {
    throw Error(ErrorKind::argument, "dataset task does not match architecture task");
  }
  params.check_shapes(arch);
  const long n = data.n();
  if (data.features.cols() != arch.input_dim()) {
    throw Error(ErrorKind::argument, "dataset dimension does not match architecture");
  }
  const int L = arch.n_hidden_layers();

  // forward pass keeping every activation
  std::vector<Eigen::MatrixXd> acts(static_cast<std::size_t>(L) + 1);
  acts[0] = data.features.transpose();
  for (int a = 0; a < L; ++a) {
    Eigen::MatrixXd s =
        (params.weights[a] * acts[a]).colwise() + params.intercepts[a];
    apply_activation(s, arch.activation);
    acts[a + 1] = std::move(s);
  }
  Eigen::RowVectorXd out =
      (params.weights[L] * acts[L]).colwise() + params.intercepts[L];

  // derivative of the mean loss with respect to the pre-sigmoid output
  Eigen::RowVectorXd delta_out(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  if (arch.task == Task::regression) {
    delta_out = 2.0 * inv_n * (out - data.responses.transpose());
  } else {
    for (long i = 0; i < n; ++i) {
      const double s = out(i) >= 0.0 ? 1.0 / (1.0 + std::exp(-out(i)))
                                     : std::exp(out(i)) / (1.0 + std::exp(out(i)));
      delta_out(i) = inv_n * (clamp_prob(s) - data.responses(i));
    }
  }

  Gradient grad = NetworkParameters::zero(arch);
  grad.weights[L] = delta_out * acts[L].transpose();
  grad.intercepts[L](0) = delta_out.sum();

  Eigen::MatrixXd delta = params.weights[L].transpose() * delta_out;  // m_L x n
  for (int a = L - 1; a >= 0; --a) {
    delta = (delta.array() * activation_derivative(acts[a + 1], arch.activation))
                .matrix();
    grad.weights[a] = delta * acts[a].transpose();
    grad.intercepts[a] = delta.rowwise().sum();
    if (a > 0) delta = params.weights[a].transpose() * delta;
  }

  for (std::size_t a = 1; a < params.weights.size(); ++a) {
    grad.weights[a] += 2.0 * lambda0 * params.weights[a];
  }
  if (!grad.all_finite()) {
    throw Error(ErrorKind::numeric, "gradient is not finite");
  }
  return grad;
}

}  // namespace spinn
