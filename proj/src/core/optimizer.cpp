#include "core/optimizer.hpp"

#include <cmath>

namespace spinn {

namespace {

constexpr std::uint64_t kRestartSalt = 0x5350494E4E;  // namespacing for derive_seed

struct RestartOutcome {
  NetworkParameters params;
  std::vector<double> trace;
  bool converged = false;
  bool failed = false;
  double final_gamma = 0.0;
};

}  // namespace

void TrainConfig::validate() const {
  if (gamma_init <= 0.0) throw Error(ErrorKind::argument, "gamma_init must be positive");
  if (shrink <= 0.0 || shrink >= 1.0) {
    throw Error(ErrorKind::argument, "shrink must lie in (0, 1)");
  }
  if (line_search_t <= 0.0 || line_search_t >= 1.0) {
    throw Error(ErrorKind::argument, "line_search_t must lie in (0, 1)");
  }
  if (max_iters < 1 || max_backtracks < 1 || n_restarts < 1) {
    throw Error(ErrorKind::argument, "iteration counts must be positive");
  }
  if (rel_tol <= 0.0) throw Error(ErrorKind::argument, "rel_tol must be positive");
  if (init_scale <= 0.0) throw Error(ErrorKind::argument, "init_scale must be positive");
}

NetworkParameters random_init(const NetworkArchitecture& arch, double init_scale,
                              std::uint64_t seed) {
  NetworkParameters params = NetworkParameters::zero(arch);
  Rng rng(seed);
  for (std::size_t a = 0; a < params.weights.size(); ++a) {
    const double scale =
        init_scale / std::sqrt(static_cast<double>(arch.layer_widths[a]));
    for (long i = 0; i < params.weights[a].rows(); ++i) {
      for (long j = 0; j < params.weights[a].cols(); ++j) {
        params.weights[a](i, j) = rng.uniform(-scale, scale);
      }
    }
    // intercepts start at zero
  }
  return params;
}

NetworkParameters apply_gist_step(const NetworkParameters& params,
                                  const Gradient& grad,
                                  const PenaltyConfig& penalty, double gamma) {
  if (gamma <= 0.0) throw Error(ErrorKind::argument, "gamma must be positive");
  NetworkParameters next = params;
  for (std::size_t a = 0; a < next.weights.size(); ++a) {
    next.weights[a] -= gamma * grad.weights[a];
    next.intercepts[a] -= gamma * grad.intercepts[a];
  }
  next.weights[0] = sgl_prox(next.weights[0], gamma, penalty.lambda, penalty.alpha);
  return next;
}

NetworkParameters gist_step(const NetworkParameters& params,
                            const NetworkArchitecture& arch, const Dataset& data,
                            const PenaltyConfig& penalty, double gamma) {
  const Gradient grad = smooth_loss_gradient(params, arch, data, penalty.lambda0);
  return apply_gist_step(params, grad, penalty, gamma);
}

bool line_search_accept(double obj_new, double obj_old,
                        const NetworkParameters& params_new,
                        const NetworkParameters& params_old, double gamma,
                        double t) {
  if (!std::isfinite(obj_new)) return false;
  return obj_new <= obj_old - t * gamma * params_new.squared_distance(params_old);
}

std::vector<int> exactly_nonzero_columns(const Eigen::MatrixXd& theta1) {
  std::vector<int> cols;
  for (long j = 0; j < theta1.cols(); ++j) {
    if ((theta1.col(j).array() != 0.0).any()) cols.push_back(static_cast<int>(j));
  }
  return cols;
}

namespace {

RestartOutcome run_restart(const NetworkArchitecture& arch, const Dataset& data,
                           const PenaltyConfig& penalty, const TrainConfig& config,
                           int restart) {
  RestartOutcome outcome;
  try {
    NetworkParameters params = random_init(
        arch, config.init_scale, derive_seed(config.seed, {kRestartSalt,
                                             static_cast<std::uint64_t>(restart)}));
    double obj = full_objective(params, arch, data, penalty);
    outcome.trace.push_back(obj);

    for (int iter = 0; iter < config.max_iters; ++iter) {
      const Gradient grad = smooth_loss_gradient(params, arch, data, penalty.lambda0);
      double gamma = config.gamma_init;
      bool accepted = false;
      NetworkParameters candidate;
      double cand_obj = obj;
      for (int b = 0; b < config.max_backtracks; ++b) {
        candidate = apply_gist_step(params, grad, penalty, gamma);
        double trial_obj;
        try {
          trial_obj = full_objective(candidate, arch, data, penalty);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::numeric) throw;
          gamma *= config.shrink;
          continue;  // overflowed step, shrink and retry
        }
        if (line_search_accept(trial_obj, obj, candidate, params, gamma,
                               config.line_search_t)) {
          accepted = true;
          cand_obj = trial_obj;
          break;
        }
        gamma *= config.shrink;
      }
      if (!accepted) {
        // no step below machine scale makes progress; stop at current params
        outcome.converged = true;
        break;
      }
      const double decrease = obj - cand_obj;
      params = std::move(candidate);
      obj = cand_obj;
      outcome.trace.push_back(obj);
      outcome.final_gamma = gamma;
      if (decrease < config.rel_tol * std::max(std::abs(obj), 1e-300)) {
        outcome.converged = true;
        break;
      }
    }
    outcome.params = std::move(params);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::numeric) throw;
    outcome.failed = true;
  }
  return outcome;
}

}  // namespace

FitResult fit(const NetworkArchitecture& arch, const Dataset& data,
              const PenaltyConfig& penalty, const TrainConfig& config) {
  arch.validate();
  data.validate();
  penalty.validate();
  config.validate();
  if (data.p() != arch.input_dim()) {
    throw Error(ErrorKind::argument, "dataset dimension does not match architecture");
  }
  if (data.task != arch.task) {
    throw Error(ErrorKind::argument, "dataset task does not match architecture task");
  }

  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(config.n_restarts));
  parallel_for(config.n_restarts, [&](int r) {
    outcomes[static_cast<std::size_t>(r)] =
        run_restart(arch, data, penalty, config, r);
  });

  FitResult result;
  result.arch = arch;
  int best = -1;
  for (int r = 0; r < config.n_restarts; ++r) {
    const auto& oc = outcomes[static_cast<std::size_t>(r)];
    const double final_obj = oc.failed ? std::numeric_limits<double>::infinity()
                                       : oc.trace.back();
    result.restart_objectives.push_back(final_obj);
    if (oc.failed) continue;
    if (best < 0 || final_obj < result.restart_objectives[static_cast<std::size_t>(best)]) {
      best = r;  // ties keep the earlier restart
    }
  }
  if (best < 0) {
    throw Error(ErrorKind::numeric, "all restarts diverged to a non-finite objective");
  }

  RestartOutcome& winner = outcomes[static_cast<std::size_t>(best)];
  result.params = std::move(winner.params);
  result.objective_trace = std::move(winner.trace);
  result.n_iters = static_cast<int>(result.objective_trace.size()) - 1;
  result.converged = winner.converged;
  result.final_gamma = winner.final_gamma > 0.0 ? winner.final_gamma : config.gamma_init;
  result.selected_features = exactly_nonzero_columns(result.params.weights[0]);
  result.n_active_hidden = 0;
  for (long i = 0; i < result.params.weights[0].rows(); ++i) {
    if ((result.params.weights[0].row(i).array() != 0.0).any()) {
      ++result.n_active_hidden;
    }
  }
  return result;
}

}  // namespace spinn
