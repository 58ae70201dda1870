#pragma once

// Shared fixtures and independent oracles. The oracles deliberately avoid the
// code paths they are used to check: the prox oracle is a generic numeric
// minimizer and the gradient oracle is central finite differences.

#include <cmath>

#include "core/optimizer.hpp"
#include "core/penalty.hpp"

namespace spinn::testing {

/// Numerically minimizes 0.5*|u - z|^2 + c*Omega_alpha(u) by cyclic
/// coordinate descent with golden-section line minimization per coordinate.
/// Knows nothing about soft-thresholding.
inline Eigen::VectorXd prox_oracle(const Eigen::VectorXd& z, double c,
                                   double alpha) {
  const double c1 = c * (1.0 - alpha);
  const double c2 = c * alpha;
  const long d = z.size();
  Eigen::VectorXd u = z;
  double norm_sq = u.squaredNorm();

  const auto coord_obj = [&](long j, double t, double rest_sq) {
    const double dz = t - z(j);
    return 0.5 * dz * dz + c1 * std::abs(t) + c2 * std::sqrt(t * t + rest_sq);
  };

  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int sweep = 0; sweep < 2000; ++sweep) {
    double max_change = 0.0;
    for (long j = 0; j < d; ++j) {
      const double rest_sq = std::max(0.0, norm_sq - u(j) * u(j));
      double lo = -std::abs(z(j)) - 1.0;
      double hi = std::abs(z(j)) + 1.0;
      double x1 = hi - golden * (hi - lo);
      double x2 = lo + golden * (hi - lo);
      double f1 = coord_obj(j, x1, rest_sq);
      double f2 = coord_obj(j, x2, rest_sq);
      for (int it = 0; it < 80; ++it) {
        if (f1 > f2) {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + golden * (hi - lo);
          f2 = coord_obj(j, x2, rest_sq);
        } else {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - golden * (hi - lo);
          f1 = coord_obj(j, x1, rest_sq);
        }
      }
      const double t = 0.5 * (lo + hi);
      max_change = std::max(max_change, std::abs(t - u(j)));
      norm_sq = rest_sq + t * t;
      u(j) = t;
    }
    if (max_change < 1e-13) break;
  }
  return u;
}

/// Central finite differences of smooth_loss over every parameter.
inline Gradient fd_gradient(const NetworkParameters& params,
                            const NetworkArchitecture& arch, const Dataset& data,
                            double lambda0, double h = 1e-5) {
  Gradient grad = NetworkParameters::zero(arch);
  NetworkParameters probe = params;
  const auto central = [&](double& slot) {
    const double saved = slot;
    slot = saved + h;
    const double up = smooth_loss(probe, arch, data, lambda0);
    slot = saved - h;
    const double down = smooth_loss(probe, arch, data, lambda0);
    slot = saved;
    return (up - down) / (2.0 * h);
  };
  for (std::size_t a = 0; a < probe.weights.size(); ++a) {
    for (long i = 0; i < probe.weights[a].rows(); ++i) {
      for (long j = 0; j < probe.weights[a].cols(); ++j) {
        grad.weights[a](i, j) = central(probe.weights[a](i, j));
      }
    }
    for (long i = 0; i < probe.intercepts[a].size(); ++i) {
      grad.intercepts[a](i) = central(probe.intercepts[a](i));
    }
  }
  return grad;
}

/// Relative discrepancy with a floor so near-zero components are compared
/// absolutely at the floor's scale.
inline double max_rel_error(const Gradient& a, const Gradient& b,
                            double floor = 1e-3) {
  double worst = 0.0;
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    for (long i = 0; i < a.weights[l].rows(); ++i) {
      for (long j = 0; j < a.weights[l].cols(); ++j) {
        const double x = a.weights[l](i, j), y = b.weights[l](i, j);
        worst = std::max(worst,
                         std::abs(x - y) / std::max({std::abs(x), std::abs(y), floor}));
      }
    }
    for (long i = 0; i < a.intercepts[l].size(); ++i) {
      const double x = a.intercepts[l](i), y = b.intercepts[l](i);
      worst = std::max(worst,
                       std::abs(x - y) / std::max({std::abs(x), std::abs(y), floor}));
    }
  }
  return worst;
}

inline NetworkParameters random_params(const NetworkArchitecture& arch, Rng& rng,
                                       double scale = 1.0) {
  NetworkParameters params = NetworkParameters::zero(arch);
  for (std::size_t a = 0; a < params.weights.size(); ++a) {
    for (long i = 0; i < params.weights[a].rows(); ++i) {
      for (long j = 0; j < params.weights[a].cols(); ++j) {
        params.weights[a](i, j) = rng.uniform(-scale, scale);
      }
    }
    for (long i = 0; i < params.intercepts[a].size(); ++i) {
      params.intercepts[a](i) = rng.uniform(-scale, scale);
    }
  }
  return params;
}

inline Dataset random_dataset(long n, long p, Task task, Rng& rng) {
  Dataset data;
  data.task = task;
  data.features.resize(n, p);
  data.responses.resize(n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < p; ++j) data.features(i, j) = rng.uniform(-1.0, 1.0);
    data.responses(i) = task == Task::regression
                            ? rng.uniform(-2.0, 2.0)
                            : (rng.uniform() < 0.5 ? 0.0 : 1.0);
  }
  return data;
}

inline bool exactly_equal(const Eigen::Ref<const Eigen::MatrixXd>& a,
                          const Eigen::Ref<const Eigen::MatrixXd>& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         (a.array() == b.array()).all();
}

inline bool non_increasing(const std::vector<double>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i] > trace[i - 1]) return false;
  }
  return true;
}

}  // namespace spinn::testing
