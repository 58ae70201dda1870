#include "core/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spinn {

namespace {

constexpr std::uint64_t kFoldSalt = 0xF01D;
constexpr std::uint64_t kCellFitSalt = 0xCE11F17;
constexpr std::uint64_t kRefitSalt = 0x2EF17;

std::uint64_t cell_content_hash(double lambda, double alpha, double lambda0,
                                const NetworkArchitecture& arch) {
  std::uint64_t h = derive_seed(
      0, {hash_double(lambda), hash_double(alpha), hash_double(lambda0)});
  for (int w : arch.layer_widths) {
    h = derive_seed(h, {static_cast<std::uint64_t>(w)});
  }
  h = derive_seed(h, {static_cast<std::uint64_t>(arch.task),
                      static_cast<std::uint64_t>(arch.activation)});
  return h;
}

// total order used for tie-breaking equal mean losses: larger lambda first,
// then fewer parameters, then smaller alpha, then lexicographic widths
bool cell_preferred(const CVCell& a, const CVCell& b,
                    const std::vector<NetworkArchitecture>& archs) {
  if (a.mean_loss != b.mean_loss) return a.mean_loss < b.mean_loss;
  if (a.lambda != b.lambda) return a.lambda > b.lambda;
  const long qa = archs[static_cast<std::size_t>(a.arch_index)].total_params();
  const long qb = archs[static_cast<std::size_t>(b.arch_index)].total_params();
  if (qa != qb) return qa < qb;
  if (a.alpha != b.alpha) return a.alpha < b.alpha;
  return archs[static_cast<std::size_t>(a.arch_index)].layer_widths <
         archs[static_cast<std::size_t>(b.arch_index)].layer_widths;
}

}  // namespace

void HyperGrid::validate() const {
  if (lambdas.empty() || alphas.empty() || architectures.empty()) {
    throw Error(ErrorKind::argument, "hyperparameter grid has an empty axis");
  }
  if (lambda0 < 0.0) throw Error(ErrorKind::argument, "lambda0 must be nonnegative");
  for (double l : lambdas) {
    if (l < 0.0) throw Error(ErrorKind::argument, "lambda values must be nonnegative");
  }
  for (double a : alphas) {
    if (a < 0.0 || a > 1.0) throw Error(ErrorKind::argument, "alpha values must lie in [0, 1]");
  }
  for (const auto& arch : architectures) arch.validate();
}

FoldSplit kfold_split(long n, int k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::argument, "k must be at least 2");
  if (k > n) throw Error(ErrorKind::argument, "k exceeds the number of observations");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, {kFoldSalt}));
  for (long i = n - 1; i > 0; --i) {
    const auto j = static_cast<long>(rng.below(static_cast<std::uint64_t>(i + 1)));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  FoldSplit folds;
  folds.reserve(static_cast<std::size_t>(k));
  const long base = n / k;
  const long remainder = n % k;
  long start = 0;
  for (int f = 0; f < k; ++f) {
    const long size = base + (f < remainder ? 1 : 0);
    std::vector<int> val(order.begin() + start, order.begin() + start + size);
    std::vector<int> train;
    train.reserve(static_cast<std::size_t>(n - size));
    train.insert(train.end(), order.begin(), order.begin() + start);
    train.insert(train.end(), order.begin() + start + size, order.end());
    std::sort(val.begin(), val.end());
    std::sort(train.begin(), train.end());
    folds.emplace_back(std::move(train), std::move(val));
    start += size;
  }
  return folds;
}

Dataset subset_rows(const Dataset& data, const std::vector<int>& rows) {
  Dataset out;
  out.task = data.task;
  out.features.resize(static_cast<long>(rows.size()), data.p());
  out.responses.resize(static_cast<long>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<long>(i)) = data.features.row(rows[i]);
    out.responses(static_cast<long>(i)) = data.responses(rows[i]);
  }
  return out;
}

double validation_loss(const NetworkParameters& params,
                       const NetworkArchitecture& arch, const Dataset& holdout) {
  const Eigen::VectorXd preds = forward_batch(params, arch, holdout.features);
  const long n = holdout.n();
  double loss = 0.0;
  if (arch.task == Task::regression) {
    loss = (holdout.responses - preds).squaredNorm() / static_cast<double>(n);
  } else {
    for (long i = 0; i < n; ++i) {
      loss -= holdout.responses(i) * std::log(preds(i)) +
              (1.0 - holdout.responses(i)) * std::log(1.0 - preds(i));
    }
    loss /= static_cast<double>(n);
  }
  return loss;
}

CVReport cross_validate(const Dataset& data, const HyperGrid& grid, int k,
                        const TrainConfig& config) {
  data.validate();
  grid.validate();
  config.validate();
  if (k < 2) throw Error(ErrorKind::argument, "k must be at least 2");

  CVReport report;
  report.k = k;
  for (std::size_t ai = 0; ai < grid.architectures.size(); ++ai) {
    for (double alpha : grid.alphas) {
      for (double lambda : grid.lambdas) {
        CVCell cell;
        cell.lambda = lambda;
        cell.alpha = alpha;
        cell.arch_index = static_cast<int>(ai);
        cell.fold_losses.assign(static_cast<std::size_t>(k), 0.0);
        report.cells.push_back(std::move(cell));
      }
    }
  }

  const FoldSplit folds = kfold_split(data.n(), k, config.seed);
  const int n_cells = static_cast<int>(report.cells.size());
  std::vector<char> fold_failed(static_cast<std::size_t>(n_cells * k), 0);

  parallel_for(n_cells * k, [&](int item) {
    const int cell_idx = item / k;
    const int fold = item % k;
    CVCell& cell = report.cells[static_cast<std::size_t>(cell_idx)];
    const NetworkArchitecture& arch =
        grid.architectures[static_cast<std::size_t>(cell.arch_index)];
    PenaltyConfig penalty{grid.lambda0, cell.lambda, cell.alpha};
    TrainConfig fold_config = config;
    fold_config.seed = derive_seed(
        config.seed, {kCellFitSalt,
                      cell_content_hash(cell.lambda, cell.alpha, grid.lambda0, arch),
                      static_cast<std::uint64_t>(fold)});
    const Dataset train = subset_rows(data, folds[static_cast<std::size_t>(fold)].first);
    const Dataset val = subset_rows(data, folds[static_cast<std::size_t>(fold)].second);
    try {
      const FitResult fold_fit = fit(arch, train, penalty, fold_config);
      cell.fold_losses[static_cast<std::size_t>(fold)] =
          validation_loss(fold_fit.params, arch, val);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::numeric) throw;
      fold_failed[static_cast<std::size_t>(item)] = 1;
    }
  });

  for (int c = 0; c < n_cells; ++c) {
    CVCell& cell = report.cells[static_cast<std::size_t>(c)];
    for (int f = 0; f < k; ++f) {
      if (fold_failed[static_cast<std::size_t>(c * k + f)]) cell.failed = true;
    }
    if (cell.failed) {
      cell.mean_loss = std::numeric_limits<double>::quiet_NaN();
      cell.se = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double mean =
        std::accumulate(cell.fold_losses.begin(), cell.fold_losses.end(), 0.0) / k;
    double var = 0.0;
    for (double l : cell.fold_losses) var += (l - mean) * (l - mean);
    var /= (k - 1);
    cell.mean_loss = mean;
    cell.se = std::sqrt(var / k);
  }

  int best = -1;
  for (int c = 0; c < n_cells; ++c) {
    const CVCell& cell = report.cells[static_cast<std::size_t>(c)];
    if (cell.failed) continue;
    if (best < 0 ||
        cell_preferred(cell, report.cells[static_cast<std::size_t>(best)],
                       grid.architectures)) {
      best = c;
    }
  }
  if (best < 0) {
    throw Error(ErrorKind::numeric, "every grid cell failed during cross-validation");
  }

  report.best_cell = best;
  const CVCell& winner = report.cells[static_cast<std::size_t>(best)];
  report.best_arch = grid.architectures[static_cast<std::size_t>(winner.arch_index)];
  report.best_penalty = PenaltyConfig{grid.lambda0, winner.lambda, winner.alpha};

  TrainConfig refit_config = config;
  refit_config.seed = derive_seed(
      config.seed, {kRefitSalt, cell_content_hash(winner.lambda, winner.alpha,
                                                  grid.lambda0, report.best_arch)});
  report.refit = fit(report.best_arch, data, report.best_penalty, refit_config);
  return report;
}

FeatureReport feature_report(const FitResult& fit, int p) {
  if (fit.params.weights.empty() || fit.params.weights[0].cols() != p) {
    throw Error(ErrorKind::argument, "fit does not match the requested feature count");
  }
  FeatureReport rep;
  rep.group_norms.resize(p);
  for (int j = 0; j < p; ++j) {
    rep.group_norms(j) = fit.params.weights[0].col(j).norm();
    if ((fit.params.weights[0].col(j).array() != 0.0).any()) {
      rep.included.push_back(j);
    }
  }
  rep.count = static_cast<int>(rep.included.size());
  return rep;
}

double find_lambda_max(const Dataset& data, const NetworkArchitecture& arch,
                       double lambda0, double alpha, const TrainConfig& config) {
  const auto selects_none = [&](double lambda) {
    PenaltyConfig penalty{lambda0, lambda, alpha};
    return fit(arch, data, penalty, config).selected_features.empty();
  };
  double hi = 1.0;
  int guard = 0;
  while (!selects_none(hi)) {
    hi *= 4.0;
    if (++guard > 30) {
      throw Error(ErrorKind::numeric, "no lambda fully shrinks the first layer");
    }
  }
  double lo = 0.0;
  for (int step = 0; step < 20; ++step) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= 0.0) break;
    if (selects_none(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::vector<double> default_lambda_grid(const Dataset& data,
                                        const NetworkArchitecture& arch,
                                        double lambda0, double alpha,
                                        const TrainConfig& config) {
  const double lmax = find_lambda_max(data, arch, lambda0, alpha, config);
  const double lmin = lmax / 1000.0;
  std::vector<double> grid(10);
  const double ratio = std::log(lmax / lmin) / 9.0;
  for (int i = 0; i < 10; ++i) {
    grid[static_cast<std::size_t>(i)] = lmin * std::exp(ratio * i);
  }
  grid[9] = lmax;
  return grid;
}

std::vector<NetworkArchitecture> default_architecture_grid(int p, Task task,
                                                           Activation activation) {
  return {
      make_architecture(p, {8}, task, activation),
      make_architecture(p, {15}, task, activation),
      make_architecture(p, {12, 6}, task, activation),
  };
}

}  // namespace spinn
