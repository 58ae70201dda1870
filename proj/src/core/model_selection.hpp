#pragma once

#include <utility>
#include <vector>

#include "core/optimizer.hpp"

namespace spinn {

struct HyperGrid {
  std::vector<double> lambdas;
  std::vector<double> alphas;
  double lambda0 = 0.001;  // pretuned, fixed across the grid
  std::vector<NetworkArchitecture> architectures;

  void validate() const;
};

struct CVCell {
  double lambda = 0.0;
  double alpha = 0.0;
  int arch_index = 0;
  std::vector<double> fold_losses;
  double mean_loss = 0.0;
  double se = 0.0;
  bool failed = false;
};

struct CVReport {
  std::vector<CVCell> cells;
  int k = 0;
  int best_cell = -1;
  PenaltyConfig best_penalty;
  NetworkArchitecture best_arch;
  FitResult refit;
};

using FoldSplit = std::vector<std::pair<std::vector<int>, std::vector<int>>>;

/// Partition of 0..n-1 into k folds with sizes differing by at most one,
/// returned as (train indices, validation indices) pairs.
FoldSplit kfold_split(long n, int k, std::uint64_t seed);

/// Mean raw loss of the parameters on held-out data (squared error for
/// regression, logistic loss for classification). No penalty terms.
double validation_loss(const NetworkParameters& params,
                       const NetworkArchitecture& arch, const Dataset& holdout);

Dataset subset_rows(const Dataset& data, const std::vector<int>& rows);

CVReport cross_validate(const Dataset& data, const HyperGrid& grid, int k,
                        const TrainConfig& config);

struct FeatureReport {
  std::vector<int> included;
  int count = 0;
  Eigen::VectorXd group_norms;  // per-feature first-layer column norms
};

FeatureReport feature_report(const FitResult& fit, int p);

/// Smallest lambda at which a full-data refit selects no features, located
/// by 20 bisection steps after a geometric bracket search.
double find_lambda_max(const Dataset& data, const NetworkArchitecture& arch,
                       double lambda0, double alpha, const TrainConfig& config);

/// 10 log-spaced values ending at find_lambda_max, spanning three decades.
std::vector<double> default_lambda_grid(const Dataset& data,
                                        const NetworkArchitecture& arch,
                                        double lambda0, double alpha,
                                        const TrainConfig& config);

std::vector<NetworkArchitecture> default_architecture_grid(
    int p, Task task, Activation activation = Activation::tanh);

}  // namespace spinn
