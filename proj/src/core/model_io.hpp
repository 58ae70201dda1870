#pragma once

#include <string>

#include "core/optimizer.hpp"

namespace spinn {

inline constexpr int kModelFormatVersion = 1;

struct TrainMeta {
  std::uint64_t seed = 0;
  int n_iters = 0;
  double final_objective = 0.0;
  bool converged = false;
};

/// On-disk model: versioned JSON with full-precision numerals. Save/load
/// round-trips are byte-identical.
struct ModelFile {
  NetworkArchitecture arch;
  NetworkParameters params;
  PenaltyConfig penalty;
  TrainMeta meta;
  std::vector<int> selected_features;
};

ModelFile model_from_fit(const FitResult& fit, const PenaltyConfig& penalty,
                         std::uint64_t seed);

void save_model(const ModelFile& model, const std::string& path);
ModelFile load_model(const std::string& path);

std::string model_to_json_text(const ModelFile& model);

}  // namespace spinn
