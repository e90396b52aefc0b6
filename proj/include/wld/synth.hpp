#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "wld/dataset.hpp"

namespace wld {

enum class TargetModel { Planted, Noise };

struct SynthConfig {
  std::size_t n = 1000;
  std::size_t tables = 10;
  std::size_t cols = 5;  // token columns per table
  double sparsity = 0.97;  // fraction of zero cells in the token matrix
  std::uint64_t seed = 1;
  TargetModel target_model = TargetModel::Planted;
  double base_time = 10.0;
  double noise_sd = 2.0;
  double delta = 20.0;
  std::size_t planted_column = 0;
};

struct SynthOutput {
  Dataset data;
  std::string planted_token;     // empty for the noise model
  std::string planted_selector;  // canonical selector text
  std::size_t planted_support = 0;
};

/// Token matrix with exactly round((1 - sparsity) * n * tables * cols)
/// nonzero cells, a serverName and nrows column, and the target `time`.
/// Under the planted model, objects containing the planted token get +delta.
/// Throws ConfigError for sparsity outside [0,1) or empty shapes.
SynthOutput synthesize(const SynthConfig& config);

std::string token_name(std::size_t table, std::size_t col);

}  // namespace wld
