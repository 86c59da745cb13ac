#pragma once

#include <cstdint>

#include "skillmpc/numerics/mlp.hpp"

namespace skillmpc {

struct AdamOptions {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct OptimizerState {
  std::int64_t step = 0;
  AdamOptions options;
  MlpParams first_moment;
  MlpParams second_moment;

  static OptimizerState fresh(const MlpParams& like, AdamOptions options = {});
};

// One bias-corrected adaptive-moment update. Throws NumericalError naming the
// offending tensor if a gradient is non-finite; nothing is modified then.
void adam_step(OptimizerState& state, MlpParams& params, const MlpParams& grads);

}  // namespace skillmpc
