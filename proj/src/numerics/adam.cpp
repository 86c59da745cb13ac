#include "skillmpc/numerics/adam.hpp"

#include <cmath>
#include <string>

#include "skillmpc/errors.hpp"

namespace skillmpc {

OptimizerState OptimizerState::fresh(const MlpParams& like, AdamOptions options) {
  return {0, options, like.zeros_like(), like.zeros_like()};
}

void adam_step(OptimizerState& state, MlpParams& params, const MlpParams& grads) {
  if (!params.same_shape(grads) || !params.same_shape(state.first_moment)) {
    throw ContractViolation("adam_step: parameter/gradient shape mismatch");
  }
  for (std::size_t l = 0; l < grads.weights.size(); ++l) {
    if (!grads.weights[l].allFinite()) {
      throw NumericalError("adam_step: non-finite gradient in weights[" +
                           std::to_string(l) + "]");
    }
    if (!grads.biases[l].allFinite()) {
      throw NumericalError("adam_step: non-finite gradient in biases[" +
                           std::to_string(l) + "]");
    }
  }
  const AdamOptions& o = state.options;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(o.beta1, t);
  const double c2 = 1.0 - std::pow(o.beta2, t);
  const double step_size = o.learning_rate / c1;

  auto update = [&](auto& p, auto& m, auto& v, const auto& g) {
    m = o.beta1 * m + (1.0 - o.beta1) * g;
    v = o.beta2 * v + (1.0 - o.beta2) * g.cwiseProduct(g);
    p.array() -= step_size * m.array() / ((v.array() / c2).sqrt() + o.epsilon);
  };
  for (std::size_t l = 0; l < grads.weights.size(); ++l) {
    update(params.weights[l], state.first_moment.weights[l],
           state.second_moment.weights[l], grads.weights[l]);
    update(params.biases[l], state.first_moment.biases[l],
           state.second_moment.biases[l], grads.biases[l]);
  }
}

}  // namespace skillmpc
