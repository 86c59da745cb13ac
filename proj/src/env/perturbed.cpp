#include "skillmpc/env/perturbed.hpp"

#include <cmath>
#include <numbers>

#include "skillmpc/errors.hpp"

namespace skillmpc {
namespace {

constexpr double kLargeRequest = 1e6;

}  // namespace

void PerturbationSpec::validate() const {
  if (!std::isfinite(action_gain) || action_gain <= 0.0 || action_gain > 2.0) {
    throw ConfigError("action_gain", "action_gain must be in (0, 2]");
  }
  if (!std::isfinite(action_rotation) ||
      std::abs(action_rotation) > std::numbers::pi / 4.0) {
    throw ConfigError("action_rotation", "|action_rotation| must be <= pi/4");
  }
  if (!action_bias.allFinite()) {
    throw ConfigError("action_bias", "action_bias must be finite");
  }
  if (!std::isfinite(friction_scale) || friction_scale <= 0.0) {
    throw ConfigError("friction_scale", "friction_scale must be > 0");
  }
}

bool PerturbationSpec::is_identity() const {
  return action_gain == 1.0 && action_rotation == 0.0 &&
         action_bias.isZero(0.0) && friction_scale == 1.0;
}

PerturbedEnv::PerturbedEnv(std::unique_ptr<PlanarEnv> base, PerturbationSpec spec)
    : base_(std::move(base)), spec_(spec) {
  if (!base_) throw ContractViolation("PerturbedEnv: null base environment");
  spec_.validate();
  base_->set_friction_scale(base_->friction_scale() * spec_.friction_scale);
}

Vec2 PerturbedEnv::transform(const Vec2& action) const {
  const double c = std::cos(spec_.action_rotation);
  const double s = std::sin(spec_.action_rotation);
  const Vec2 rotated(c * action.x() - s * action.y(),
                     s * action.x() + c * action.y());
  return spec_.action_gain * rotated + spec_.action_bias;
}

Vec PerturbedEnv::step(const Vec& action) {
  if (action.size() != 2) throw ContractViolation("planar action must be 2-D");
  if (!action.allFinite()) throw NumericalError("step: non-finite action");
  Vec2 a = action.head<2>();
  // keep the direction of huge requests without overflowing the transform
  const double peak = a.cwiseAbs().maxCoeff();
  if (peak > kLargeRequest) a *= kLargeRequest / peak;
  return base_->step(transform(a));
}

std::unique_ptr<Environment> PerturbedEnv::clone() const {
  // the base already carries the scaled friction
  return std::make_unique<PerturbedEnv>(*this);
}

std::unique_ptr<PlanarEnv> wrap_perturbed(std::unique_ptr<PlanarEnv> base,
                                          const PerturbationSpec& spec) {
  return std::make_unique<PerturbedEnv>(std::move(base), spec);
}

}  // namespace skillmpc
