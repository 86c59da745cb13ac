#pragma once

#include <memory>

#include "skillmpc/env/planar.hpp"

namespace skillmpc {

// Dynamics mismatch applied on top of a simulator to stand in for the real
// system: a -> gain * R(rotation) * a + bias, before the env clips it.
struct PerturbationSpec {
  double action_gain = 1.0;
  double action_rotation = 0.0;  // radians
  Vec2 action_bias = Vec2::Zero();
  double friction_scale = 1.0;

  // Throws ConfigError if gain is outside (0, 2], |rotation| > pi/4, or a
  // value is non-finite.
  void validate() const;
  bool is_identity() const;
};

class PerturbedEnv final : public PlanarEnv {
 public:
  PerturbedEnv(std::unique_ptr<PlanarEnv> base, PerturbationSpec spec);
  PerturbedEnv(const PerturbedEnv& other)
      : base_(other.base_->clone_planar()), spec_(other.spec_) {}

  EnvKind kind() const override { return base_->kind(); }
  int obs_dim() const override { return base_->obs_dim(); }
  double action_cap() const override { return base_->action_cap(); }

  Vec reset(Rng& rng) override { return base_->reset(rng); }
  Vec observe() const override { return base_->observe(); }
  Vec step(const Vec& action) override;
  EnvSnapshot get_state() const override { return base_->get_state(); }
  void set_state(const EnvSnapshot& s) override { base_->set_state(s); }
  std::unique_ptr<Environment> clone() const override;

  void set_friction_scale(double scale) override {
    base_->set_friction_scale(scale);
  }
  double friction_scale() const override { return base_->friction_scale(); }

  const PerturbationSpec& spec() const { return spec_; }
  Vec2 transform(const Vec2& action) const;

 private:
  std::unique_ptr<PlanarEnv> base_;
  PerturbationSpec spec_;
};

std::unique_ptr<PlanarEnv> wrap_perturbed(std::unique_ptr<PlanarEnv> base,
                                          const PerturbationSpec& spec);

}  // namespace skillmpc
