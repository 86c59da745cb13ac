#pragma once

#include <cstdint>
#include <random>

namespace skillmpc {

// Seeded random stream. Child streams are derived from the construction
// seed only, so `child(i)` does not depend on how many draws were made.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

  Rng child(std::uint64_t stream) const { return Rng(derive(seed_, stream)); }
  std::uint64_t seed() const { return seed_; }

  double normal();
  double uniform();
  // uniform over [0, n)
  int uniform_int(int n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace skillmpc
