#include "skillmpc/numerics/rng.hpp"

#include "skillmpc/errors.hpp"

namespace skillmpc {
namespace {

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

std::uint64_t Rng::derive(std::uint64_t seed, std::uint64_t stream) {
  return mix(mix(seed) ^ (stream * 0xd1342543de82ef95ULL + 1));
}

double Rng::normal() { return normal_(engine_); }

double Rng::uniform() {
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

int Rng::uniform_int(int n) {
  if (n < 1) throw ContractViolation("uniform_int: n must be >= 1");
  return std::uniform_int_distribution<int>(0, n - 1)(engine_);
}

}  // namespace skillmpc
