#pragma once

#include <cstdint>
#include <random>

namespace metent {

// mt19937_64 with our own real conversion so streams are identical across
// standard libraries (std::uniform_real_distribution is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }
  // Open interval (0, 1): never returns an endpoint.
  double open01() { return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace metent
