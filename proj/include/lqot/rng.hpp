#pragma once
// Deterministic random source. std::mt19937_64 has a standard-fixed output
// sequence; the distribution transforms here are hand-rolled because the
// standard library's distributions are implementation-defined, which would
// break byte-identical outputs across platforms.

#include <cstdint>
#include <random>
#include <vector>

namespace lqot {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; the second deviate of each pair is cached.
  double normal();

  std::vector<double> normal_vec(std::size_t n);

  // Uniform draw from the closed ball of given radius centered at origin.
  std::vector<double> uniform_ball(std::size_t dim, double radius);

  std::size_t index(std::size_t bound) {
    return static_cast<std::size_t>(gen_() % bound);
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace lqot
