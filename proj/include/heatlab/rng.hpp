#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace heatlab {

// Platform-stable random source. std::uniform_real_distribution and
// std::normal_distribution are implementation-defined, so the conversions
// from raw mt19937_64 output are done here by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (no cached second value).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Gaussian vector normalized to unit Euclidean length.
  std::vector<double> unit_vector(std::size_t dim) {
    std::vector<double> v(dim);
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (auto& c : v) {
        c = normal();
        norm2 += c * c;
      }
    } while (dim > 0 && norm2 == 0.0);
    const double inv = dim > 0 ? 1.0 / std::sqrt(norm2) : 0.0;
    for (auto& c : v) c *= inv;
    return v;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace heatlab
