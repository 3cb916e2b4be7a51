#pragma once

#include <cstdint>

namespace corrnet {

/// xoshiro256** seeded by splitmix64. Output is identical on every platform.
class Xoshiro256 {
 public:
  static constexpr const char* kName = "xoshiro256**/splitmix64";

  explicit Xoshiro256(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform_open();

 private:
  std::uint64_t s_[4];
};

/// Standard normal variates by inverse-CDF transform of open uniforms.
class NormalSampler {
 public:
  static constexpr const char* kName = "inverse-cdf/acklam";

  explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}
  double operator()();

 private:
  Xoshiro256 rng_;
};

/// Acklam's rational approximation to the standard normal quantile
/// (relative error < 1.15e-9 on (0, 1)).
double normal_quantile(double u);

}  // namespace corrnet
