#pragma once

#include <cstdint>
#include <Eigen/Dense>

namespace exq {

// SplitMix64 (Steele, Lea & Flood 2014; Vigna's fixed-increment variant) used
// as a splittable generator. Substream k of a root seed starts from
//
//     state = mix64(seed + (k + 1) * 0x9E3779B97F4A7C15)
//
// and then steps the usual way (state += gamma, output = mix64(state)).
// The initial hash places substreams at effectively random positions of the
// 2^64-long orbit, so per-particle substreams are independent of generation
// order and of the number of worker threads.
inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64(mix64(seed + (index + 1) * kGoldenGamma));
  }

  std::uint64_t next_u64() {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe as a log() argument.
  double next_open_double() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double next_gaussian();
  double next_gamma(double alpha);
  Eigen::VectorXd next_dirichlet(const Eigen::VectorXd& alpha);

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

} // namespace exq
