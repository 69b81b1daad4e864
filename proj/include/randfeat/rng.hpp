#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

#include <boost/random/normal_distribution.hpp>

namespace randfeat {

/// Recorded in every artifact that depends on random draws. Bump when the
/// engine, the normal transform, or the seed derivation changes.
inline constexpr std::string_view kRngVersion = "mt19937_64/boost-ziggurat-normal/splitmix64-v1";

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a parent seed and a key.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) {
  return mix64(seed ^ mix64(key + 0x632be59bd9b4e019ULL));
}

/// Per-trial seed for sweeps: base_seed xor hash(width, trial).
constexpr std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t width, std::uint64_t trial) {
  return base_seed ^ mix64(mix64(width) + trial);
}

/// Standard-normal stream: mt19937_64 feeding a ziggurat transform.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  double operator()() { return normal_(engine_); }
  void fill(std::span<double> out) {
    for (auto& v : out) v = normal_(engine_);
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_{0.0, 1.0};
};

/// Uniform integer in [0, n) without modulo bias, portable across stdlibs.
std::uint64_t uniform_index(std::mt19937_64& engine, std::uint64_t n);

}  // namespace randfeat
