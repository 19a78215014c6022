#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hycore::rng {

// Counter-based generator (splitmix64 core). std::mt19937_64 would do, but
// the standard leaves distribution output unspecified, and reproducibility
// down to the bit is part of this project's contract. All sampling helpers
// below are hand-rolled so that a seed pins every stream on every platform.
class Engine {
 public:
  explicit Engine(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  /// Uniform double in [0, 1).
  double uniform();
  /// Uniform double in [a, b).
  double uniform(double a, double b);
  /// Uniform integer in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Standard normal via Box-Muller (second value cached).
  double normal();

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// Mixes a stream id into a seed so substreams never collide.
std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

/// Stable 64-bit hash of a string (FNV-1a), for per-id substreams.
std::uint64_t hash_str(const std::string& s);

/// Fisher-Yates shuffle driven by Engine (std::shuffle is not portable).
template <typename T>
void shuffle(std::vector<T>& v, Engine& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace hycore::rng
