#pragma once

#include <cstdint>
#include <string_view>

namespace tfc {

// Counter-based random stream. Output k is splitmix64(key + k * golden), so a
// stream is fully described by its key and position. Keys are derived from
// the run seed and a module name: key = splitmix64(seed ^ fnv1a(name)).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) : key_(key) {}

  static RandomStream for_module(std::uint64_t seed, std::string_view module, std::uint64_t salt = 0);

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t key() const { return key_; }
  std::uint64_t position() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view text);

}  // namespace tfc
