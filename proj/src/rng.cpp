#include "tfc/rng.hpp"

namespace tfc {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RandomStream RandomStream::for_module(std::uint64_t seed, std::string_view module, std::uint64_t salt) {
  return RandomStream(splitmix64(splitmix64(seed ^ fnv1a64(module)) ^ salt));
}

std::uint64_t RandomStream::next_u64() { return splitmix64(key_ + kGolden * counter_++); }

double RandomStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

}  // namespace tfc
