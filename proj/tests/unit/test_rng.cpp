#include <set>

#include "doctest.h"
#include "tfc/rng.hpp"

using namespace tfc;

TEST_CASE("splitmix64 reference output") {
  // first output of the reference generator seeded with 0
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("streams are counter based") {
  RandomStream a(42);
  const auto x0 = a.next_u64();
  const auto x1 = a.next_u64();
  CHECK(a.position() == 2);
  RandomStream b(42);
  CHECK(b.next_u64() == x0);
  CHECK(b.next_u64() == x1);
  CHECK(x0 == splitmix64(42));
}

TEST_CASE("module streams differ by name, seed and salt") {
  std::set<std::uint64_t> keys{RandomStream::for_module(0, "online-learn").key(),
                               RandomStream::for_module(0, "offline-opt").key(),
                               RandomStream::for_module(1, "online-learn").key(),
                               RandomStream::for_module(0, "online-learn", 1).key()};
  CHECK(keys.size() == 4);
  CHECK(RandomStream::for_module(7, "dp").key() == RandomStream::for_module(7, "dp").key());
}

TEST_CASE("uniform range") {
  RandomStream r(5);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    const double v = r.uniform(-2.0, 3.0);
    CHECK((v >= -2.0 && v < 3.0));
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
}
