#include <doctest.h>

#include <unordered_set>

#include "rid/rng.hpp"

using namespace rid;

TEST_CASE("split_rng matches the published splitmix64 sequence") {
  // First three outputs of SplitMix64 seeded with 0.
  SplitMix64 rng(0);
  CHECK(rng.next() == 0xE220A8397B1DCDAFULL);
  CHECK(rng.next() == 0x6E789E6AA1B965F4ULL);
  CHECK(rng.next() == 0x06C45D188009454FULL);

  // split_rng(0, 0) is exactly one splitmix64 step from state 0.
  CHECK(split_rng(0, 0) == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("split_rng is a pure function") {
  CHECK(split_rng(42, 7) == split_rng(42, 7));
  CHECK(split_rng(42, 7) != split_rng(42, 8));
}

TEST_CASE("split_rng produces no collisions over sampled index pairs") {
  const Seed master = 0x1234ABCD;
  std::unordered_set<std::uint64_t> seen;
  const std::size_t count = 1000000;
  seen.reserve(count * 2);
  std::size_t collisions = 0;
  for (std::uint64_t i = 0; i < count; ++i)
    collisions += static_cast<std::size_t>(!seen.insert(split_rng(master, i)).second);
  CHECK(collisions == 0);
}

TEST_CASE("next_below stays in range and unit draws stay in [0,1)") {
  SplitMix64 rng(99);
  for (int i = 0; i < 1000; ++i) {
    CHECK(rng.next_below(7) < 7);
    const double u = rng.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("normals have roughly standard moments") {
  SplitMix64 rng(7);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.next_normal();
    sum += z;
    sum2 += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sum2 / n - 1.0) < 0.02);
}
