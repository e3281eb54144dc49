#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "bnprune/rng.hpp"
#include "doctest.h"

using namespace bnprune;

TEST_CASE("splitmix64 matches the reference mix") {
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(splitmix64(0x9e3779b97f4a7c15ULL) == 0x6e789e6aa1b965f4ULL);
  CHECK(splitmix64(1) != splitmix64(2));
}

TEST_CASE("raw engine output matches std::mt19937_64") {
  // The engine and its seeding procedure are pinned by the language standard,
  // so the raw stream is reproducible across platforms.
  Rng rng(5489);
  std::mt19937_64 ref(5489);
  for (int i = 0; i < 1000; ++i) {
    CHECK(rng.next_u64() == ref());
  }
}

TEST_CASE("same seed gives an identical stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  for (int i = 0; i < 100; ++i) {
    CHECK(a.uniform() == b.uniform());
    CHECK(a.normal() == b.normal());
  }
}

TEST_CASE("uniform draws stay strictly inside (0, 1)") {
  Rng rng(7);
  for (int i = 0; i < 200000; ++i) {
    const double u = rng.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("uniform maps the raw word as (x>>11 + 0.5) * 2^-53") {
  Rng raw(99), uni(99);
  for (int i = 0; i < 50; ++i) {
    const double expect =
        (static_cast<double>(raw.next_u64() >> 11) + 0.5) * 0x1.0p-53;
    CHECK(uni.uniform() == expect);
  }
}

TEST_CASE("normal moments are close to standard") {
  Rng rng(11);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.03);
}

TEST_CASE("fill_normal consumes the same stream as repeated normal()") {
  Rng a(3), b(3);
  std::vector<double> buf(7);
  a.fill_normal(buf);
  for (double v : buf) CHECK(v == b.normal());
  // The pair cache carries across calls, so the next scalar draw agrees too.
  CHECK(a.normal() == b.normal());
}

TEST_CASE("truncated normal respects its bounds") {
  Rng rng(13);
  for (int i = 0; i < 20000; ++i) {
    const double z = rng.truncated_normal(-10.0, 10.0);
    CHECK(z >= -10.0);
    CHECK(z <= 10.0);
  }
  for (int i = 0; i < 2000; ++i) {
    const double z = rng.truncated_normal(0.5, 1.0);
    CHECK(z >= 0.5);
    CHECK(z <= 1.0);
  }
}

TEST_CASE("forked streams are reproducible and decorrelated") {
  Rng base(123);
  Rng f1 = base.fork(10);
  Rng f2 = base.fork(10);
  Rng f3 = base.fork(11);
  CHECK(f1.next_u64() == f2.next_u64());
  CHECK(f1.next_u64() == f2.next_u64());

  // Forking never consumes parent state.
  Rng b1(123), b2(123);
  (void)b1.fork(5);
  (void)b1.fork(6);
  CHECK(b1.next_u64() == b2.next_u64());

  // Distinct stream ids give distinct draws and near-zero sample correlation.
  CHECK(f3.next_u64() != f1.next_u64());
  const int n = 50000;
  double sxy = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
  Rng ha = base.fork(1), hb = base.fork(2);
  for (int i = 0; i < n; ++i) {
    const double x = ha.normal(), y = hb.normal();
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  const double cx = sxx / n - (sx / n) * (sx / n);
  const double cy = syy / n - (sy / n) * (sy / n);
  const double cxy = sxy / n - (sx / n) * (sy / n);
  CHECK(std::abs(cxy / std::sqrt(cx * cy)) < 0.02);
}

TEST_CASE("forks of forks stay reproducible") {
  Rng base(77);
  Rng a = base.fork(4).fork(9);
  Rng b = base.fork(4).fork(9);
  for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
}
