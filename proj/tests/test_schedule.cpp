#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bnprune/schedule.hpp"
#include "doctest.h"

using namespace bnprune;

TEST_CASE("cycle length is the ceiling split") {
  CHECK(cycle_length(100, 4) == 25);
  CHECK(cycle_length(101, 4) == 26);
  CHECK(cycle_length(7, 3) == 3);
  CHECK(cycle_length(5, 1) == 5);
  CHECK_THROWS_AS(cycle_length(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(cycle_length(10, 0), std::invalid_argument);
}

TEST_CASE("learning rate restarts at full strength each cycle") {
  const double l0 = 0.1;
  CHECK(cyclical_lr(1, 100, 4, l0) == l0);
  CHECK(cyclical_lr(26, 100, 4, l0) == l0);
  CHECK(cyclical_lr(51, 100, 4, l0) == l0);
  CHECK(cyclical_lr(76, 100, 4, l0) == l0);
  CHECK(cyclical_lr(1, 100, 1, l0) == l0);
}

TEST_CASE("learning rate follows the cosine within a cycle") {
  const double l0 = 0.1;
  // 4 cycles of length 25; position (t-1) mod 25 over 25.
  for (std::int64_t t : {2, 13, 25, 40, 99}) {
    const double pos = static_cast<double>((t - 1) % 25) / 25.0;
    const double expect = 0.5 * l0 * (std::cos(std::numbers::pi * pos) + 1.0);
    CHECK(cyclical_lr(t, 100, 4, l0) == doctest::Approx(expect).epsilon(1e-15));
  }
  // Halfway through a single cycle the rate is half the base.
  CHECK(cyclical_lr(51, 100, 1, l0) == doctest::Approx(0.5 * l0).epsilon(1e-12));
}

TEST_CASE("learning rate decreases monotonically inside a cycle") {
  double prev = cyclical_lr(1, 100, 4, 0.1);
  for (std::int64_t t = 2; t <= 25; ++t) {
    const double cur = cyclical_lr(t, 100, 4, 0.1);
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK(cyclical_lr(26, 100, 4, 0.1) > prev);
}

TEST_CASE("iteration index is validated as one-based") {
  CHECK_THROWS_AS(cyclical_lr(0, 100, 4, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(cyclical_lr(101, 100, 4, 0.1), std::invalid_argument);
  CHECK_NOTHROW(cyclical_lr(100, 100, 4, 0.1));
}

TEST_CASE("schedule dispatch covers both kinds") {
  ScheduleSpec flat;
  flat.kind = ScheduleKind::constant;
  flat.base = 0.05;
  CHECK(schedule_value(flat, 1) == 0.05);
  CHECK(schedule_value(flat, 1000) == 0.05);

  ScheduleSpec cyc;
  cyc.kind = ScheduleKind::cyclical;
  cyc.base = 0.1;
  cyc.total_iters = 100;
  cyc.cycles = 4;
  CHECK(schedule_value(cyc, 7) == cyclical_lr(7, 100, 4, 0.1));
}

TEST_CASE("sampler equivalence map produces the documented triple") {
  const EquivalenceParams p = equivalence_params(0.01, 1.0, 1.0);
  CHECK(p.dt == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(p.alpha == doctest::Approx(0.03162277660168379).epsilon(1e-14));
  CHECK(p.beta1 == doctest::Approx(0.9).epsilon(1e-15));

  const EquivalenceParams q = equivalence_params(1.0, 0.5, 2.0);
  CHECK(q.dt == 1.0);
  CHECK(q.alpha == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(q.beta1 == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("equivalence map rejects friction that kills the momentum") {
  CHECK_THROWS_AS(equivalence_params(1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(equivalence_params(4.0, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(equivalence_params(0.0, 1.0, 1.0), std::invalid_argument);
  CHECK_NOTHROW(equivalence_params(0.99, 1.0, 1.0));
}
