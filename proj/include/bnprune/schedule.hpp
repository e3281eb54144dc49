#pragma once

#include <cstdint>
#include <stdexcept>

namespace bnprune {

// Cyclical cosine learning rate over T iterations split into M cycles of
// ceil(T/M) iterations; t is 1-based. Restarts at l0 at each cycle start.
double cyclical_lr(std::int64_t t, std::int64_t total_iters, int cycles, double l0);

enum class ScheduleKind { constant, cyclical };

struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::constant;
  double base = 0.0;
  std::int64_t total_iters = 0;  // cyclical only
  int cycles = 1;                // cyclical only
};

double schedule_value(const ScheduleSpec& s, std::int64_t t);

// Iterations per cycle, ceil(T/M).
std::int64_t cycle_length(std::int64_t total_iters, int cycles);

// SGHMC hyperparameters matching a learning-rate-parameterized run:
// dt = sqrt(l), alpha = k * l^(3/4), beta1 = 1 - h*sqrt(l).
struct EquivalenceParams {
  double dt = 0.0;
  double alpha = 0.0;
  double beta1 = 0.0;
};

EquivalenceParams equivalence_params(double l, double h, double k);

}  // namespace bnprune
