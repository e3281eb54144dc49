#include "bnprune/schedule.hpp"

#include <cmath>
#include <numbers>

namespace bnprune {

std::int64_t cycle_length(std::int64_t total_iters, int cycles) {
  if (total_iters < 1 || cycles < 1) throw std::invalid_argument("bad schedule shape");
  return (total_iters + cycles - 1) / cycles;
}

double cyclical_lr(std::int64_t t, std::int64_t total_iters, int cycles, double l0) {
  if (t < 1 || t > total_iters) throw std::invalid_argument("iteration out of range");
  const std::int64_t c = cycle_length(total_iters, cycles);
  const double pos = static_cast<double>((t - 1) % c) / static_cast<double>(c);
  return 0.5 * l0 * (std::cos(std::numbers::pi * pos) + 1.0);
}

double schedule_value(const ScheduleSpec& s, std::int64_t t) {
  if (s.kind == ScheduleKind::constant) return s.base;
  return cyclical_lr(t, s.total_iters, s.cycles, s.base);
}

EquivalenceParams equivalence_params(double l, double h, double k) {
  if (!(l > 0.0)) throw std::invalid_argument("learning rate must be positive");
  const double sqrt_l = std::sqrt(l);
  EquivalenceParams p;
  p.dt = sqrt_l;
  p.alpha = k * std::pow(l, 0.75);
  p.beta1 = 1.0 - h * sqrt_l;
  if (!(p.beta1 > 0.0)) throw std::invalid_argument("h*sqrt(l) >= 1 leaves no momentum");
  return p;
}

}  // namespace bnprune
