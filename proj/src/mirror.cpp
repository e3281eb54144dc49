#include "bnprune/mirror.hpp"

#include <cmath>

namespace bnprune {

double dual_map(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("dual_map requires tau in (0,1)");
  return std::log(tau) - std::log1p(-tau);
}

double primal_map(double rho) {
  if (rho >= 0.0) return 1.0 / (1.0 + std::exp(-rho));
  const double e = std::exp(rho);
  return e / (1.0 + e);
}

MirrorState MirrorState::constant(std::size_t n, double tau0) {
  MirrorState s;
  s.rho.assign(n, clamp_rho(dual_map(tau0)));
  s.tau.assign(n, tau0);
  return s;
}

void MirrorState::refresh_tau() {
  tau.resize(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) tau[i] = primal_map(rho[i]);
}

void rho_step(std::span<double> rho, std::span<const double> tau,
              std::span<const double> g, std::span<const double> eps,
              double eta, double alpha, std::span<const double> decay_raw) {
  const double ea2 = eta * alpha * alpha;
  const double ea = eta * alpha;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double step = eta / tau[i] - ea2 * decay_raw[i] * tau[i] - ea * eps[i] * g[i];
    rho[i] = clamp_rho(rho[i] + step);
  }
}

}  // namespace bnprune
