#pragma once

#include <span>
#include <vector>

#include "bnprune/network.hpp"

namespace bnprune {

// Dual variables are clamped to +-kRhoMax so tau stays inside
// [~1e-6, ~1-1e-6] and the 1/tau term in the dual update stays bounded.
inline constexpr double kRhoMax = 13.8;

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// rho = log(tau) - log(1 - tau); requires tau in (0, 1).
double dual_map(double tau);

// tau = 1 / (1 + exp(-rho)); inverse of dual_map on the clamped domain.
double primal_map(double rho);

inline double clamp_rho(double rho) {
  if (rho > kRhoMax) return kRhoMax;
  if (rho < -kRhoMax) return -kRhoMax;
  return rho;
}

// Per-weight local scales in dual (rho) and primal (tau) form, kept in sync.
struct MirrorState {
  std::vector<double> rho;
  std::vector<double> tau;

  static MirrorState constant(std::size_t n, double tau0);
  void refresh_tau();  // tau[i] = primal_map(rho[i])
};

// One mirror-descent update of the dual variables, in place:
//   rho += eta/tau - eta*alpha^2*decay*tau - eta*alpha*eps*g
// followed by the clamp. decay carries the raw per-weight spike/slab factors
// (delta0/delta1), not delta/N.
void rho_step(std::span<double> rho, std::span<const double> tau,
              std::span<const double> g, std::span<const double> eps,
              double eta, double alpha, std::span<const double> decay_raw);

}  // namespace bnprune
