#include "bnprune/optim.hpp"

#include <cmath>

namespace bnprune {

namespace {

void prepare(StepScratch& scratch, std::size_t n) {
  scratch.w.resize(n);
  scratch.grad.resize(n);
  scratch.eps.resize(n);
}

}  // namespace

CvAdamState CvAdamState::init(std::vector<double> mu0, double tau0, double beta1,
                              double beta2, double n_data) {
  CvAdamState st;
  const std::size_t n = mu0.size();
  st.mu = std::move(mu0);
  st.m.assign(n, 0.0);
  st.mirror = MirrorState::constant(n, tau0);
  st.eps_prev.assign(n, 0.0);
  st.beta1 = beta1;
  st.beta2 = beta2;
  st.n_data = n_data;
  return st;
}

double cv_adam_step(CvAdamState& st, const NetworkSpec& spec, const ParamLayout& layout,
                  const Batch& batch, std::span<const double> decay_raw,
                  const StepParams& sp, GaussianSource& noise, StepScratch& scratch) {
  const std::size_t n = st.mu.size();
  prepare(scratch, n);
  noise.fill(scratch.eps);

  for (std::size_t i = 0; i < n; ++i) {
    scratch.w[i] = st.mu[i] + sp.alpha * st.mirror.tau[i] * scratch.eps[i];
  }
  const double loss =
      loss_and_grad(spec, layout, scratch.w, batch, {}, scratch.grad, scratch.net);
  const double inv_n_data = 1.0 / st.n_data;
  for (std::size_t i = 0; i < n; ++i) {
    scratch.grad[i] += decay_raw[i] * inv_n_data * st.mu[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    st.m[i] = st.beta1 * st.m[i] + st.beta2 * scratch.grad[i];
  }
  if (!st.freeze_tau) {
    rho_step(st.mirror.rho, st.mirror.tau, scratch.grad, scratch.eps, sp.eta, sp.alpha,
             decay_raw);
    st.mirror.refresh_tau();
  }
  for (std::size_t i = 0; i < n; ++i) {
    st.mu[i] -= sp.l * st.mirror.tau[i] * st.m[i];
  }
  st.eps_prev.assign(scratch.eps.begin(), scratch.eps.end());
  ++st.t;
  return loss;
}

SghmcState SghmcState::init(std::vector<double> w0, double tau0, double beta1,
                            double beta2, double n_data) {
  SghmcState st;
  const std::size_t n = w0.size();
  st.w = std::move(w0);
  st.v.assign(n, 0.0);
  st.mirror = MirrorState::constant(n, tau0);
  st.eps_prev.assign(n, 0.0);
  st.beta1 = beta1;
  st.beta2 = beta2;
  st.n_data = n_data;
  return st;
}

double sghmc_step(SghmcState& st, const NetworkSpec& spec, const ParamLayout& layout,
                  const Batch& batch, std::span<const double> decay_raw,
                  const StepParams& sp, GaussianSource& noise, StepScratch& scratch) {
  return sghmc_step_masked(st, st.w, spec, layout, batch, decay_raw, sp, noise, scratch);
}

double sghmc_step_masked(SghmcState& st, std::span<const double> eff,
                       const NetworkSpec& spec, const ParamLayout& layout,
                       const Batch& batch, std::span<const double> decay_raw,
                       const StepParams& sp, GaussianSource& noise, StepScratch& scratch) {
  const std::size_t n = st.w.size();
  prepare(scratch, n);
  const double dt = std::sqrt(sp.l);
  const double dt2 = dt * dt;
  const double alpha = sp.k * dt * std::sqrt(dt);
  const double noise_scale =
      std::sqrt(2.0 + 2.0 * st.beta1 * st.beta1) * sp.k * dt * std::sqrt(dt);

  scratch.w.assign(eff.begin(), eff.end());
  const double inv_n_data = 1.0 / st.n_data;
  scratch.decay_n.resize(n);
  for (std::size_t i = 0; i < n; ++i) scratch.decay_n[i] = decay_raw[i] * inv_n_data;
  const double loss = loss_and_grad(spec, layout, scratch.w, batch, scratch.decay_n,
                                    scratch.grad, scratch.net);

  if (!st.freeze_tau) {
    rho_step(st.mirror.rho, st.mirror.tau, scratch.grad, st.eps_prev, sp.eta, alpha,
             decay_raw);
  }
  noise.fill(scratch.eps);
  if (!st.freeze_tau) st.mirror.refresh_tau();

  for (std::size_t i = 0; i < n; ++i) {
    st.v[i] = st.beta1 * st.v[i] + st.beta2 * dt2 * scratch.grad[i] +
              noise_scale * scratch.eps[i];
    st.w[i] -= st.mirror.tau[i] * st.v[i];
  }
  st.eps_prev.assign(scratch.eps.begin(), scratch.eps.end());
  ++st.t;
  return loss;
}

NgviState NgviState::init(std::vector<double> mu0, double prec0, double gamma,
                          double lambda, double alpha_exp, double delta, double n_data) {
  NgviState st;
  const std::size_t n = mu0.size();
  st.mu = std::move(mu0);
  st.inv_sigma2.assign(n, prec0);
  st.gamma = gamma;
  st.lambda = lambda;
  st.alpha_exp = alpha_exp;
  st.delta = delta;
  st.n_data = n_data;
  return st;
}

double ngvi_step(NgviState& st, const NetworkSpec& spec, const ParamLayout& layout,
               const Batch& batch, double l, GaussianSource& noise, StepScratch& scratch) {
  const std::size_t n = st.mu.size();
  prepare(scratch, n);
  noise.fill(scratch.eps);
  for (std::size_t i = 0; i < n; ++i) {
    scratch.w[i] = st.mu[i] + scratch.eps[i] / std::sqrt(st.inv_sigma2[i]);
  }
  const double loss =
      loss_and_grad(spec, layout, scratch.w, batch, {}, scratch.grad, scratch.net);

  const double decay_n = st.delta / st.n_data;
  const double keep = 1.0 - st.lambda * st.gamma;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = scratch.grad[i];
    st.inv_sigma2[i] = keep * st.inv_sigma2[i] + st.gamma * (g * g + decay_n);
    if (!(st.inv_sigma2[i] > 0.0) || !std::isfinite(st.inv_sigma2[i])) {
      throw NumericError("precision underflow in variational update");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double sigma2 = 1.0 / st.inv_sigma2[i];
    const double precond =
        st.alpha_exp == 1.0 ? sigma2 : std::pow(sigma2, st.alpha_exp);
    st.mu[i] -= l * precond * (scratch.grad[i] + decay_n * st.mu[i]);
  }
  ++st.t;
  return loss;
}

}  // namespace bnprune
