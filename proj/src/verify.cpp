#include "bnprune/verify.hpp"

#include <cmath>

#include "bnprune/optim.hpp"
#include "bnprune/schedule.hpp"

namespace bnprune {

namespace {

// y_i = mu_true + noise with a unit design column, so a single weight is the
// model's only parameter and the posterior is Gaussian in closed form.
struct ConjugateTarget {
  NetworkSpec spec;
  ParamLayout layout;
  std::vector<double> x, y;
  double sum_y = 0.0;

  Batch batch() const { return Batch{x.data(), y.data(), y.size(), 1}; }
};

ConjugateTarget make_target(std::size_t n, double mu_true, Rng data_rng) {
  ConjugateTarget tg;
  tg.spec.layer_sizes = {1, 1};
  tg.spec.output = OutputKind::regression;
  tg.spec.include_bias = {0};
  tg.spec.validate();
  tg.layout = build_layout(tg.spec);
  tg.x.assign(n, 1.0);
  tg.y.resize(n);
  for (double& v : tg.y) {
    v = mu_true + data_rng.normal();
    tg.sum_y += v;
  }
  return tg;
}

double resolve_k(KMode mode, double k_custom, std::size_t n) {
  switch (mode) {
    case KMode::sqrt_n:
      return 1.0 / std::sqrt(static_cast<double>(n));
    case KMode::cold_n:
      return 1.0 / static_cast<double>(n);
    case KMode::custom:
      return k_custom;
  }
  return 0.0;
}

// Long-run moments of the weight chain via Welford accumulation.
MomentSummary run_sampler_chain(const ConjugateTarget& tg, double delta, double dt,
                                double beta1, double beta2, double k, double tau0,
                                std::size_t burnin, std::size_t samples, Rng rng) {
  SghmcState st = SghmcState::init({0.0}, tau0, beta1, beta2,
                                   static_cast<double>(tg.y.size()));
  st.freeze_tau = true;
  const std::vector<double> decay = {delta};
  StepParams sp;
  sp.l = dt * dt;
  sp.k = k;
  RngGaussian noise(rng);
  StepScratch scratch;
  const Batch batch = tg.batch();

  for (std::size_t i = 0; i < burnin; ++i) {
    sghmc_step(st, tg.spec, tg.layout, batch, decay, sp, noise, scratch);
  }
  MomentSummary ms;
  double m2 = 0.0;
  for (std::size_t i = 1; i <= samples; ++i) {
    sghmc_step(st, tg.spec, tg.layout, batch, decay, sp, noise, scratch);
    const double x = st.w[0];
    const double d = x - ms.mean;
    ms.mean += d / static_cast<double>(i);
    m2 += d * (x - ms.mean);
  }
  ms.var = m2 / static_cast<double>(samples - 1);
  return ms;
}

MomentSummary run_mean_field_chain(const ConjugateTarget& tg, double delta, double l,
                                   double beta1, double beta2, double k, double tau0,
                                   std::size_t burnin, std::size_t samples, Rng rng) {
  CvAdamState st = CvAdamState::init({0.0}, tau0, beta1, beta2,
                                     static_cast<double>(tg.y.size()));
  st.freeze_tau = true;
  const std::vector<double> decay = {delta};
  StepParams sp;
  sp.l = l;
  sp.alpha = k * std::pow(l, 0.75);
  sp.k = k;
  RngGaussian noise(rng);
  StepScratch scratch;
  const Batch batch = tg.batch();

  for (std::size_t i = 0; i < burnin; ++i) {
    cv_adam_step(st, tg.spec, tg.layout, batch, decay, sp, noise, scratch);
  }
  MomentSummary ms;
  double m2 = 0.0;
  for (std::size_t i = 1; i <= samples; ++i) {
    cv_adam_step(st, tg.spec, tg.layout, batch, decay, sp, noise, scratch);
    const double x = st.mu[0];
    const double d = x - ms.mean;
    ms.mean += d / static_cast<double>(i);
    m2 += d * (x - ms.mean);
  }
  ms.var = m2 / static_cast<double>(samples - 1);
  return ms;
}

}  // namespace

SamplerVerifyReport verify_sghmc_gaussian(const VerifySamplerConfig& cfg) {
  cfg.validate();
  const Rng base(cfg.seed);
  const ConjugateTarget tg = make_target(cfg.n_data, cfg.mu_true, base.fork(1));
  const double n = static_cast<double>(cfg.n_data);

  SamplerVerifyReport rep;
  rep.k = resolve_k(cfg.k_mode, cfg.k_custom, cfg.n_data);
  rep.beta1 = 1.0 - cfg.h * cfg.dt;
  rep.analytic_mean = tg.sum_y / (n + cfg.delta);
  rep.analytic_var = n * rep.k * rep.k / (cfg.beta2 * (n + cfg.delta));

  rep.chain = run_sampler_chain(tg, cfg.delta, cfg.dt, rep.beta1, cfg.beta2, rep.k,
                                cfg.tau0, cfg.burnin, cfg.samples, base.fork(2));
  rep.mean_err = std::abs(rep.chain.mean - rep.analytic_mean);
  rep.var_rel_err = std::abs(rep.chain.var / rep.analytic_var - 1.0);
  rep.pass = rep.mean_err < cfg.mean_tol && rep.var_rel_err < cfg.var_rel_tol;
  return rep;
}

EquivalenceReport verify_equivalence(const VerifyEquivalenceConfig& cfg) {
  cfg.validate();
  const Rng base(cfg.seed);
  const ConjugateTarget tg = make_target(cfg.n_data, cfg.mu_true, base.fork(1));
  const double n = static_cast<double>(cfg.n_data);

  EquivalenceReport rep;
  rep.k = resolve_k(cfg.k_mode, cfg.k_custom, cfg.n_data);
  const EquivalenceParams ep = equivalence_params(cfg.l, cfg.h, rep.k);
  rep.dt_mapped = ep.dt;
  rep.beta1_mapped = ep.beta1;
  rep.dt_direct = ep.dt / 2.0;
  rep.beta1_direct = 1.0 - cfg.h * rep.dt_direct;
  rep.beta1_control = 1.0 - cfg.h * cfg.l;
  rep.analytic_mean = tg.sum_y / (n + cfg.delta);
  rep.analytic_var = n * rep.k * rep.k / (cfg.beta2 * (n + cfg.delta));

  rep.direct = run_sampler_chain(tg, cfg.delta, rep.dt_direct, rep.beta1_direct,
                                 cfg.beta2, rep.k, cfg.tau0, cfg.burnin, cfg.samples,
                                 base.fork(2));
  rep.mapped = run_sampler_chain(tg, cfg.delta, rep.dt_mapped, rep.beta1_mapped,
                                 cfg.beta2, rep.k, cfg.tau0, cfg.burnin, cfg.samples,
                                 base.fork(3));
  rep.control = run_sampler_chain(tg, cfg.delta, rep.dt_mapped, rep.beta1_control,
                                  cfg.beta2, rep.k, cfg.tau0, cfg.burnin, cfg.samples,
                                  base.fork(4));
  rep.optimizer_mu = run_mean_field_chain(tg, cfg.delta, cfg.l, ep.beta1, cfg.beta2,
                                          rep.k, cfg.tau0, cfg.burnin, cfg.samples,
                                          base.fork(5));

  rep.mean_diff = std::abs(rep.mapped.mean - rep.direct.mean);
  rep.var_rel_diff = std::abs(rep.mapped.var - rep.direct.var) / rep.direct.var;
  rep.control_var_rel_diff = std::abs(rep.control.var - rep.direct.var) / rep.direct.var;
  rep.pass = rep.mean_diff < cfg.mean_tol && rep.var_rel_diff < cfg.var_rel_tol &&
             rep.control_var_rel_diff > cfg.var_rel_tol;
  return rep;
}

}  // namespace bnprune
