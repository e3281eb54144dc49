#pragma once

#include <span>
#include <vector>

#include "bnprune/mirror.hpp"
#include "bnprune/network.hpp"
#include "bnprune/rng.hpp"

namespace bnprune {

// Source of standard-normal draws; abstract so tests can inject fixed values.
struct GaussianSource {
  virtual ~GaussianSource() = default;
  virtual void fill(std::span<double> out) = 0;
};

struct RngGaussian final : GaussianSource {
  explicit RngGaussian(Rng& rng) : rng_(&rng) {}
  void fill(std::span<double> out) override { rng_->fill_normal(out); }

 private:
  Rng* rng_;
};

struct ConstGaussian final : GaussianSource {
  explicit ConstGaussian(double value) : value_(value) {}
  void fill(std::span<double> out) override {
    for (double& v : out) v = value_;
  }

 private:
  double value_;
};

// Reusable step buffers.
struct StepScratch {
  std::vector<double> w, grad, eps, decay_n;
  NetScratch net;
};

// Per-step hyperparameter values; the caller evaluates schedules.
struct StepParams {
  double l = 0.0;      // learning rate (cv-adam) or l_t with dt = sqrt(l_t) (sghmc)
  double eta = 0.0;    // dual-update rate
  double alpha = 0.0;  // posterior scale (cv-adam); derived k*dt^1.5 for sghmc
  double k = 0.0;      // temperature scale (sghmc)
};

// ---- constrained variational Adam -------------------------------------------

struct CvAdamState {
  std::vector<double> mu, m;
  MirrorState mirror;
  std::vector<double> eps_prev;
  double beta1 = 0.9;
  double beta2 = 1.0;
  double n_data = 1.0;  // N in the delta/N decay scaling
  bool freeze_tau = false;
  std::int64_t t = 0;

  static CvAdamState init(std::vector<double> mu0, double tau0, double beta1, double beta2,
                          double n_data);
};

// One update, in order: draw eps; w = mu + alpha*tau.*eps; g = grad of the
// batch loss at w plus (decay_raw/N).*mu; m = beta1*m + beta2*g; dual update
// with this step's eps; tau refresh; mu -= l*tau.*m. Returns the batch data
// loss at the sampled w.
double cv_adam_step(CvAdamState& st, const NetworkSpec& spec, const ParamLayout& layout,
                  const Batch& batch, std::span<const double> decay_raw,
                  const StepParams& sp, GaussianSource& noise, StepScratch& scratch);

// ---- SGHMC -------------------------------------------------------------------

struct SghmcState {
  std::vector<double> w, v;
  MirrorState mirror;
  std::vector<double> eps_prev;
  double beta1 = 0.9;
  double beta2 = 1.0;
  double n_data = 1.0;
  bool freeze_tau = false;
  std::int64_t t = 0;

  static SghmcState init(std::vector<double> w0, double tau0, double beta1, double beta2,
                         double n_data);
};

// One update with dt = sqrt(sp.l), alpha = sp.k * dt^1.5, in order: g at the
// current weights including (decay_raw/N).*w; dual update consuming the
// PREVIOUS step's eps (zero at the first step); fresh eps; tau refresh;
// v = beta1*v + beta2*dt^2*g + sqrt(2+2*beta1^2)*k*dt^1.5*eps; w -= tau.*v.
// The velocity accumulates +g and the position update subtracts tau.*v, so
// the deterministic limit (k=0) descends. Returns the batch data loss at the
// evaluation point.
double sghmc_step(SghmcState& st, const NetworkSpec& spec, const ParamLayout& layout,
                const Batch& batch, std::span<const double> decay_raw,
                const StepParams& sp, GaussianSource& noise, StepScratch& scratch);

// Like sghmc_step but evaluates the gradient at eff (the masked view of
// st.w) while applying the update to st.w itself; eff must alias st.w for
// plain dense training.
double sghmc_step_masked(SghmcState& st, std::span<const double> eff,
                       const NetworkSpec& spec, const ParamLayout& layout,
                       const Batch& batch, std::span<const double> decay_raw,
                       const StepParams& sp, GaussianSource& noise, StepScratch& scratch);

// ---- natural-gradient VI baseline ---------------------------------------------

struct NgviState {
  std::vector<double> mu, inv_sigma2;
  double gamma = 0.01;     // precision step size
  double lambda = 1e-4;    // precision forgetting rate
  double alpha_exp = 0.5;  // variance preconditioner exponent, 1/2 or 1
  double delta = 0.0;      // prior precision
  double n_data = 1.0;
  std::int64_t t = 0;

  static NgviState init(std::vector<double> mu0, double prec0, double gamma, double lambda,
                        double alpha_exp, double delta, double n_data);
};

// One update: w = mu + sigma.*eps; g = batch-loss gradient at w (no decay);
// 1/sigma2 <- (1-lambda*gamma)/sigma2 + gamma*(g.*g + delta/N);
// mu -= l * (sigma2)^alpha_exp .* (g + (delta/N)*mu).
// Throws NumericError if any precision becomes non-positive or non-finite.
// Returns the batch data loss at the sampled w.
double ngvi_step(NgviState& st, const NetworkSpec& spec, const ParamLayout& layout,
               const Batch& batch, double l, GaussianSource& noise, StepScratch& scratch);

}  // namespace bnprune
