#include "bnprune/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bnprune/schedule.hpp"

namespace bnprune {

namespace {

void fisher_yates(std::vector<std::uint32_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_u64() % i);
    std::swap(idx[i - 1], idx[j]);
  }
}

// Groups the hard-prune rule scans, per configured rule and scope.
GroupPartition hard_partition(const NetworkSpec& spec, const ParamLayout& layout,
                              const RunConfig& cfg) {
  const GroupScheme scheme =
      cfg.ss.rule == PruneRule::concentration ? GroupScheme::both : GroupScheme::input;
  GroupPartition part = group_partition(spec, layout, scheme);
  if (cfg.ss_scope == HardScope::first) {
    std::vector<Group> kept;
    for (Group& g : part.groups) {
      if (g.layer == 0 && g.kind == GroupKind::input_unit) kept.push_back(std::move(g));
    }
    part.groups = std::move(kept);
    part.scheme = GroupScheme::input;
  }
  return part;
}

struct EvalBuffers {
  std::vector<double> pred;
  NetScratch net;
};

double test_metric_value(const NetworkSpec& spec, const ParamLayout& layout,
                         std::span<const double> params, const SimDataset& test,
                         EvalBuffers& ev) {
  if (test.n == 0) return std::numeric_limits<double>::quiet_NaN();
  ev.pred.resize(test.n);
  forward(spec, layout, params, test.batch(), ev.pred, ev.net);
  const PredictiveMetrics pm = predictive_metrics(spec.output, ev.pred, test.y);
  return spec.output == OutputKind::regression ? pm.mse : pm.accuracy;
}

void zero_frozen(std::span<const std::uint8_t> alive, std::vector<double>& w,
                 std::vector<double>& v) {
  for (std::size_t i = 0; i < alive.size(); ++i) {
    if (!alive[i]) {
      w[i] = 0.0;
      v[i] = 0.0;
    }
  }
}

}  // namespace

LoadedData load_data(const RunConfig& cfg) {
  LoadedData d;
  if (cfg.data_example != 0) {
    const std::size_t p = cfg.p != 0 ? cfg.p : default_p(cfg.data_example);
    const Rng base(cfg.data_seed);
    d.train = gen_predictors(cfg.n_train, p, base.fork(10));
    gen_response(cfg.data_example, d.train, base.fork(11));
    if (cfg.n_test > 0) {
      d.test = gen_predictors(cfg.n_test, p, base.fork(20));
      gen_response(cfg.data_example, d.test, base.fork(21));
    } else {
      d.test.p = p;
    }
    d.truth = truth_variables(cfg.data_example);
  } else {
    SimDataset all = read_csv(cfg.data_csv);
    if (all.n <= cfg.n_train) {
      throw ConfigError("csv needs more rows than data.n_train (the rest become the test split)");
    }
    const std::size_t nt = cfg.n_train;
    d.train.n = nt;
    d.train.p = all.p;
    d.train.x.assign(all.x.begin(), all.x.begin() + static_cast<std::ptrdiff_t>(nt * all.p));
    d.train.y.assign(all.y.begin(), all.y.begin() + static_cast<std::ptrdiff_t>(nt));
    d.test.n = all.n - nt;
    d.test.p = all.p;
    d.test.x.assign(all.x.begin() + static_cast<std::ptrdiff_t>(nt * all.p), all.x.end());
    d.test.y.assign(all.y.begin() + static_cast<std::ptrdiff_t>(nt), all.y.end());
  }
  return d;
}

TrainResult train_on(const RunConfig& cfg, const SimDataset& train,
                     const SimDataset& test, std::vector<int> truth,
                     const TrainHooks* hooks) {
  NetworkSpec spec = cfg.net;
  spec.validate();
  if (spec.layer_sizes.front() != static_cast<int>(train.p)) {
    throw ConfigError("net.sizes input width does not match the data");
  }
  if (train.n == 0) throw ConfigError("empty training set");
  if (cfg.batch > train.n) throw ConfigError("train.batch exceeds the training size");

  const ParamLayout layout = build_layout(spec);
  const Rng base(cfg.train_seed);
  Rng init_rng = base.fork(1);
  Rng noise_rng = base.fork(2);
  Rng shuffle_rng = base.fork(3);
  ParamStore store = build_network(spec, init_rng);

  const std::size_t n = train.n;
  const std::size_t bsz = cfg.batch;
  const std::int64_t ipe = static_cast<std::int64_t>((n + bsz - 1) / bsz);
  const std::int64_t total = cfg.epochs * ipe;
  const std::int64_t warmup =
      static_cast<std::int64_t>(cfg.ss_warmup_frac * static_cast<double>(total));
  const std::int64_t interval = cfg.ss_interval > 0 ? cfg.ss_interval : ipe;
  const std::int64_t clen = cycle_length(total, cfg.cycles);
  const double k = cfg.k_value(n);
  const bool em = cfg.opt == OptKind::em_mcmc;

  const GroupPartition em_part = group_partition(spec, layout, cfg.ss_scheme);
  const GroupPartition hard_part = hard_partition(spec, layout, cfg);

  MaskState mask;
  mask.mode = cfg.ss.mode;
  mask.soft.assign(em_part.n_groups(), 1);
  mask.hard.assign(hard_part.n_groups(), 1);
  mask.alive.assign(layout.size, 1);
  mask.decay_raw =
      decay_vector(layout, em_part, mask.soft, cfg.ss.delta0, cfg.ss.delta1, 1.0);

  CvAdamState adam;
  SghmcState hmc;
  NgviState ngvi;
  switch (cfg.opt) {
    case OptKind::cv_adam:
      adam = CvAdamState::init(store.values, cfg.tau0, cfg.beta1, cfg.beta2,
                               static_cast<double>(n));
      adam.freeze_tau = cfg.freeze_tau;
      break;
    case OptKind::ngvi:
      ngvi = NgviState::init(store.values, cfg.ngvi_prec0, cfg.ngvi_gamma, cfg.ngvi_lambda,
                             cfg.ngvi_alpha, cfg.ss.delta1, static_cast<double>(n));
      break;
    default:
      hmc = SghmcState::init(store.values, cfg.tau0, cfg.beta1, cfg.beta2,
                             static_cast<double>(n));
      hmc.freeze_tau = cfg.freeze_tau;
      break;
  }

  RngGaussian noise(noise_rng);
  StepScratch scratch;
  EvalBuffers ev;
  std::vector<double> effective(layout.size, 0.0);
  std::vector<std::uint8_t> keep(hard_part.n_groups());
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::vector<double> xb(bsz * train.p), yb(bsz);

  TrainResult res;
  res.spec = spec;
  res.layout = layout;
  res.example_id = cfg.data_example;
  res.seed = cfg.train_seed;
  res.iterations = total;
  res.test_rows = test.n;

  std::int64_t t = 0;
  for (std::int64_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    fisher_yates(order, shuffle_rng);
    double loss_sum = 0.0;
    double last_l = 0.0;
    for (std::int64_t b = 0; b < ipe; ++b) {
      ++t;
      const double l_t = cyclical_lr(t, total, cfg.cycles, cfg.l0);
      last_l = l_t;
      const std::size_t lo = static_cast<std::size_t>(b) * bsz;
      const std::size_t hi = std::min(n, lo + bsz);
      const std::size_t bn = hi - lo;
      for (std::size_t i = 0; i < bn; ++i) {
        const std::size_t row = order[lo + i];
        std::copy_n(train.x.begin() + static_cast<std::ptrdiff_t>(row * train.p), train.p,
                    xb.begin() + static_cast<std::ptrdiff_t>(i * train.p));
        yb[i] = train.y[row];
      }
      const Batch batch{xb.data(), yb.data(), bn, train.p};
      StepParams sp;
      sp.l = l_t;
      sp.eta = cfg.eta_scale * l_t;
      sp.k = k;

      switch (cfg.opt) {
        case OptKind::ngvi:
          loss_sum += ngvi_step(ngvi, spec, layout, batch, l_t, noise, scratch);
          if (hooks && hooks->after_step) hooks->after_step(t, ngvi.mu, ngvi.mu, mask);
          break;
        case OptKind::cv_adam:
          sp.alpha = k * std::pow(l_t, 0.75);
          loss_sum +=
              cv_adam_step(adam, spec, layout, batch, mask.decay_raw, sp, noise, scratch);
          if (hooks && hooks->after_step) hooks->after_step(t, adam.mu, adam.mu, mask);
          break;
        default: {
          apply_mask_semantics(hmc.w, mask.alive, mask.mode, effective);
          loss_sum += sghmc_step_masked(hmc, effective, spec, layout, batch,
                                        mask.decay_raw, sp, noise, scratch);
          if (mask.mode == PruneMode::dfp) zero_frozen(mask.alive, hmc.w, hmc.v);
          if (hooks && hooks->after_step) hooks->after_step(t, effective, hmc.w, mask);
          break;
        }
      }

      if (em && t > warmup && (t - warmup) % interval == 0) {
        em_update_softmask(hmc.w, em_part, cfg.ss.lambda1, mask.soft);
        mask.decay_raw =
            decay_vector(layout, em_part, mask.soft, cfg.ss.delta0, cfg.ss.delta1, 1.0);
        if (cfg.ss.rule == PruneRule::l2) {
          prune_l2(hmc.w, hard_part, cfg.ss.lambda1, keep);
        } else {
          prune_concentration(hmc.w, hard_part, cfg.ss.lambda2, keep);
        }
        if (mask.mode == PruneMode::dfp) {
          for (std::size_t g = 0; g < keep.size(); ++g) mask.hard[g] &= keep[g];
        } else {
          mask.hard.assign(keep.begin(), keep.end());
        }
        apply_hard_mask(hard_part, mask.hard, mask.alive);
        if (mask.mode == PruneMode::dfp) zero_frozen(mask.alive, hmc.w, hmc.v);
      }
    }

    std::span<const double> eval_params;
    switch (cfg.opt) {
      case OptKind::ngvi:
        eval_params = ngvi.mu;
        break;
      case OptKind::cv_adam:
        eval_params = adam.mu;
        break;
      default:
        apply_mask_semantics(hmc.w, mask.alive, mask.mode, effective);
        eval_params = effective;
        break;
    }

    const SparsityMetrics sparsity =
        sparsity_metrics(layout, em_part, mask.soft, mask.alive);
    const std::int64_t pos = (t - 1) % clen;
    if (t > warmup &&
        pos >= clen - static_cast<std::int64_t>(cfg.snapshots_per_cycle) * ipe) {
      res.snapshots.members.emplace_back(eval_params.begin(), eval_params.end());
      res.snapshots.epochs.push_back(epoch);
      res.snapshots.cycles.push_back(static_cast<int>((t - 1) / clen) + 1);
    }

    MetricsRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(ipe);
    rec.test_metric = test_metric_value(spec, layout, eval_params, test, ev);
    rec.lr = last_l;
    rec.hard_sparsity = sparsity.hard_sparsity;
    rec.soft_sparsity = sparsity.soft_sparsity;
    rec.snapshots = static_cast<int>(res.snapshots.members.size());
    res.metrics.push_back(rec);
    if (hooks && hooks->after_epoch) {
      std::span<const double> dense;
      switch (cfg.opt) {
        case OptKind::ngvi:
          dense = ngvi.mu;
          break;
        case OptKind::cv_adam:
          dense = adam.mu;
          break;
        default:
          dense = hmc.w;
          break;
      }
      hooks->after_epoch(rec, dense, mask);
    }
  }

  switch (cfg.opt) {
    case OptKind::ngvi:
      res.params = std::move(ngvi.mu);
      break;
    case OptKind::cv_adam:
      res.params = std::move(adam.mu);
      res.rho = std::move(adam.mirror.rho);
      break;
    default:
      res.params = std::move(hmc.w);
      res.rho = std::move(hmc.mirror.rho);
      break;
  }
  if (res.snapshots.members.empty()) {
    std::vector<double> eff(res.params.size());
    apply_mask_semantics(res.params, mask.alive, PruneMode::dpf, eff);
    res.snapshots.members.push_back(std::move(eff));
    res.snapshots.epochs.push_back(cfg.epochs);
    res.snapshots.cycles.push_back(cfg.cycles);
  }
  res.mask = std::move(mask);
  res.truth = std::move(truth);
  res.selection = selection_metrics(selected_variables(layout, res.mask.alive), res.truth,
                                    static_cast<std::size_t>(spec.layer_sizes.front()));
  if (test.n > 0) {
    std::vector<double> pred(test.n);
    ensemble_predict(spec, layout, res.snapshots, test.batch(), pred);
    res.ensemble_test = predictive_metrics(spec.output, pred, test.y);
  }
  return res;
}

TrainResult train_run(const RunConfig& cfg, const TrainHooks* hooks) {
  LoadedData d = load_data(cfg);
  return train_on(cfg, d.train, d.test, std::move(d.truth), hooks);
}

Checkpoint TrainResult::to_checkpoint() const {
  Checkpoint ckpt;
  ckpt.spec = spec;
  ckpt.params = params;
  ckpt.rho = rho;
  ckpt.alive = mask.alive;
  ckpt.soft = mask.soft;
  ckpt.truth = truth;
  ckpt.snapshots = snapshots;
  ckpt.seed = seed;
  ckpt.iteration = iterations;
  ckpt.example_id = example_id;
  return ckpt;
}

}  // namespace bnprune
