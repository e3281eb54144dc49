#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "bnprune/checkpoint.hpp"
#include "bnprune/config.hpp"
#include "bnprune/trainer.hpp"
#include "bnprune/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bnprune;

namespace {

struct GenArgs {
  int example = 1;
  long long n_train = 10000;
  long long n_test = 1000;
  long long p = 0;
  long long seed = 1;
  std::string out;
};

int run_gen_data(const GenArgs& a) {
  if (a.n_train + a.n_test <= 0) {
    throw ConfigError("need at least one of --n-train/--n-test to be positive");
  }
  const std::size_t p =
      a.p > 0 ? static_cast<std::size_t>(a.p) : default_p(a.example);
  const Rng base(static_cast<std::uint64_t>(a.seed));

  SimDataset all;
  all.p = p;
  if (a.n_train > 0) {
    all = gen_predictors(static_cast<std::size_t>(a.n_train), p, base.fork(10));
    gen_response(a.example, all, base.fork(11));
  }
  if (a.n_test > 0) {
    SimDataset test =
        gen_predictors(static_cast<std::size_t>(a.n_test), p, base.fork(20));
    gen_response(a.example, test, base.fork(21));
    all.x.insert(all.x.end(), test.x.begin(), test.x.end());
    all.y.insert(all.y.end(), test.y.begin(), test.y.end());
    all.n += test.n;
  }
  write_csv(all, a.out);
  std::printf("wrote %zu rows (%lld train + %lld test), p=%zu to %s\n", all.n, a.n_train,
              a.n_test, p, a.out.c_str());
  return 0;
}

void write_metrics_csv(const std::vector<MetricsRecord>& recs, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw ConfigError("cannot open for writing: " + path);
  std::fprintf(f, "epoch,train_loss,test_metric,lr,hard_sparsity,soft_sparsity,snapshots\n");
  for (const MetricsRecord& r : recs) {
    std::fprintf(f, "%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                 static_cast<long long>(r.epoch), r.train_loss, r.test_metric, r.lr,
                 r.hard_sparsity, r.soft_sparsity, r.snapshots);
  }
  std::fclose(f);
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

const char* opt_kind_name(OptKind k) {
  switch (k) {
    case OptKind::ngvi:
      return "ngvi";
    case OptKind::cv_adam:
      return "cv-adam";
    case OptKind::sghmc:
      return "sghmc";
    case OptKind::em_mcmc:
      return "em-mcmc";
  }
  return "?";
}

int run_train(const std::string& config_path, const std::string& out_dir,
              const CLI::Option* seed_opt, long long seed_override) {
  RunConfig cfg = parse_config(read_text_file(config_path));
  if (seed_opt->count() > 0) {
    cfg.train_seed = static_cast<std::uint64_t>(seed_override);
  }
  cfg.out_dir = out_dir;
  fs::create_directories(out_dir);

  const TrainResult res = train_run(cfg);

  write_metrics_csv(res.metrics, out_dir + "/metrics.csv");
  write_checkpoint(res.to_checkpoint(), out_dir + "/checkpoint.bin");

  json j;
  j["optimizer"] = opt_kind_name(cfg.opt);
  j["example"] = cfg.data_example;
  j["seed"] = res.seed;
  j["epochs"] = cfg.epochs;
  j["iterations"] = res.iterations;
  j["selected"] = res.selection.selected;
  j["s_hat"] = res.selection.s_hat;
  j["fdr"] = res.selection.fdr;
  j["fndr"] = res.selection.fndr;
  j["hard_sparsity"] = res.metrics.back().hard_sparsity;
  j["soft_sparsity"] = res.metrics.back().soft_sparsity;
  j["snapshots"] = res.snapshots.members.size();
  j["truth"] = res.truth;
  if (res.test_rows > 0) {
    if (res.spec.output == OutputKind::regression) {
      j["test_mse"] = res.ensemble_test.mse;
    } else {
      j["test_accuracy"] = res.ensemble_test.accuracy;
    }
  }
  write_json_file(j, out_dir + "/report.json");

  std::printf("trained %lld iterations; s_hat=%zu fdr=%g fndr=%g\n",
              static_cast<long long>(res.iterations), res.selection.s_hat,
              res.selection.fdr, res.selection.fndr);
  return 0;
}

int run_evaluate(const std::string& ckpt_path, const std::string& data_path,
                 const std::string& out_path) {
  const Checkpoint ckpt = read_checkpoint(ckpt_path);
  ckpt.spec.validate();
  const ParamLayout layout = build_layout(ckpt.spec);
  const SimDataset data = read_csv(data_path);
  if (static_cast<int>(data.p) != ckpt.spec.layer_sizes.front()) {
    throw ConfigError("csv width does not match the checkpoint architecture");
  }

  std::vector<double> pred(data.n);
  ensemble_predict(ckpt.spec, layout, ckpt.snapshots, data.batch(), pred);
  const PredictiveMetrics pm = predictive_metrics(ckpt.spec.output, pred, data.y);

  json j;
  j["rows"] = data.n;
  j["ensemble_members"] = ckpt.snapshots.members.size();
  j["iteration"] = ckpt.iteration;
  j["seed"] = ckpt.seed;
  if (ckpt.alive.size() == layout.size) {
    j["selected"] = selected_variables(layout, ckpt.alive);
  }
  if (ckpt.spec.output == OutputKind::regression) {
    j["mse"] = pm.mse;
  } else {
    j["accuracy"] = pm.accuracy;
  }
  write_json_file(j, out_path);

  if (ckpt.spec.output == OutputKind::regression) {
    std::printf("evaluated %zu rows: mse=%.17g\n", data.n, pm.mse);
  } else {
    std::printf("evaluated %zu rows: accuracy=%.17g\n", data.n, pm.accuracy);
  }
  return 0;
}

json moment_json(const MomentSummary& m) { return json{{"mean", m.mean}, {"var", m.var}}; }

int run_verify_sampler(const std::string& config_path) {
  const VerifySamplerConfig cfg = parse_verify_sampler(read_text_file(config_path));
  const SamplerVerifyReport rep = verify_sghmc_gaussian(cfg);

  json j;
  j["n"] = cfg.n_data;
  j["delta"] = cfg.delta;
  j["dt"] = cfg.dt;
  j["beta1"] = rep.beta1;
  j["beta2"] = cfg.beta2;
  j["k"] = rep.k;
  j["samples"] = cfg.samples;
  j["burnin"] = cfg.burnin;
  j["analytic"] = json{{"mean", rep.analytic_mean}, {"var", rep.analytic_var}};
  j["chain"] = moment_json(rep.chain);
  j["mean_err"] = rep.mean_err;
  j["var_rel_err"] = rep.var_rel_err;
  j["tolerance"] = json{{"mean", cfg.mean_tol}, {"var_rel", cfg.var_rel_tol}};
  j["pass"] = rep.pass;
  std::printf("%s\n", j.dump(2).c_str());
  return rep.pass ? 0 : 1;
}

int run_verify_equivalence(const std::string& config_path) {
  const VerifyEquivalenceConfig cfg = parse_verify_equivalence(read_text_file(config_path));
  const EquivalenceReport rep = verify_equivalence(cfg);

  json j;
  j["n"] = cfg.n_data;
  j["delta"] = cfg.delta;
  j["l"] = cfg.l;
  j["h"] = cfg.h;
  j["k"] = rep.k;
  j["samples"] = cfg.samples;
  j["burnin"] = cfg.burnin;
  j["dt_mapped"] = rep.dt_mapped;
  j["dt_direct"] = rep.dt_direct;
  j["beta1_mapped"] = rep.beta1_mapped;
  j["beta1_direct"] = rep.beta1_direct;
  j["beta1_control"] = rep.beta1_control;
  j["analytic"] = json{{"mean", rep.analytic_mean}, {"var", rep.analytic_var}};
  j["mapped"] = moment_json(rep.mapped);
  j["direct"] = moment_json(rep.direct);
  j["control"] = moment_json(rep.control);
  j["optimizer_mu"] = moment_json(rep.optimizer_mu);
  j["mean_diff"] = rep.mean_diff;
  j["var_rel_diff"] = rep.var_rel_diff;
  j["control_var_rel_diff"] = rep.control_var_rel_diff;
  j["tolerance"] = json{{"mean", cfg.mean_tol}, {"var_rel", cfg.var_rel_tol}};
  j["pass"] = rep.pass;
  std::printf("%s\n", j.dump(2).c_str());
  return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse Bayesian network training, pruning and verification"};
  app.require_subcommand(1);

  GenArgs ga;
  CLI::App* gen = app.add_subcommand("gen-data", "Generate a benchmark dataset csv");
  gen->add_option("--example", ga.example, "Benchmark example id")
      ->required()
      ->check(CLI::Range(1, 3));
  gen->add_option("--n-train", ga.n_train, "Training rows (default 10000)");
  gen->add_option("--n-test", ga.n_test, "Test rows appended after the training rows");
  gen->add_option("--p", ga.p, "Predictor count (default: the example's)");
  gen->add_option("--seed", ga.seed, "Data seed");
  gen->add_option("--out", ga.out, "Output csv path")->required();

  std::string train_config, train_out;
  long long seed_override = 0;
  CLI::App* tr = app.add_subcommand("train", "Train a run described by a config file");
  tr->add_option("--config", train_config, "Config file")->required();
  tr->add_option("--out-dir", train_out, "Output directory")->required();
  CLI::Option* seed_opt = tr->add_option("--seed", seed_override, "Override train.seed");

  std::string eval_ckpt, eval_data, eval_out;
  CLI::App* ev = app.add_subcommand("evaluate", "Ensemble-predict a csv from a checkpoint");
  ev->add_option("--checkpoint", eval_ckpt, "Checkpoint file")->required();
  ev->add_option("--data", eval_data, "Dataset csv")->required();
  ev->add_option("--out", eval_out, "Report json path")->required();

  std::string vs_config;
  CLI::App* vs = app.add_subcommand("verify-sampler",
                                    "Check sampler moments against a conjugate posterior");
  vs->add_option("--config", vs_config, "Config file")->required();

  std::string ve_config;
  CLI::App* ve = app.add_subcommand(
      "verify-equivalence", "Compare the two sampler parameterizations on one target");
  ve->add_option("--config", ve_config, "Config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return run_gen_data(ga);
    if (tr->parsed()) return run_train(train_config, train_out, seed_opt, seed_override);
    if (ev->parsed()) return run_evaluate(eval_ckpt, eval_data, eval_out);
    if (vs->parsed()) return run_verify_sampler(vs_config);
    if (ve->parsed()) return run_verify_equivalence(ve_config);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
