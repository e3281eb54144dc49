#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

#include "bnprune/groups.hpp"
#include "bnprune/network.hpp"
#include "bnprune/spikeslab.hpp"

namespace bnprune {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key=value text with '#' comments. Typed getters mark keys consumed;
// finish() rejects anything left over so a misspelled key cannot pass
// silently.
class RawConfig {
 public:
  static RawConfig parse(const std::string& text);

  bool has(const std::string& key) const;
  std::string require_string(const std::string& key);
  std::string get_string(const std::string& key, const std::string& def);
  double require_double(const std::string& key);
  double get_double(const std::string& key, double def);
  std::int64_t require_int(const std::string& key);
  std::int64_t get_int(const std::string& key, std::int64_t def);
  std::uint64_t get_u64(const std::string& key, std::uint64_t def);
  bool get_bool(const std::string& key, bool def);
  void finish() const;

 private:
  std::string take(const std::string& key);

  std::map<std::string, std::string> kv_;
  std::set<std::string> used_;
};

enum class OptKind { ngvi, cv_adam, sghmc, em_mcmc };
enum class KMode { sqrt_n, cold_n, custom };
enum class HardScope { first, all };

struct RunConfig {
  NetworkSpec net;

  OptKind opt = OptKind::em_mcmc;
  double beta1 = 0.9;
  double beta2 = 1.0;
  double l0 = 0.0;
  int cycles = 1;
  KMode k_mode = KMode::sqrt_n;
  double k_custom = 0.0;
  double eta_scale = 0.1;
  bool freeze_tau = false;
  double tau0 = 0.5;
  double ngvi_gamma = 0.01;
  double ngvi_lambda = 1e-4;
  double ngvi_alpha = 0.5;
  double ngvi_prec0 = 100.0;

  SpikeSlabConfig ss;
  double ss_warmup_frac = 0.25;
  std::int64_t ss_interval = 0;  // iterations between EM scans; 0 = once per epoch
  HardScope ss_scope = HardScope::first;
  GroupScheme ss_scheme = GroupScheme::input;

  int data_example = 0;  // 0 = csv source
  std::uint64_t data_seed = 1;
  std::size_t n_train = 10000;
  std::size_t n_test = 1000;
  std::size_t p = 0;  // 0 = example default
  std::string data_csv;

  std::int64_t epochs = 0;
  std::size_t batch = 500;
  std::uint64_t train_seed = 1;
  int snapshots_per_cycle = 3;

  std::string out_dir;  // filled by the command line, not the config file

  double k_value(std::size_t n_data) const;
  void validate() const;
};

RunConfig parse_config(const std::string& text);

// Conjugate-posterior check of the sampler: y_i = w + noise, prior
// w ~ Normal(0, 1/delta), sampled with a one-parameter linear net.
struct VerifySamplerConfig {
  std::size_t n_data = 100;
  double delta = 1.0;
  double mu_true = 0.5;
  std::uint64_t seed = 1;
  std::size_t samples = 200000;
  std::size_t burnin = 20000;
  double dt = 0.03;
  double h = 1.0;  // friction rate; momentum decay is 1 - h*dt
  double tau0 = 0.5;
  double beta2 = 1.0;
  KMode k_mode = KMode::sqrt_n;
  double k_custom = 0.0;
  double mean_tol = 0.02;
  double var_rel_tol = 0.15;

  void validate() const;
};

// Two-sampler comparison on the same conjugate target: a learning-rate
// parameterized chain mapped through equivalence_params against a directly
// parameterized one, plus a deliberately mis-mapped control.
struct VerifyEquivalenceConfig {
  std::size_t n_data = 100;
  double delta = 1.0;
  double mu_true = 0.5;
  std::uint64_t seed = 1;
  std::size_t samples = 200000;
  std::size_t burnin = 20000;
  double l = 0.01;
  double h = 1.0;
  double tau0 = 0.5;
  double beta2 = 1.0;
  KMode k_mode = KMode::sqrt_n;
  double k_custom = 0.0;
  double mean_tol = 0.02;
  double var_rel_tol = 0.20;

  void validate() const;
};

VerifySamplerConfig parse_verify_sampler(const std::string& text);
VerifyEquivalenceConfig parse_verify_equivalence(const std::string& text);

std::string read_text_file(const std::string& path);

}  // namespace bnprune
