#include "bnprune/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bnprune {

namespace {

std::string trim(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* first = value.data();
  const char* last = first + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
  }
  return out;
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  std::int64_t out = 0;
  const char* first = value.data();
  const char* last = first + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(static_cast<int>(parse_int(key, trim(item))));
  }
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

KMode parse_k_mode(const std::string& key, const std::string& value) {
  if (value == "sqrtN") return KMode::sqrt_n;
  if (value == "coldN") return KMode::cold_n;
  if (value == "custom") return KMode::custom;
  throw ConfigError("config key '" + key + "': expected sqrtN|coldN|custom, got '" +
                    value + "'");
}

}  // namespace

RawConfig RawConfig::parse(const std::string& text) {
  RawConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
    }
    if (!cfg.kv_.emplace(key, value).second) {
      throw ConfigError("duplicate config key: " + key);
    }
  }
  return cfg;
}

bool RawConfig::has(const std::string& key) const { return kv_.contains(key); }

std::string RawConfig::take(const std::string& key) {
  used_.insert(key);
  return kv_.at(key);
}

std::string RawConfig::require_string(const std::string& key) {
  if (!has(key)) throw ConfigError("missing required config key: " + key);
  return take(key);
}

std::string RawConfig::get_string(const std::string& key, const std::string& def) {
  return has(key) ? take(key) : def;
}

double RawConfig::require_double(const std::string& key) {
  return parse_double(key, require_string(key));
}

double RawConfig::get_double(const std::string& key, double def) {
  return has(key) ? parse_double(key, take(key)) : def;
}

std::int64_t RawConfig::require_int(const std::string& key) {
  return parse_int(key, require_string(key));
}

std::int64_t RawConfig::get_int(const std::string& key, std::int64_t def) {
  return has(key) ? parse_int(key, take(key)) : def;
}

std::uint64_t RawConfig::get_u64(const std::string& key, std::uint64_t def) {
  if (!has(key)) return def;
  const std::int64_t v = parse_int(key, take(key));
  if (v < 0) throw ConfigError("config key '" + key + "': must be non-negative");
  return static_cast<std::uint64_t>(v);
}

bool RawConfig::get_bool(const std::string& key, bool def) {
  if (!has(key)) return def;
  const std::string v = take(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key '" + key + "': expected true|false, got '" + v + "'");
}

void RawConfig::finish() const {
  std::string unknown;
  for (const auto& [key, value] : kv_) {
    if (!used_.contains(key)) {
      if (!unknown.empty()) unknown += ", ";
      unknown += key;
    }
  }
  if (!unknown.empty()) throw ConfigError("unknown config key: " + unknown);
}

double RunConfig::k_value(std::size_t n_data) const {
  switch (k_mode) {
    case KMode::sqrt_n:
      return 1.0 / std::sqrt(static_cast<double>(n_data));
    case KMode::cold_n:
      return 1.0 / static_cast<double>(n_data);
    case KMode::custom:
      return k_custom;
  }
  return 0.0;
}

void RunConfig::validate() const {
  // Nested specs raise SpecError when used directly; at the config surface
  // everything is a ConfigError.
  try {
    net.validate();
    ss.validate();
  } catch (const SpecError& e) {
    throw ConfigError(e.what());
  }
  if (l0 <= 0) throw ConfigError("opt.l0 must be positive");
  if (beta1 < 0 || beta1 >= 1) throw ConfigError("opt.beta1 must lie in [0, 1)");
  if (beta2 <= 0) throw ConfigError("opt.beta2 must be positive");
  if (cycles < 1) throw ConfigError("opt.cycles must be at least 1");
  if (eta_scale < 0) throw ConfigError("opt.eta_scale must be non-negative");
  if (tau0 <= 0 || tau0 >= 1) throw ConfigError("opt.tau0 must lie in (0, 1)");
  if (k_mode == KMode::custom && k_custom < 0) {
    throw ConfigError("opt.k_custom must be non-negative");
  }
  if (opt == OptKind::ngvi) {
    if (ngvi_gamma <= 0) throw ConfigError("opt.ngvi_gamma must be positive");
    if (ngvi_lambda < 0) throw ConfigError("opt.ngvi_lambda must be non-negative");
    if (ngvi_alpha != 0.5 && ngvi_alpha != 1.0) {
      throw ConfigError("opt.ngvi_alpha must be 0.5 or 1");
    }
    if (ngvi_prec0 <= 0) throw ConfigError("opt.ngvi_prec0 must be positive");
  }
  if (ss_warmup_frac < 0 || ss_warmup_frac >= 1) {
    throw ConfigError("ss.warmup_frac must lie in [0, 1)");
  }
  if (ss_interval < 0) throw ConfigError("ss.interval must be non-negative");
  if (data_example < 0 || data_example > 3) {
    throw ConfigError("data.example must be 1, 2 or 3");
  }
  if (data_example == 0 && data_csv.empty()) {
    throw ConfigError("either data.example or data.csv is required");
  }
  if (data_example != 0 && !data_csv.empty()) {
    throw ConfigError("data.example and data.csv are mutually exclusive");
  }
  if (data_example != 0 && n_train == 0) throw ConfigError("data.n_train must be positive");
  if (epochs < 1) throw ConfigError("train.epochs must be at least 1");
  if (batch < 1) throw ConfigError("train.batch must be at least 1");
  if (snapshots_per_cycle < 1) {
    throw ConfigError("train.snapshots_per_cycle must be at least 1");
  }
}

RunConfig parse_config(const std::string& text) {
  RawConfig raw = RawConfig::parse(text);
  RunConfig cfg;

  cfg.net.layer_sizes = parse_int_list("net.sizes", raw.require_string("net.sizes"));
  const std::string act = raw.get_string("net.activation", "relu");
  Activation a;
  if (act == "relu") {
    a = Activation::relu;
  } else if (act == "tanh") {
    a = Activation::tanh_;
  } else {
    throw ConfigError("config key 'net.activation': expected relu|tanh, got '" + act + "'");
  }
  const int hidden = static_cast<int>(cfg.net.layer_sizes.size()) - 2;
  cfg.net.activations.assign(static_cast<std::size_t>(hidden > 0 ? hidden : 0), a);
  if (!raw.get_bool("net.bias", true)) {
    cfg.net.include_bias.assign(cfg.net.layer_sizes.size() - 1, 0);
  }

  cfg.data_example = static_cast<int>(raw.get_int("data.example", 0));
  cfg.data_seed = raw.get_u64("data.seed", 1);
  cfg.n_train = static_cast<std::size_t>(raw.get_int("data.n_train", 10000));
  cfg.n_test = static_cast<std::size_t>(raw.get_int("data.n_test", 1000));
  cfg.p = static_cast<std::size_t>(raw.get_int("data.p", 0));
  cfg.data_csv = raw.get_string("data.csv", "");

  const std::string out =
      raw.get_string("net.output", cfg.data_example == 3 ? "logistic" : "regression");
  if (out == "regression") {
    cfg.net.output = OutputKind::regression;
  } else if (out == "logistic") {
    cfg.net.output = OutputKind::logistic;
  } else {
    throw ConfigError("config key 'net.output': expected regression|logistic, got '" +
                      out + "'");
  }

  const std::string kind = raw.require_string("opt.kind");
  if (kind == "ngvi") {
    cfg.opt = OptKind::ngvi;
  } else if (kind == "cv-adam") {
    cfg.opt = OptKind::cv_adam;
  } else if (kind == "sghmc") {
    cfg.opt = OptKind::sghmc;
  } else if (kind == "em-mcmc") {
    cfg.opt = OptKind::em_mcmc;
  } else {
    throw ConfigError("config key 'opt.kind': expected ngvi|cv-adam|sghmc|em-mcmc, got '" +
                      kind + "'");
  }
  cfg.beta1 = raw.get_double("opt.beta1", cfg.beta1);
  cfg.beta2 = raw.get_double("opt.beta2", cfg.beta2);
  cfg.l0 = raw.require_double("opt.l0");
  cfg.cycles = static_cast<int>(raw.get_int("opt.cycles", cfg.cycles));
  cfg.k_mode = parse_k_mode("opt.k_mode", raw.get_string("opt.k_mode", "sqrtN"));
  cfg.k_custom = raw.get_double("opt.k_custom", cfg.k_custom);
  cfg.eta_scale = raw.get_double("opt.eta_scale", cfg.eta_scale);
  cfg.freeze_tau = raw.get_bool("opt.freeze_tau", cfg.freeze_tau);
  cfg.tau0 = raw.get_double("opt.tau0", cfg.tau0);
  cfg.ngvi_gamma = raw.get_double("opt.ngvi_gamma", cfg.ngvi_gamma);
  cfg.ngvi_lambda = raw.get_double("opt.ngvi_lambda", cfg.ngvi_lambda);
  cfg.ngvi_alpha = raw.get_double("opt.ngvi_alpha", cfg.ngvi_alpha);
  cfg.ngvi_prec0 = raw.get_double("opt.ngvi_prec0", cfg.ngvi_prec0);

  cfg.ss.delta0 = raw.get_double("ss.delta0", cfg.ss.delta0);
  cfg.ss.delta1 = raw.get_double("ss.delta1", cfg.ss.delta1);
  cfg.ss.lambda1 = raw.get_double("ss.lambda1", cfg.ss.lambda1);
  cfg.ss.lambda2 = raw.get_double("ss.lambda2", cfg.ss.lambda2);
  const std::string mode = raw.get_string("ss.mode", "dfp");
  if (mode == "dfp") {
    cfg.ss.mode = PruneMode::dfp;
  } else if (mode == "dpf") {
    cfg.ss.mode = PruneMode::dpf;
  } else {
    throw ConfigError("config key 'ss.mode': expected dfp|dpf, got '" + mode + "'");
  }
  const std::string rule = raw.get_string("ss.rule", "l2");
  if (rule == "l2") {
    cfg.ss.rule = PruneRule::l2;
  } else if (rule == "concentration") {
    cfg.ss.rule = PruneRule::concentration;
  } else {
    throw ConfigError("config key 'ss.rule': expected concentration|l2, got '" + rule +
                      "'");
  }
  cfg.ss_warmup_frac = raw.get_double("ss.warmup_frac", cfg.ss_warmup_frac);
  cfg.ss_interval = raw.get_int("ss.interval", cfg.ss_interval);
  const std::string scope = raw.get_string("ss.scope", "first");
  if (scope == "first") {
    cfg.ss_scope = HardScope::first;
  } else if (scope == "all") {
    cfg.ss_scope = HardScope::all;
  } else {
    throw ConfigError("config key 'ss.scope': expected first|all, got '" + scope + "'");
  }
  const std::string scheme = raw.get_string("ss.scheme", "input");
  if (scheme == "input") {
    cfg.ss_scheme = GroupScheme::input;
  } else if (scheme == "output") {
    cfg.ss_scheme = GroupScheme::output;
  } else if (scheme == "both") {
    cfg.ss_scheme = GroupScheme::both;
  } else {
    throw ConfigError("config key 'ss.scheme': expected input|output|both, got '" +
                      scheme + "'");
  }

  cfg.epochs = raw.require_int("train.epochs");
  cfg.batch = static_cast<std::size_t>(raw.get_int("train.batch", 500));
  cfg.train_seed = raw.get_u64("train.seed", 1);
  cfg.snapshots_per_cycle =
      static_cast<int>(raw.get_int("train.snapshots_per_cycle", 3));

  raw.finish();
  cfg.validate();
  return cfg;
}

namespace {

void parse_verify_common(RawConfig& raw, std::size_t& n_data, double& delta,
                         double& mu_true, std::uint64_t& seed, std::size_t& samples,
                         std::size_t& burnin, double& tau0, double& beta2, KMode& k_mode,
                         double& k_custom, double& mean_tol, double& var_rel_tol) {
  n_data = static_cast<std::size_t>(raw.get_int("verify.n", static_cast<std::int64_t>(n_data)));
  delta = raw.get_double("verify.delta", delta);
  mu_true = raw.get_double("verify.mu_true", mu_true);
  seed = raw.get_u64("verify.seed", seed);
  samples = static_cast<std::size_t>(
      raw.get_int("verify.samples", static_cast<std::int64_t>(samples)));
  burnin = static_cast<std::size_t>(
      raw.get_int("verify.burnin", static_cast<std::int64_t>(burnin)));
  tau0 = raw.get_double("verify.tau0", tau0);
  beta2 = raw.get_double("verify.beta2", beta2);
  k_mode = parse_k_mode("verify.k_mode", raw.get_string("verify.k_mode", "sqrtN"));
  k_custom = raw.get_double("verify.k_custom", k_custom);
  mean_tol = raw.get_double("verify.mean_tol", mean_tol);
  var_rel_tol = raw.get_double("verify.var_tol", var_rel_tol);
}

void validate_verify_common(std::size_t n_data, double delta, std::size_t samples,
                            double tau0, double beta2, double mean_tol,
                            double var_rel_tol) {
  if (n_data < 1) throw ConfigError("verify.n must be positive");
  if (delta <= 0) throw ConfigError("verify.delta must be positive");
  if (samples < 1) throw ConfigError("verify.samples must be positive");
  if (tau0 <= 0 || tau0 >= 1) throw ConfigError("verify.tau0 must lie in (0, 1)");
  if (beta2 <= 0) throw ConfigError("verify.beta2 must be positive");
  if (mean_tol <= 0 || var_rel_tol <= 0) {
    throw ConfigError("verify tolerances must be positive");
  }
}

}  // namespace

void VerifySamplerConfig::validate() const {
  validate_verify_common(n_data, delta, samples, tau0, beta2, mean_tol, var_rel_tol);
  if (dt <= 0) throw ConfigError("verify.dt must be positive");
  if (h <= 0) throw ConfigError("verify.h must be positive");
  if (h * dt >= 1) throw ConfigError("verify.h * verify.dt must stay below 1");
}

void VerifyEquivalenceConfig::validate() const {
  validate_verify_common(n_data, delta, samples, tau0, beta2, mean_tol, var_rel_tol);
  if (l <= 0) throw ConfigError("verify.l must be positive");
  if (h <= 0) throw ConfigError("verify.h must be positive");
  if (h * std::sqrt(l) >= 1) {
    throw ConfigError("verify.h * sqrt(verify.l) must stay below 1");
  }
}

VerifySamplerConfig parse_verify_sampler(const std::string& text) {
  RawConfig raw = RawConfig::parse(text);
  VerifySamplerConfig cfg;
  parse_verify_common(raw, cfg.n_data, cfg.delta, cfg.mu_true, cfg.seed, cfg.samples,
                      cfg.burnin, cfg.tau0, cfg.beta2, cfg.k_mode, cfg.k_custom,
                      cfg.mean_tol, cfg.var_rel_tol);
  cfg.dt = raw.get_double("verify.dt", cfg.dt);
  cfg.h = raw.get_double("verify.h", cfg.h);
  raw.finish();
  cfg.validate();
  return cfg;
}

VerifyEquivalenceConfig parse_verify_equivalence(const std::string& text) {
  RawConfig raw = RawConfig::parse(text);
  VerifyEquivalenceConfig cfg;
  parse_verify_common(raw, cfg.n_data, cfg.delta, cfg.mu_true, cfg.seed, cfg.samples,
                      cfg.burnin, cfg.tau0, cfg.beta2, cfg.k_mode, cfg.k_custom,
                      cfg.mean_tol, cfg.var_rel_tol);
  cfg.l = raw.get_double("verify.l", cfg.l);
  cfg.h = raw.get_double("verify.h", cfg.h);
  raw.finish();
  cfg.validate();
  return cfg;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace bnprune
