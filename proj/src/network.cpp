#include "bnprune/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace bnprune {

namespace {

// C[b, o] = sum_i A[b, i] * W[o, i]  (+ bias[o] when present)
void affine_forward(const double* a, std::size_t n, int fan_in, int fan_out,
                    const double* w, const double* bias, double* c) {
  for (std::size_t b = 0; b < n; ++b) {
    const double* arow = a + b * static_cast<std::size_t>(fan_in);
    double* crow = c + b * static_cast<std::size_t>(fan_out);
    for (int o = 0; o < fan_out; ++o) {
      const double* wrow = w + static_cast<std::size_t>(o) * fan_in;
      double acc = bias ? bias[o] : 0.0;
      for (int i = 0; i < fan_in; ++i) acc += arow[i] * wrow[i];
      crow[o] = acc;
    }
  }
}

// dW[o, i] += sum_b dZ[b, o] * A[b, i];  db[o] += sum_b dZ[b, o]
void accumulate_weight_grad(const double* dz, const double* a, std::size_t n,
                            int fan_in, int fan_out, double* dw, double* db) {
  for (std::size_t b = 0; b < n; ++b) {
    const double* zrow = dz + b * static_cast<std::size_t>(fan_out);
    const double* arow = a + b * static_cast<std::size_t>(fan_in);
    for (int o = 0; o < fan_out; ++o) {
      const double coef = zrow[o];
      if (coef == 0.0) continue;
      double* wrow = dw + static_cast<std::size_t>(o) * fan_in;
      for (int i = 0; i < fan_in; ++i) wrow[i] += coef * arow[i];
      if (db) db[o] += coef;
    }
  }
}

// dA[b, i] = sum_o dZ[b, o] * W[o, i]
void backprop_input(const double* dz, const double* w, std::size_t n,
                    int fan_in, int fan_out, double* da) {
  for (std::size_t b = 0; b < n; ++b) {
    const double* zrow = dz + b * static_cast<std::size_t>(fan_out);
    double* arow = da + b * static_cast<std::size_t>(fan_in);
    std::fill(arow, arow + fan_in, 0.0);
    for (int o = 0; o < fan_out; ++o) {
      const double coef = zrow[o];
      if (coef == 0.0) continue;
      const double* wrow = w + static_cast<std::size_t>(o) * fan_in;
      for (int i = 0; i < fan_in; ++i) arow[i] += coef * wrow[i];
    }
  }
}

void check_finite(const std::vector<double>& block, int layer) {
  for (double v : block) {
    if (!std::isfinite(v)) {
      throw NumericError("non-finite activation in layer " + std::to_string(layer));
    }
  }
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// Runs all layers, filling scratch.act; returns the final pre-activation
// block (regression output or logits).
const std::vector<double>& run_layers(const NetworkSpec& spec, const ParamLayout& layout,
                                      std::span<const double> params, const Batch& batch,
                                      NetScratch& scratch) {
  const int n_layers = spec.n_weight_layers();
  scratch.act.resize(static_cast<std::size_t>(n_layers) + 1);
  const double* input = batch.x;
  for (int l = 0; l < n_layers; ++l) {
    const LayerLayout& ll = layout.layers[static_cast<std::size_t>(l)];
    std::vector<double>& out = scratch.act[static_cast<std::size_t>(l) + 1];
    out.resize(batch.n * static_cast<std::size_t>(ll.fan_out));
    const double* w = params.data() + ll.weight_offset;
    const double* bias = ll.bias_offset >= 0 ? params.data() + ll.bias_offset : nullptr;
    affine_forward(input, batch.n, ll.fan_in, ll.fan_out, w, bias, out.data());
    if (l < n_layers - 1) {
      if (spec.activations[static_cast<std::size_t>(l)] == Activation::relu) {
        for (double& v : out) v = v > 0.0 ? v : 0.0;
      } else {
        for (double& v : out) v = std::tanh(v);
      }
    }
    check_finite(out, l + 1);
    input = out.data();
  }
  return scratch.act[static_cast<std::size_t>(n_layers)];
}

}  // namespace

void NetworkSpec::validate() const {
  if (layer_sizes.size() < 2) throw SpecError("network needs at least input and output sizes");
  for (int s : layer_sizes) {
    if (s < 1) throw SpecError("layer sizes must be positive");
  }
  const std::size_t n_hidden = layer_sizes.size() - 2;
  if (activations.size() != n_hidden) {
    throw SpecError("need one activation per hidden layer");
  }
  if (!include_bias.empty() &&
      include_bias.size() != static_cast<std::size_t>(n_weight_layers())) {
    throw SpecError("include_bias must have one entry per weight layer");
  }
  if (layer_sizes.back() != 1) throw SpecError("single output unit expected");
}

ParamLayout build_layout(const NetworkSpec& spec) {
  spec.validate();
  ParamLayout layout;
  std::size_t offset = 0;
  for (int l = 0; l < spec.n_weight_layers(); ++l) {
    LayerLayout ll;
    ll.fan_in = spec.layer_sizes[static_cast<std::size_t>(l)];
    ll.fan_out = spec.layer_sizes[static_cast<std::size_t>(l) + 1];
    ll.weight_offset = offset;
    offset += static_cast<std::size_t>(ll.fan_in) * static_cast<std::size_t>(ll.fan_out);
    if (spec.layer_has_bias(l)) {
      ll.bias_offset = static_cast<std::ptrdiff_t>(offset);
      offset += static_cast<std::size_t>(ll.fan_out);
    }
    layout.layers.push_back(ll);
  }
  layout.size = offset;
  return layout;
}

bool ParamLayout::is_bias(std::size_t index) const {
  for (const LayerLayout& ll : layers) {
    if (ll.bias_offset < 0) continue;
    const auto b = static_cast<std::size_t>(ll.bias_offset);
    if (index >= b && index < b + static_cast<std::size_t>(ll.fan_out)) return true;
  }
  return false;
}

std::size_t ParamLayout::n_weights() const {
  std::size_t n = 0;
  for (const LayerLayout& ll : layers) {
    n += static_cast<std::size_t>(ll.fan_in) * static_cast<std::size_t>(ll.fan_out);
  }
  return n;
}

ParamStore build_network(const NetworkSpec& spec, Rng& rng) {
  ParamStore store;
  store.layout = build_layout(spec);
  store.values.assign(store.layout.size, 0.0);
  for (int l = 0; l < spec.n_weight_layers(); ++l) {
    const LayerLayout& ll = store.layout.layers[static_cast<std::size_t>(l)];
    const bool relu_next = l < spec.n_weight_layers() - 1 &&
                           spec.activations[static_cast<std::size_t>(l)] == Activation::relu;
    const double sd = std::sqrt((relu_next ? 2.0 : 1.0) / ll.fan_in);
    const std::size_t n_w = static_cast<std::size_t>(ll.fan_in) * ll.fan_out;
    for (std::size_t i = 0; i < n_w; ++i) {
      store.values[ll.weight_offset + i] = sd * rng.normal();
    }
  }
  return store;
}

void forward(const NetworkSpec& spec, const ParamLayout& layout,
             std::span<const double> params, const Batch& batch,
             std::span<double> pred_out, NetScratch& scratch) {
  const std::vector<double>& z = run_layers(spec, layout, params, batch, scratch);
  if (spec.output == OutputKind::regression) {
    std::copy(z.begin(), z.end(), pred_out.begin());
  } else {
    for (std::size_t i = 0; i < batch.n; ++i) pred_out[i] = sigmoid(z[i]);
  }
}

double loss_and_grad(const NetworkSpec& spec, const ParamLayout& layout,
                     std::span<const double> params, const Batch& batch,
                     std::span<const double> decay, std::span<double> grad_out,
                     NetScratch& scratch) {
  if (batch.n == 0) throw SpecError("empty batch");
  const int n_layers = spec.n_weight_layers();
  const std::vector<double>& z = run_layers(spec, layout, params, batch, scratch);

  double loss = 0.0;
  scratch.delta.resize(batch.n);
  const double inv_n = 1.0 / static_cast<double>(batch.n);
  if (spec.output == OutputKind::regression) {
    for (std::size_t i = 0; i < batch.n; ++i) {
      const double r = z[i] - batch.y[i];
      loss += 0.5 * r * r;
      scratch.delta[i] = r * inv_n;
    }
  } else {
    for (std::size_t i = 0; i < batch.n; ++i) {
      loss += softplus(z[i]) - batch.y[i] * z[i];
      scratch.delta[i] = (sigmoid(z[i]) - batch.y[i]) * inv_n;
    }
  }
  loss *= inv_n;
  if (!std::isfinite(loss)) throw NumericError("non-finite loss");

  std::fill(grad_out.begin(), grad_out.end(), 0.0);
  for (int l = n_layers - 1; l >= 0; --l) {
    const LayerLayout& ll = layout.layers[static_cast<std::size_t>(l)];
    const double* a_prev =
        l == 0 ? batch.x : scratch.act[static_cast<std::size_t>(l)].data();
    double* dw = grad_out.data() + ll.weight_offset;
    double* db = ll.bias_offset >= 0 ? grad_out.data() + ll.bias_offset : nullptr;
    accumulate_weight_grad(scratch.delta.data(), a_prev, batch.n, ll.fan_in, ll.fan_out,
                           dw, db);
    if (l == 0) break;
    scratch.delta_prev.resize(batch.n * static_cast<std::size_t>(ll.fan_in));
    backprop_input(scratch.delta.data(), params.data() + ll.weight_offset, batch.n,
                   ll.fan_in, ll.fan_out, scratch.delta_prev.data());
    // activation derivative of the layer below, computed from its output
    const std::vector<double>& a = scratch.act[static_cast<std::size_t>(l)];
    if (spec.activations[static_cast<std::size_t>(l) - 1] == Activation::relu) {
      for (std::size_t i = 0; i < a.size(); ++i) {
        scratch.delta_prev[i] = a[i] > 0.0 ? scratch.delta_prev[i] : 0.0;
      }
    } else {
      for (std::size_t i = 0; i < a.size(); ++i) {
        scratch.delta_prev[i] *= 1.0 - a[i] * a[i];
      }
    }
    std::swap(scratch.delta, scratch.delta_prev);
  }

  if (!decay.empty()) {
    for (std::size_t i = 0; i < grad_out.size(); ++i) {
      grad_out[i] += decay[i] * params[i];
    }
  }
  return loss;
}

std::vector<double> finite_diff_grad(const NetworkSpec& spec, const ParamLayout& layout,
                                     std::span<const double> params, const Batch& batch,
                                     std::span<const double> decay, double h) {
  std::vector<double> work(params.begin(), params.end());
  std::vector<double> grad(params.size());
  std::vector<double> pred(batch.n);
  NetScratch scratch;
  auto penalized = [&](std::span<const double> w) {
    const std::vector<double>& z = run_layers(spec, layout, w, batch, scratch);
    double loss = 0.0;
    if (spec.output == OutputKind::regression) {
      for (std::size_t i = 0; i < batch.n; ++i) {
        const double r = z[i] - batch.y[i];
        loss += 0.5 * r * r;
      }
    } else {
      for (std::size_t i = 0; i < batch.n; ++i) {
        loss += softplus(z[i]) - batch.y[i] * z[i];
      }
    }
    loss /= static_cast<double>(batch.n);
    if (!decay.empty()) {
      for (std::size_t i = 0; i < w.size(); ++i) loss += 0.5 * decay[i] * w[i] * w[i];
    }
    return loss;
  };
  for (std::size_t i = 0; i < work.size(); ++i) {
    const double saved = work[i];
    work[i] = saved + h;
    const double up = penalized(work);
    work[i] = saved - h;
    const double down = penalized(work);
    work[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace bnprune
