#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bnprune/rng.hpp"

namespace bnprune {

struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a forward/backward pass produces non-finite values.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Activation { relu, tanh_ };
enum class OutputKind { regression, logistic };

struct NetworkSpec {
  std::vector<int> layer_sizes;            // input, hidden..., output
  std::vector<Activation> activations;     // one per hidden layer
  OutputKind output = OutputKind::regression;
  std::vector<std::uint8_t> include_bias;  // one per weight layer; empty = all true

  int n_weight_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
  bool layer_has_bias(int layer) const {
    return include_bias.empty() || include_bias[static_cast<std::size_t>(layer)] != 0;
  }
  void validate() const;  // throws SpecError
};

struct LayerLayout {
  std::size_t weight_offset = 0;
  int fan_in = 0;
  int fan_out = 0;
  std::ptrdiff_t bias_offset = -1;  // -1 when the layer has no bias
};

struct ParamLayout {
  std::vector<LayerLayout> layers;
  std::size_t size = 0;

  std::size_t weight_index(int layer, int out_unit, int in_unit) const {
    const LayerLayout& l = layers[static_cast<std::size_t>(layer)];
    return l.weight_offset +
           static_cast<std::size_t>(out_unit) * static_cast<std::size_t>(l.fan_in) +
           static_cast<std::size_t>(in_unit);
  }
  bool is_bias(std::size_t index) const;
  std::size_t n_weights() const;  // parameter count excluding biases
};

ParamLayout build_layout(const NetworkSpec& spec);

// Flat parameter vector plus its layout. Weight blocks are row-major
// [fan_out][fan_in]; each layer's bias block follows its weight block.
struct ParamStore {
  ParamLayout layout;
  std::vector<double> values;
};

// He-style init: hidden weights ~ Normal(0, 2/fan_in) before relu,
// Normal(0, 1/fan_in) before tanh or the linear output; biases zero.
ParamStore build_network(const NetworkSpec& spec, Rng& rng);

// Non-owning view of a row-major feature block with targets.
struct Batch {
  const double* x = nullptr;
  const double* y = nullptr;
  std::size_t n = 0;
  std::size_t p = 0;
};

// Reusable buffers for forward/backward passes.
struct NetScratch {
  std::vector<std::vector<double>> act;    // act[l]: batch x layer_sizes[l], l >= 1
  std::vector<double> delta, delta_prev;
};

// Predictions for every row: regression head returns the linear output,
// logistic head returns the probability sigma(z). Throws NumericError if a
// layer produces a non-finite value.
void forward(const NetworkSpec& spec, const ParamLayout& layout,
             std::span<const double> params, const Batch& batch,
             std::span<double> pred_out, NetScratch& scratch);

// Mean negative log-likelihood over the batch (squared error / 2 per sample
// for regression, Bernoulli deviance for the logistic head). grad_out gets
// d(loss)/d(params) + decay .* params; the returned loss excludes the decay
// penalty. decay may be empty (treated as zero).
double loss_and_grad(const NetworkSpec& spec, const ParamLayout& layout,
                     std::span<const double> params, const Batch& batch,
                     std::span<const double> decay, std::span<double> grad_out,
                     NetScratch& scratch);

// Central differences of loss + sum(decay .* params^2)/2; reference oracle
// for loss_and_grad.
std::vector<double> finite_diff_grad(const NetworkSpec& spec, const ParamLayout& layout,
                                     std::span<const double> params, const Batch& batch,
                                     std::span<const double> decay, double h);

}  // namespace bnprune
