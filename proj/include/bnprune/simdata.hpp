#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bnprune/network.hpp"
#include "bnprune/rng.hpp"

namespace bnprune {

struct SimDataset {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<double> x;  // row-major n x p
  std::vector<double> y;

  Batch batch() const { return Batch{x.data(), y.data(), n, p}; }
};

// Equicorrelated design: one shared factor e per row, x_ij = (e_i + z_ij)/sqrt(2)
// with e, z iid standard normal truncated to [-10, 10]. Pairwise correlation
// ~0.5, unit variance. Row r uses stream.fork(r), so generation is
// order-independent and reproducible.
SimDataset gen_predictors(std::size_t n, std::size_t p, const Rng& stream);

// Fills ds.y for the given benchmark. Examples 1 and 2 are regressions with
// unit Gaussian noise (per-row noise from stream.fork(r)); example 3 is a
// noiseless binary threshold label.
void gen_response(int example_id, SimDataset& ds, const Rng& stream);

// 1-based indices of the signal variables for a benchmark example.
std::vector<int> truth_variables(int example_id);

// Default predictor count / output head for a benchmark example.
std::size_t default_p(int example_id);
OutputKind example_output(int example_id);

// CSV with header x1,...,xp,y; values in full 64-bit round-trip precision.
void write_csv(const SimDataset& ds, const std::string& path);
SimDataset read_csv(const std::string& path);

}  // namespace bnprune
