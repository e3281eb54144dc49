#include "bnprune/simdata.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace bnprune {

namespace {

constexpr double kTruncLo = -10.0;
constexpr double kTruncHi = 10.0;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

double example1_signal(const double* x) {
  return std::tanh(2.0 * std::tanh(2.0 * x[0] - x[1])) +
         2.0 * std::tanh(std::tanh(x[2] - 2.0 * x[3]) - std::tanh(2.0 * x[4]));
}

double example2_signal(const double* x) {
  return 5.0 * x[1] / (1.0 + x[0] * x[0]) + 5.0 * std::sin(x[2] * x[3]) + 2.0 * x[4];
}

double example3_score(const double* x) {
  return std::exp(x[0]) + x[1] * x[1] + 5.0 * std::sin(x[2] * x[3]);
}

}  // namespace

SimDataset gen_predictors(std::size_t n, std::size_t p, const Rng& stream) {
  SimDataset ds;
  ds.n = n;
  ds.p = p;
  ds.x.resize(n * p);
  for (std::size_t r = 0; r < n; ++r) {
    Rng row_rng = stream.fork(r);
    const double e = row_rng.truncated_normal(kTruncLo, kTruncHi);
    double* row = ds.x.data() + r * p;
    for (std::size_t j = 0; j < p; ++j) {
      const double z = row_rng.truncated_normal(kTruncLo, kTruncHi);
      row[j] = (e + z) * kInvSqrt2;
    }
  }
  return ds;
}

void gen_response(int example_id, SimDataset& ds, const Rng& stream) {
  const std::size_t min_p = truth_variables(example_id).size();
  if (ds.p < min_p) throw SpecError("dataset has fewer predictors than the signal needs");
  ds.y.resize(ds.n);
  for (std::size_t r = 0; r < ds.n; ++r) {
    const double* row = ds.x.data() + r * ds.p;
    double y = 0.0;
    switch (example_id) {
      case 1:
        y = example1_signal(row) + stream.fork(r).normal();
        break;
      case 2:
        y = example2_signal(row) + stream.fork(r).normal();
        break;
      case 3:
        y = example3_score(row) > 3.0 ? 1.0 : 0.0;
        break;
      default:
        throw SpecError("unknown example id");
    }
    ds.y[r] = y;
  }
}

std::vector<int> truth_variables(int example_id) {
  switch (example_id) {
    case 1:
    case 2:
      return {1, 2, 3, 4, 5};
    case 3:
      return {1, 2, 3, 4};
    default:
      throw SpecError("unknown example id");
  }
}

std::size_t default_p(int example_id) {
  switch (example_id) {
    case 1:
      return 1000;
    case 2:
    case 3:
      return 2000;
    default:
      throw SpecError("unknown example id");
  }
}

OutputKind example_output(int example_id) {
  return example_id == 3 ? OutputKind::logistic : OutputKind::regression;
}

void write_csv(const SimDataset& ds, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  for (std::size_t j = 1; j <= ds.p; ++j) std::fprintf(f, "x%zu,", j);
  std::fprintf(f, "y\n");
  for (std::size_t r = 0; r < ds.n; ++r) {
    const double* row = ds.x.data() + r * ds.p;
    for (std::size_t j = 0; j < ds.p; ++j) std::fprintf(f, "%.17g,", row[j]);
    std::fprintf(f, "%.17g\n", ds.y[r]);
  }
  if (std::fclose(f) != 0) throw std::runtime_error("error closing " + path);
}

SimDataset read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv " + path);

  std::size_t p = 0;
  for (char c : line) {
    if (c == ',') ++p;
  }
  if (p == 0) throw std::runtime_error("csv needs x columns and a y column");

  SimDataset ds;
  ds.p = p;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const char* s = line.data();
    const char* end = s + line.size();
    std::size_t col = 0;
    while (s < end) {
      double v = 0.0;
      auto [next, ec] = std::from_chars(s, end, v);
      if (ec != std::errc()) throw std::runtime_error("bad number in " + path);
      if (col < p) {
        ds.x.push_back(v);
      } else {
        ds.y.push_back(v);
      }
      ++col;
      s = next;
      if (s < end && *s == ',') ++s;
    }
    if (col != p + 1) throw std::runtime_error("ragged row in " + path);
  }
  ds.n = ds.y.size();
  return ds;
}

}  // namespace bnprune
