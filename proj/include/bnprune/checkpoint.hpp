#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bnprune/metrics.hpp"
#include "bnprune/network.hpp"

namespace bnprune {

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Everything needed to evaluate a trained run later: the architecture, the
// final dense parameters and masks, and the snapshot ensemble. Versioned
// little-endian binary with magic bytes and a trailing CRC32.
struct Checkpoint {
  NetworkSpec spec;
  std::vector<double> params;        // final dense parameters
  std::vector<double> rho;           // dual scale state; empty for ngvi runs
  std::vector<std::uint8_t> alive;   // per-parameter hard mask
  std::vector<std::uint8_t> soft;    // per-group slab indicator, informational
  std::vector<int> truth;            // 1-based signal variables; empty for csv data
  SnapshotEnsemble snapshots;
  std::uint64_t seed = 0;
  std::int64_t iteration = 0;
  int example_id = 0;
};

void write_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint read_checkpoint(const std::string& path);

std::uint32_t crc32(const unsigned char* data, std::size_t len);

}  // namespace bnprune
