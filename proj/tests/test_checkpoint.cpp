#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "bnprune/checkpoint.hpp"
#include "doctest.h"

using namespace bnprune;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

Checkpoint sample_checkpoint() {
  Checkpoint c;
  c.spec.layer_sizes = {3, 2, 1};
  c.spec.activations = {Activation::tanh_};
  c.spec.output = OutputKind::logistic;
  c.spec.include_bias = {1, 0};
  c.params = {0.5, -1.25, 3e-300, 0.0, 42.0, -0.125, 7.5, 1.0, 2.0};
  c.rho = {0.1, -0.2, 13.8, -13.8, 0.0, 1.0, 2.0, 3.0, 4.0};
  c.alive = {1, 1, 0, 1, 0, 1, 1, 1, 1};
  c.soft = {1, 0, 1};
  c.truth = {1, 2, 3};
  c.snapshots.members = {{1.0, 2.0}, {3.0, 4.0}};
  c.snapshots.epochs = {10, 20};
  c.snapshots.cycles = {1, 2};
  c.seed = 0xdeadbeefcafef00dULL;
  c.iteration = 12345;
  c.example_id = 2;
  return c;
}

std::vector<unsigned char> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::string& path, const std::vector<unsigned char>& buf) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
}

// Replace the trailing checksum so tampered payloads still look consistent.
void reseal(std::vector<unsigned char>& buf) {
  const std::size_t body = buf.size() - 4;
  const std::uint32_t c = crc32(buf.data(), body);
  for (int i = 0; i < 4; ++i) buf[body + static_cast<std::size_t>(i)] =
      static_cast<unsigned char>(c >> (8 * i));
}

}  // namespace

TEST_CASE("checkpoint round trip preserves every field bit for bit") {
  const std::string path = temp_path("bnprune_test_ckpt.bin");
  const Checkpoint c = sample_checkpoint();
  write_checkpoint(c, path);
  const Checkpoint r = read_checkpoint(path);

  CHECK(r.spec.layer_sizes == c.spec.layer_sizes);
  CHECK(r.spec.activations == c.spec.activations);
  CHECK(r.spec.output == c.spec.output);
  CHECK(r.spec.include_bias == c.spec.include_bias);
  CHECK(r.params == c.params);
  CHECK(r.rho == c.rho);
  CHECK(r.alive == c.alive);
  CHECK(r.soft == c.soft);
  CHECK(r.truth == c.truth);
  CHECK(r.snapshots.members == c.snapshots.members);
  CHECK(r.snapshots.epochs == c.snapshots.epochs);
  CHECK(r.snapshots.cycles == c.snapshots.cycles);
  CHECK(r.seed == c.seed);
  CHECK(r.iteration == c.iteration);
  CHECK(r.example_id == c.example_id);
  std::remove(path.c_str());
}

TEST_CASE("empty optional sections survive the round trip") {
  const std::string path = temp_path("bnprune_test_ckpt_min.bin");
  Checkpoint c = sample_checkpoint();
  c.rho.clear();        // mean-field runs store no dual variables
  c.snapshots = SnapshotEnsemble{};
  write_checkpoint(c, path);
  const Checkpoint r = read_checkpoint(path);
  CHECK(r.rho.empty());
  CHECK(r.snapshots.members.empty());
  CHECK(r.params == c.params);
  std::remove(path.c_str());
}

TEST_CASE("double formats including subnormal-range values round trip") {
  const std::string path = temp_path("bnprune_test_ckpt_vals.bin");
  Checkpoint c = sample_checkpoint();
  c.params = {5e-324, 1.7976931348623157e308, -0.0, 1.0 / 3.0,
              0.1, 0.2, 0.3, 0.4, 0.5};
  write_checkpoint(c, path);
  const Checkpoint r = read_checkpoint(path);
  CHECK(r.params == c.params);
  std::remove(path.c_str());
}

TEST_CASE("payload corruption is caught by the checksum") {
  const std::string path = temp_path("bnprune_test_ckpt_bad.bin");
  write_checkpoint(sample_checkpoint(), path);
  std::vector<unsigned char> buf = read_bytes(path);
  buf[buf.size() / 2] ^= 0x40;
  write_bytes(path, buf);
  CHECK_THROWS_WITH_AS(read_checkpoint(path),
                       ("checkpoint checksum mismatch: " + path).c_str(),
                       CheckpointError);
  std::remove(path.c_str());
}

TEST_CASE("foreign files are rejected by the magic header") {
  const std::string path = temp_path("bnprune_test_ckpt_foreign.bin");
  write_checkpoint(sample_checkpoint(), path);
  std::vector<unsigned char> buf = read_bytes(path);
  buf[0] = 'X';
  write_bytes(path, buf);
  CHECK_THROWS_WITH_AS(read_checkpoint(path), ("not a checkpoint file: " + path).c_str(),
                       CheckpointError);

  write_bytes(path, {'B', 'N'});
  CHECK_THROWS_AS(read_checkpoint(path), CheckpointError);
  std::remove(path.c_str());

  CHECK_THROWS_AS(read_checkpoint(temp_path("bnprune_no_such.bin")), CheckpointError);
}

TEST_CASE("future versions are refused even when the checksum holds") {
  const std::string path = temp_path("bnprune_test_ckpt_ver.bin");
  write_checkpoint(sample_checkpoint(), path);
  std::vector<unsigned char> buf = read_bytes(path);
  buf[4] = 2;  // version field sits after the 4-byte magic
  reseal(buf);
  write_bytes(path, buf);
  CHECK_THROWS_WITH_AS(read_checkpoint(path), "unsupported checkpoint version 2",
                       CheckpointError);
  std::remove(path.c_str());
}

TEST_CASE("resealed short payloads report truncation") {
  const std::string path = temp_path("bnprune_test_ckpt_short.bin");
  write_checkpoint(sample_checkpoint(), path);
  std::vector<unsigned char> buf = read_bytes(path);
  // Drop 16 payload bytes, keep a fresh checksum so parsing is what fails.
  buf.erase(buf.end() - 20, buf.end() - 4);
  reseal(buf);
  write_bytes(path, buf);
  CHECK_THROWS_WITH_AS(read_checkpoint(path), "checkpoint file truncated",
                       CheckpointError);
  std::remove(path.c_str());
}

TEST_CASE("resealed oversized payloads report trailing bytes") {
  const std::string path = temp_path("bnprune_test_ckpt_long.bin");
  write_checkpoint(sample_checkpoint(), path);
  std::vector<unsigned char> buf = read_bytes(path);
  buf.insert(buf.end() - 4, 0x00);
  reseal(buf);
  write_bytes(path, buf);
  CHECK_THROWS_WITH_AS(read_checkpoint(path),
                       ("trailing bytes in checkpoint: " + path).c_str(),
                       CheckpointError);
  std::remove(path.c_str());
}

TEST_CASE("hostile length fields cannot trigger giant allocations") {
  const std::string path = temp_path("bnprune_test_ckpt_len.bin");
  Checkpoint c;  // empty network keeps the params-count offset fixed
  c.params = {1.0};
  write_checkpoint(c, path);
  std::vector<unsigned char> buf = read_bytes(path);
  // Offsets: magic 4, version 4, sizes count 8, activations count 8, output 1,
  // bias count 8, example 8, seed 8, iteration 8 -> params count at 57.
  const std::size_t off = 57;
  for (std::size_t i = 0; i < 8; ++i) buf[off + i] = 0xFF;
  reseal(buf);
  write_bytes(path, buf);
  CHECK_THROWS_WITH_AS(read_checkpoint(path), "checkpoint length field out of range",
                       CheckpointError);
  std::remove(path.c_str());
}

TEST_CASE("checksum matches the reference polynomial") {
  // CRC-32/ISO-HDLC of "123456789".
  const unsigned char msg[] = {'1', '2', '3', '4', '5', '6', '7', '8', '9'};
  CHECK(crc32(msg, 9) == 0xCBF43926u);
  CHECK(crc32(msg, 0) == 0x00000000u);
}
