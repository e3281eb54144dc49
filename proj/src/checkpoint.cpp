#include "bnprune/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

namespace bnprune {

namespace {

constexpr std::array<unsigned char, 4> kMagic = {'B', 'N', 'P', 'C'};
constexpr std::uint32_t kVersion = 1;

struct Writer {
  std::vector<unsigned char> buf;

  void u8(std::uint8_t v) { buf.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  void f64_vec(const std::vector<double>& v) {
    u64(v.size());
    for (double x : v) f64(x);
  }
  void u8_vec(const std::vector<std::uint8_t>& v) {
    u64(v.size());
    for (std::uint8_t x : v) u8(x);
  }
};

struct Reader {
  const unsigned char* data = nullptr;
  std::size_t len = 0;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > len) throw CheckpointError("checkpoint file truncated");
  }
  std::uint8_t u8() {
    need(1);
    return data[pos++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data[pos++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data[pos++]) << (8 * i);
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }

  std::size_t count() {
    const std::uint64_t n = u64();
    if (n > len) throw CheckpointError("checkpoint length field out of range");
    return static_cast<std::size_t>(n);
  }
  std::vector<double> f64_vec() {
    const std::size_t n = count();
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = f64();
    return v;
  }
  std::vector<std::uint8_t> u8_vec() {
    const std::size_t n = count();
    std::vector<std::uint8_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = u8();
    return v;
  }
};

}  // namespace

std::uint32_t crc32(const unsigned char* data, std::size_t len) {
  static const std::array<std::uint32_t, 256> table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t c = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < len; ++i) c = table[(c ^ data[i]) & 0xFF] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

void write_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  Writer w;
  w.buf.insert(w.buf.end(), kMagic.begin(), kMagic.end());
  w.u32(kVersion);

  w.u64(ckpt.spec.layer_sizes.size());
  for (int s : ckpt.spec.layer_sizes) w.i64(s);
  w.u64(ckpt.spec.activations.size());
  for (Activation a : ckpt.spec.activations) w.u8(a == Activation::relu ? 0 : 1);
  w.u8(ckpt.spec.output == OutputKind::regression ? 0 : 1);
  w.u8_vec(ckpt.spec.include_bias);

  w.i64(ckpt.example_id);
  w.u64(ckpt.seed);
  w.i64(ckpt.iteration);

  w.f64_vec(ckpt.params);
  w.f64_vec(ckpt.rho);
  w.u8_vec(ckpt.alive);
  w.u8_vec(ckpt.soft);

  w.u64(ckpt.truth.size());
  for (int v : ckpt.truth) w.i64(v);

  w.u64(ckpt.snapshots.members.size());
  for (std::size_t i = 0; i < ckpt.snapshots.members.size(); ++i) {
    w.i64(ckpt.snapshots.epochs[i]);
    w.i64(ckpt.snapshots.cycles[i]);
    w.f64_vec(ckpt.snapshots.members[i]);
  }

  w.u32(crc32(w.buf.data(), w.buf.size()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot open checkpoint for writing: " + path);
  out.write(reinterpret_cast<const char*>(w.buf.data()),
            static_cast<std::streamsize>(w.buf.size()));
  if (!out) throw CheckpointError("checkpoint write failed: " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path);
  std::vector<unsigned char> buf{std::istreambuf_iterator<char>(in),
                                 std::istreambuf_iterator<char>()};

  if (buf.size() < kMagic.size() + 8 || std::memcmp(buf.data(), kMagic.data(), 4) != 0) {
    throw CheckpointError("not a checkpoint file: " + path);
  }
  const std::size_t body = buf.size() - 4;
  std::uint32_t stored = 0;
  for (int i = 0; i < 4; ++i) stored |= static_cast<std::uint32_t>(buf[body + i]) << (8 * i);
  if (crc32(buf.data(), body) != stored) {
    throw CheckpointError("checkpoint checksum mismatch: " + path);
  }

  Reader r{buf.data(), body, kMagic.size()};
  const std::uint32_t version = r.u32();
  if (version != kVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }

  Checkpoint ckpt;
  const std::size_t n_sizes = r.count();
  ckpt.spec.layer_sizes.resize(n_sizes);
  for (std::size_t i = 0; i < n_sizes; ++i) {
    ckpt.spec.layer_sizes[i] = static_cast<int>(r.i64());
  }
  const std::size_t n_act = r.count();
  ckpt.spec.activations.resize(n_act);
  for (std::size_t i = 0; i < n_act; ++i) {
    ckpt.spec.activations[i] = r.u8() == 0 ? Activation::relu : Activation::tanh_;
  }
  ckpt.spec.output = r.u8() == 0 ? OutputKind::regression : OutputKind::logistic;
  ckpt.spec.include_bias = r.u8_vec();

  ckpt.example_id = static_cast<int>(r.i64());
  ckpt.seed = r.u64();
  ckpt.iteration = r.i64();

  ckpt.params = r.f64_vec();
  ckpt.rho = r.f64_vec();
  ckpt.alive = r.u8_vec();
  ckpt.soft = r.u8_vec();

  const std::size_t n_truth = r.count();
  ckpt.truth.resize(n_truth);
  for (std::size_t i = 0; i < n_truth; ++i) ckpt.truth[i] = static_cast<int>(r.i64());

  const std::size_t n_snap = r.count();
  for (std::size_t i = 0; i < n_snap; ++i) {
    ckpt.snapshots.epochs.push_back(r.i64());
    ckpt.snapshots.cycles.push_back(static_cast<int>(r.i64()));
    ckpt.snapshots.members.push_back(r.f64_vec());
  }
  if (r.pos != body) throw CheckpointError("trailing bytes in checkpoint: " + path);
  return ckpt;
}

}  // namespace bnprune
