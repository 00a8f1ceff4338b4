#include "revmine/ranker.hpp"

#include <bit>
#include <cstring>
#include <fstream>

// Checkpoint layout (version 1): header, hyperparameters, then every active
// tensor in visitation order with its name and shape. Values are raw
// little-endian IEEE floats/doubles.
static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace revmine {

namespace {

constexpr char kMagic[4] = {'R', 'V', 'C', 'K'};
constexpr uint32_t kVersion = 1;

void write_bytes(std::ofstream& out, const void* data, size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

template <typename T>
void write_pod(std::ofstream& out, T value) {
  write_bytes(out, &value, sizeof(T));
}

void write_name(std::ofstream& out, const std::string& name) {
  write_pod<uint16_t>(out, static_cast<uint16_t>(name.size()));
  write_bytes(out, name.data(), name.size());
}

void read_bytes(std::ifstream& in, void* data, size_t n,
                const std::string& path) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (!in) throw Error("truncated checkpoint file: " + path);
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& path) {
  T value;
  read_bytes(in, &value, sizeof(T), path);
  return value;
}

std::string read_name(std::ifstream& in, const std::string& path) {
  uint16_t len = read_pod<uint16_t>(in, path);
  std::string name(len, '\0');
  read_bytes(in, name.data(), len, path);
  return name;
}

template <typename S, typename P>
void write_tensors(std::ofstream& out, const P& params) {
  uint32_t count = 0;
  params.visit([&count](const char*, const auto&) { ++count; });
  write_pod<uint32_t>(out, count);
  params.visit([&out](const char* name, const auto& t) {
    write_name(out, name);
    write_pod<uint64_t>(out, static_cast<uint64_t>(t.rows()));
    write_pod<uint64_t>(out, static_cast<uint64_t>(t.cols()));
    write_bytes(out, t.data(), sizeof(S) * static_cast<size_t>(t.size()));
  });
}

template <typename S, typename P>
void read_tensors(std::ifstream& in, P& params, const std::string& path) {
  uint32_t count = read_pod<uint32_t>(in, path);
  uint32_t expected = 0;
  params.visit([&expected](const char*, const auto&) { ++expected; });
  if (count != expected)
    throw Error("checkpoint tensor count mismatch in " + path);
  params.visit([&](const char* name, auto& t) {
    std::string stored = read_name(in, path);
    if (stored != name)
      throw Error("checkpoint tensor order mismatch: expected '" +
                  std::string(name) + "', found '" + stored + "' in " + path);
    uint64_t rows = read_pod<uint64_t>(in, path);
    uint64_t cols = read_pod<uint64_t>(in, path);
    if (rows != static_cast<uint64_t>(t.rows()) ||
        cols != static_cast<uint64_t>(t.cols()))
      throw Error("checkpoint tensor '" + std::string(name) +
                  "' has unexpected shape in " + path);
    read_bytes(in, t.data(), sizeof(S) * static_cast<size_t>(t.size()), path);
  });
}

nn::AttentionKind att_kind_from_byte(uint8_t b, const std::string& path) {
  if (b == 0) return nn::AttentionKind::ProjTanh;
  if (b == 1) return nn::AttentionKind::Dot;
  throw Error("unknown attention kind in checkpoint " + path);
}

uint8_t att_kind_to_byte(nn::AttentionKind k) {
  return k == nn::AttentionKind::ProjTanh ? 0 : 1;
}

template <typename S>
void save_joint(const std::string& path, const RankerParams<S>& p,
                uint64_t seed) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open checkpoint for writing: " + path);
  write_bytes(out, kMagic, 4);
  write_pod<uint32_t>(out, kVersion);
  write_pod<uint8_t>(out, 0);  // joint
  write_pod<uint8_t>(out, sizeof(S));
  write_pod<uint64_t>(out, seed);
  write_pod<int32_t>(out, p.hyper.input_dim);
  write_pod<int32_t>(out, p.hyper.hidden);
  write_pod<int32_t>(out, p.hyper.joint_hidden);
  write_pod<int32_t>(out, p.hyper.att_dim);
  write_pod<uint8_t>(out, att_kind_to_byte(p.hyper.att_kind));
  write_pod<double>(out, p.hyper.dropout);
  write_pod<uint8_t>(out, p.hyper.tie_weights ? 1 : 0);
  write_tensors<S>(out, p);
  if (!out) throw Error("write failed: " + path);
}

template <typename S>
void save_base(const std::string& path, const BaselineParams<S>& p,
               uint64_t seed) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open checkpoint for writing: " + path);
  write_bytes(out, kMagic, 4);
  write_pod<uint32_t>(out, kVersion);
  write_pod<uint8_t>(out, 1);  // baseline
  write_pod<uint8_t>(out, sizeof(S));
  write_pod<uint64_t>(out, seed);
  write_pod<int32_t>(out, p.hyper.input_dim);
  write_pod<int32_t>(out, p.hyper.hidden);
  write_pod<int32_t>(out, p.hyper.att_dim);
  write_pod<uint8_t>(out, att_kind_to_byte(p.hyper.att_kind));
  write_pod<double>(out, p.hyper.dropout);
  write_tensors<S>(out, p);
  if (!out) throw Error("write failed: " + path);
}

struct Header {
  ModelKind kind;
  uint8_t scalar_size;
  uint64_t seed;
};

Header read_header(std::ifstream& in, const std::string& path) {
  char magic[4];
  read_bytes(in, magic, 4, path);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw Error("not a checkpoint file: " + path);
  uint32_t version = read_pod<uint32_t>(in, path);
  if (version != kVersion)
    throw Error("unsupported checkpoint version " + std::to_string(version) +
                " in " + path);
  uint8_t kind = read_pod<uint8_t>(in, path);
  if (kind > 1) throw Error("unknown model kind in checkpoint " + path);
  uint8_t scalar_size = read_pod<uint8_t>(in, path);
  if (scalar_size != 4 && scalar_size != 8)
    throw Error("unknown precision in checkpoint " + path);
  uint64_t seed = read_pod<uint64_t>(in, path);
  return {kind == 0 ? ModelKind::Joint : ModelKind::Baseline, scalar_size,
          seed};
}

}  // namespace

CheckpointInfo peek_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint: " + path);
  Header h = read_header(in, path);
  CheckpointInfo info;
  info.kind = h.kind;
  info.precision = h.scalar_size == 4 ? Precision::Single : Precision::Double;
  info.seed = h.seed;
  return info;
}

void save_checkpoint(const std::string& path, const RankerParams<double>& p,
                     uint64_t seed) {
  save_joint(path, p, seed);
}
void save_checkpoint(const std::string& path, const RankerParams<float>& p,
                     uint64_t seed) {
  save_joint(path, p, seed);
}
void save_checkpoint(const std::string& path, const BaselineParams<double>& p,
                     uint64_t seed) {
  save_base(path, p, seed);
}
void save_checkpoint(const std::string& path, const BaselineParams<float>& p,
                     uint64_t seed) {
  save_base(path, p, seed);
}

template <typename S>
RankerParams<S> load_joint_checkpoint(const std::string& path,
                                      uint64_t* seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint: " + path);
  Header h = read_header(in, path);
  if (h.kind != ModelKind::Joint)
    throw Error("checkpoint holds a baseline model, expected joint: " + path);
  if (h.scalar_size != sizeof(S))
    throw Error("checkpoint precision does not match requested precision: " +
                path);
  RankerHyper hyper;
  hyper.input_dim = read_pod<int32_t>(in, path);
  hyper.hidden = read_pod<int32_t>(in, path);
  hyper.joint_hidden = read_pod<int32_t>(in, path);
  hyper.att_dim = read_pod<int32_t>(in, path);
  hyper.att_kind = att_kind_from_byte(read_pod<uint8_t>(in, path), path);
  hyper.dropout = read_pod<double>(in, path);
  hyper.tie_weights = read_pod<uint8_t>(in, path) != 0;
  RankerParams<S> p = RankerParams<S>::zeros(hyper);
  read_tensors<S>(in, p, path);
  if (!p.all_finite())
    throw Error("checkpoint contains non-finite values: " + path);
  if (seed != nullptr) *seed = h.seed;
  return p;
}

template <typename S>
BaselineParams<S> load_baseline_checkpoint(const std::string& path,
                                           uint64_t* seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint: " + path);
  Header h = read_header(in, path);
  if (h.kind != ModelKind::Baseline)
    throw Error("checkpoint holds a joint model, expected baseline: " + path);
  if (h.scalar_size != sizeof(S))
    throw Error("checkpoint precision does not match requested precision: " +
                path);
  BaselineHyper hyper;
  hyper.input_dim = read_pod<int32_t>(in, path);
  hyper.hidden = read_pod<int32_t>(in, path);
  hyper.att_dim = read_pod<int32_t>(in, path);
  hyper.att_kind = att_kind_from_byte(read_pod<uint8_t>(in, path), path);
  hyper.dropout = read_pod<double>(in, path);
  BaselineParams<S> p = BaselineParams<S>::zeros(hyper);
  read_tensors<S>(in, p, path);
  if (seed != nullptr) *seed = h.seed;
  return p;
}

template RankerParams<double> load_joint_checkpoint<double>(const std::string&,
                                                            uint64_t*);
template RankerParams<float> load_joint_checkpoint<float>(const std::string&,
                                                          uint64_t*);
template BaselineParams<double> load_baseline_checkpoint<double>(
    const std::string&, uint64_t*);
template BaselineParams<float> load_baseline_checkpoint<float>(
    const std::string&, uint64_t*);

}  // namespace revmine
