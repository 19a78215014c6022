#include "hycore/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "hycore/errors.hpp"

namespace hycore::nn {

namespace {

constexpr char kMagic[4] = {'H', 'Y', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw DataError("checkpoint: truncated file");
  return value;
}

void write_tensor(std::ofstream& out, const std::string& name, const ad::Tensor& t) {
  write_pod(out, static_cast<std::uint32_t>(name.size()));
  out.write(name.data(), static_cast<std::streamsize>(name.size()));
  write_pod(out, static_cast<std::uint32_t>(t.rank()));
  for (auto e : t.shape) write_pod(out, static_cast<std::uint64_t>(e));
  out.write(reinterpret_cast<const char*>(t.v.data()),
            static_cast<std::streamsize>(t.v.size() * sizeof(double)));
}

std::pair<std::string, ad::Tensor> read_tensor(std::ifstream& in) {
  const auto name_len = read_pod<std::uint32_t>(in);
  std::string name(name_len, '\0');
  in.read(name.data(), name_len);
  const auto rank = read_pod<std::uint32_t>(in);
  std::vector<std::size_t> shape(rank);
  for (auto& e : shape) e = static_cast<std::size_t>(read_pod<std::uint64_t>(in));
  std::vector<double> v(ad::shape_size(shape));
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!in) throw DataError("checkpoint: truncated tensor " + name);
  return {std::move(name), ad::Tensor(std::move(shape), std::move(v))};
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ModelState& state,
                     const CheckpointMeta& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("checkpoint: cannot write " + path.string());
  out.write(kMagic, 4);
  write_pod(out, kVersion);
  write_pod(out, static_cast<std::uint8_t>(state.curv.euclidean ? 1 : 0));
  write_pod(out, state.curv.c);
  write_pod(out, static_cast<std::uint64_t>(state.encoder.h1));
  write_pod(out, static_cast<std::uint64_t>(state.encoder.h2));
  write_pod(out, static_cast<std::uint64_t>(state.encoder.m));
  write_pod(out, static_cast<std::uint64_t>(state.f));
  write_pod(out, static_cast<std::uint64_t>(state.num_classes));
  write_pod(out, static_cast<std::int32_t>(meta.epoch));

  // params() wants a mutable state; copy is cheap relative to the I/O here
  ModelState copy = state;
  auto refs = copy.params();
  write_pod(out, static_cast<std::uint32_t>(refs.size()));
  for (const auto& ref : refs) write_tensor(out, ref.name, *ref.tensor);
  if (!out) throw DataError("checkpoint: write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("checkpoint: cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("checkpoint: bad magic in " + path.string());
  if (read_pod<std::uint32_t>(in) != kVersion)
    throw DataError("checkpoint: unsupported version in " + path.string());

  Checkpoint ck;
  ck.state.curv.euclidean = read_pod<std::uint8_t>(in) != 0;
  ck.state.curv.c = read_pod<double>(in);
  ck.state.encoder.h1 = static_cast<std::size_t>(read_pod<std::uint64_t>(in));
  ck.state.encoder.h2 = static_cast<std::size_t>(read_pod<std::uint64_t>(in));
  ck.state.encoder.m = static_cast<std::size_t>(read_pod<std::uint64_t>(in));
  ck.state.f = static_cast<std::size_t>(read_pod<std::uint64_t>(in));
  ck.state.num_classes = static_cast<std::size_t>(read_pod<std::uint64_t>(in));
  ck.meta.epoch = static_cast<int>(read_pod<std::int32_t>(in));

  const auto count = read_pod<std::uint32_t>(in);
  auto refs = ck.state.params();
  if (count != refs.size())
    throw DataError("checkpoint: unexpected tensor count in " + path.string());
  for (auto& ref : refs) {
    auto [name, tensor] = read_tensor(in);
    if (name != ref.name)
      throw DataError("checkpoint: expected tensor " + ref.name + ", found " + name);
    *ref.tensor = std::move(tensor);
  }
  return ck;
}

}  // namespace hycore::nn
