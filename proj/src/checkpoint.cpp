#include "heartid/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>

#include "heartid/errors.hpp"

namespace heartid {

namespace {

constexpr char kMagic[8] = {'H', 'I', 'D', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

void put_u64(std::ofstream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint64_t get_u64(std::ifstream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw DataError("truncated checkpoint");
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const std::string& config_echo,
                     const std::vector<Param*>& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));
  out.write(reinterpret_cast<const char*>(&kVersion), sizeof(kVersion));
  put_u64(out, config_echo.size());
  out.write(config_echo.data(), static_cast<std::streamsize>(config_echo.size()));
  put_u64(out, params.size());
  for (const Param* p : params) {
    put_u64(out, p->name.size());
    out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    put_u64(out, p->w.shape.size());
    for (std::size_t d : p->w.shape) put_u64(out, d);
    out.write(reinterpret_cast<const char*>(p->w.v.data()),
              static_cast<std::streamsize>(p->w.v.size() * sizeof(double)));
  }
}

CheckpointData load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw DataError("not a checkpoint file: " + path);
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (!in || version != kVersion)
    throw DataError("unsupported checkpoint version");

  CheckpointData data;
  std::uint64_t cfg_len = get_u64(in);
  data.config_echo.resize(cfg_len);
  in.read(data.config_echo.data(), static_cast<std::streamsize>(cfg_len));
  std::uint64_t n_params = get_u64(in);
  for (std::uint64_t i = 0; i < n_params; ++i) {
    std::uint64_t name_len = get_u64(in);
    std::string name(name_len, '\0');
    in.read(name.data(), static_cast<std::streamsize>(name_len));
    std::uint64_t rank = get_u64(in);
    std::vector<std::size_t> shape(rank);
    for (std::uint64_t d = 0; d < rank; ++d) shape[d] = get_u64(in);
    Tensor t(shape);
    in.read(reinterpret_cast<char*>(t.v.data()),
            static_cast<std::streamsize>(t.v.size() * sizeof(double)));
    if (!in) throw DataError("truncated checkpoint tensor: " + name);
    data.names.push_back(std::move(name));
    data.tensors.push_back(std::move(t));
  }
  return data;
}

void apply_checkpoint(const CheckpointData& data, const std::vector<Param*>& params) {
  std::map<std::string, const Tensor*> by_name;
  for (std::size_t i = 0; i < data.names.size(); ++i)
    by_name[data.names[i]] = &data.tensors[i];
  for (Param* p : params) {
    auto it = by_name.find(p->name);
    if (it == by_name.end())
      throw DataError("checkpoint missing parameter: " + p->name);
    if (it->second->shape != p->w.shape)
      throw DataError("checkpoint shape mismatch for " + p->name);
    p->w = *it->second;
  }
}

}  // namespace heartid
