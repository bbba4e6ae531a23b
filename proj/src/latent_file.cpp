#include "wplus/latent_file.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "wplus/error.hpp"

namespace wplus {

namespace {

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

}  // namespace

std::vector<unsigned char> encode_latent(const ExtendedLatent& latent) {
  std::vector<unsigned char> out{'W', 'P', 'L', 'T'};
  put_u32(out, kLatentFileVersion);
  put_u32(out, static_cast<std::uint32_t>(latent.layers()));
  put_u32(out, static_cast<std::uint32_t>(latent.dim()));
  for (double v : latent.values()) {
    const float f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof bits);
    put_u32(out, bits);
  }
  return out;
}

ExtendedLatent decode_latent(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < 16) fail(ErrorKind::Format, "latent file too short for header (" + std::to_string(bytes.size()) + " bytes)");
  if (std::memcmp(bytes.data(), "WPLT", 4) != 0) fail(ErrorKind::Format, "latent file has bad magic (expected WPLT)");
  const std::uint32_t version = get_u32(bytes.data() + 4);
  if (version != kLatentFileVersion)
    fail(ErrorKind::Format, "unsupported latent file version " + std::to_string(version));
  const std::uint32_t layers = get_u32(bytes.data() + 8);
  const std::uint32_t dim = get_u32(bytes.data() + 12);
  const std::uint64_t expected = 16 + 4ULL * layers * dim;
  if (bytes.size() != expected)
    fail(ErrorKind::Format, "latent file size " + std::to_string(bytes.size()) + " does not match header (" +
                                std::to_string(expected) + " bytes for " + std::to_string(layers) + "x" +
                                std::to_string(dim) + ")");
  ExtendedLatent latent(layers, dim);
  for (std::size_t i = 0; i < latent.size(); ++i) {
    const std::uint32_t bits = get_u32(bytes.data() + 16 + 4 * i);
    float f;
    std::memcpy(&f, &bits, sizeof f);
    latent.values()[i] = f;
  }
  return latent;
}

void write_latent_file(const ExtendedLatent& latent, const std::filesystem::path& path) {
  const auto bytes = encode_latent(latent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

ExtendedLatent read_latent_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open latent file '" + path.string() + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_latent(bytes);
}

ExtendedLatent quantize_f32(const ExtendedLatent& latent) {
  ExtendedLatent out = latent;
  for (double& v : out.values()) v = static_cast<float>(v);
  return out;
}

}  // namespace wplus
