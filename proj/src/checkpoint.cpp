#include "checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "wplus/error.hpp"

namespace wplus::ckpt {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint blobs are written in native little-endian order");

std::size_t element_count(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

}  // namespace

void round_to_f32(std::vector<double>& values) {
  for (double& v : values) v = static_cast<double>(static_cast<float>(v));
}

void write(const fs::path& dir, const Container& container) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create checkpoint directory '" + dir.string() + "': " + ec.message());

  json table = json::object();
  std::ofstream blob(dir / kBlob, std::ios::binary | std::ios::trunc);
  if (!blob) fail(ErrorKind::Io, "cannot open '" + (dir / kBlob).string() + "' for writing");
  std::uint64_t offset = 0;
  for (const auto& [name, entry] : container.tensors) {
    table[name] = {{"shape", entry.shape}, {"dtype", "f32"}, {"file", kBlob}, {"byte_offset", offset}};
    for (double v : entry.values) {
      const float f = static_cast<float>(v);
      blob.write(reinterpret_cast<const char*>(&f), sizeof f);
    }
    offset += entry.values.size() * sizeof(float);
  }
  if (!blob) fail(ErrorKind::Io, "failed writing checkpoint blob");

  json manifest = {{"format", kFormat},
                   {"version", kVersion},
                   {"kind", container.kind},
                   {"config", container.config},
                   {"tensors", table}};
  std::ofstream out(dir / kManifest, std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open '" + (dir / kManifest).string() + "' for writing");
  out << manifest.dump(2) << "\n";
  if (!out) fail(ErrorKind::Io, "failed writing checkpoint manifest");
}

Container read(const fs::path& dir) {
  std::ifstream in(dir / kManifest);
  if (!in) fail(ErrorKind::Io, "cannot open checkpoint manifest '" + (dir / kManifest).string() + "'");
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, std::string("corrupt checkpoint manifest: ") + e.what());
  }

  Container container;
  try {
    if (manifest.at("format").get<std::string>() != kFormat)
      fail(ErrorKind::Format, "not an " + std::string(kFormat) + " checkpoint");
    const int version = manifest.at("version").get<int>();
    if (version != kVersion)
      fail(ErrorKind::Format, "unsupported checkpoint version " + std::to_string(version) +
                                  " (reader supports version " + std::to_string(kVersion) + ")");
    container.kind = manifest.at("kind").get<std::string>();
    container.config = manifest.at("config");

    std::map<std::string, std::vector<char>> blobs;
    for (const auto& [name, info] : manifest.at("tensors").items()) {
      if (info.at("dtype").get<std::string>() != "f32")
        fail(ErrorKind::Format, "tensor '" + name + "' has unsupported dtype");
      Entry entry;
      entry.shape = info.at("shape").get<std::vector<std::size_t>>();
      const auto file = info.at("file").get<std::string>();
      const auto offset = info.at("byte_offset").get<std::uint64_t>();
      auto it = blobs.find(file);
      if (it == blobs.end()) {
        std::ifstream b(dir / file, std::ios::binary);
        if (!b) fail(ErrorKind::Format, "missing tensor '" + name + "': blob '" + file + "' not found");
        std::ostringstream ss;
        ss << b.rdbuf();
        const std::string bytes = ss.str();
        it = blobs.emplace(file, std::vector<char>(bytes.begin(), bytes.end())).first;
      }
      const std::size_t count = element_count(entry.shape);
      const std::uint64_t end = offset + count * sizeof(float);
      if (end > it->second.size())
        fail(ErrorKind::Format, "missing tensor '" + name + "': blob '" + file + "' truncated at byte " +
                                    std::to_string(it->second.size()) + ", tensor needs bytes up to " +
                                    std::to_string(end));
      entry.values.resize(count);
      for (std::size_t i = 0; i < count; ++i) {
        float f;
        std::memcpy(&f, it->second.data() + offset + i * sizeof(float), sizeof f);
        entry.values[i] = f;
      }
      container.tensors.emplace(name, std::move(entry));
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, std::string("corrupt checkpoint manifest: ") + e.what());
  }
  return container;
}

const std::vector<double>& take(const Container& container, const std::string& name,
                                std::size_t expected_count) {
  auto it = container.tensors.find(name);
  if (it == container.tensors.end()) fail(ErrorKind::Format, "missing tensor '" + name + "'");
  if (it->second.values.size() != expected_count)
    fail(ErrorKind::Format, "tensor '" + name + "' has " + std::to_string(it->second.values.size()) +
                                " elements, expected " + std::to_string(expected_count));
  return it->second.values;
}

}  // namespace wplus::ckpt
