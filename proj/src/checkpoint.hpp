#pragma once

// Shared "lsg-ckpt" container: a directory holding manifest.json plus a raw
// little-endian float32 blob. Used for both generator and extractor weights.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace wplus::ckpt {

inline constexpr const char* kFormat = "lsg-ckpt";
inline constexpr int kVersion = 1;
inline constexpr const char* kManifest = "manifest.json";
inline constexpr const char* kBlob = "tensors.bin";

struct Entry {
  std::vector<std::size_t> shape;
  std::vector<double> values;  // float32-representable
};

struct Container {
  std::string kind;
  nlohmann::json config;
  std::map<std::string, Entry> tensors;
};

void write(const std::filesystem::path& dir, const Container& container);
Container read(const std::filesystem::path& dir);

/// Fetches a tensor and checks its element count; missing names are a format error.
const std::vector<double>& take(const Container& container, const std::string& name,
                                std::size_t expected_count);

/// Rounds each value to float32 precision so it survives the blob round trip.
void round_to_f32(std::vector<double>& values);

}  // namespace wplus::ckpt
