#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wplus/latent.hpp"

namespace wplus {

// Binary container for one ExtendedLatent: "WPLT", u32 version (1), u32 L,
// u32 D, then L·D little-endian float32 values, row-major.
inline constexpr std::uint32_t kLatentFileVersion = 1;

std::vector<unsigned char> encode_latent(const ExtendedLatent& latent);
ExtendedLatent decode_latent(const std::vector<unsigned char>& bytes);

void write_latent_file(const ExtendedLatent& latent, const std::filesystem::path& path);
ExtendedLatent read_latent_file(const std::filesystem::path& path);

/// Rounds every entry to float32, the precision a latent file stores.
ExtendedLatent quantize_f32(const ExtendedLatent& latent);

}  // namespace wplus
