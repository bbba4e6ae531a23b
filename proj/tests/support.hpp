#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <string>
#include <vector>

#include "wplus/embedder.hpp"
#include "wplus/generator.hpp"
#include "wplus/perceptual.hpp"
#include "wplus/rng.hpp"

namespace testing {

// Small instances keep unit tests fast: 16² (L=6), D=16.
inline wplus::GeneratorConfig small_generator_config(std::uint64_t seed = 3) {
  wplus::GeneratorConfig c;
  c.resolution = 16;
  c.style_dim = 16;
  c.mapping_layers = 2;
  c.base_channels = 4;
  c.channel_cap = 8;
  c.seed = seed;
  return c;
}

inline wplus::ExtractorConfig small_extractor_config(std::uint64_t seed = 5) {
  wplus::ExtractorConfig c;
  c.widths = {4, 4, 8, 8};
  c.seed = seed;
  return c;
}

inline wplus::LossWeights native_loss(std::size_t resolution) {
  wplus::LossWeights w;
  w.loss_resolution = static_cast<std::uint32_t>(resolution);
  return w;
}

inline std::vector<double> gaussian_vector(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  wplus::Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = scale * rng.gaussian();
  return v;
}

inline wplus::ExtendedLatent random_latent(std::size_t layers, std::size_t dim, std::uint64_t seed,
                                           double scale = 1.0) {
  return wplus::ExtendedLatent(layers, dim, gaussian_vector(layers * dim, seed, scale));
}

/// broadcast(map(z)) for a seeded Gaussian z.
inline wplus::ExtendedLatent mapped_latent(const wplus::Generator& g, std::uint64_t seed) {
  return wplus::broadcast(g.map(wplus::LatentZ{gaussian_vector(g.style_dim(), seed)}), g.num_layers());
}

/// Central difference of f along coordinate i of x with step h.
inline double central_difference(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x, std::size_t i, double h) {
  const double x0 = x[i];
  x[i] = x0 + h;
  const double up = f(x);
  x[i] = x0 - h;
  const double down = f(x);
  return (up - down) / (2.0 * h);
}

inline double relative_error(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("wplus_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::vector<unsigned char> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_bytes(const std::filesystem::path& p, const std::vector<unsigned char>& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace testing
