#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "wplus/image.hpp"
#include "wplus/latent.hpp"
#include "wplus/tensor.hpp"

namespace wplus {

/// Geometry and seed of a layered style-based generator.
///
/// Synthesis runs two style layers per resolution from 4×4 up to
/// `resolution`, so the number of style layers is 2·(log2(resolution) − 1).
/// Channel width at resolution r is min(channel_cap, base_channels·resolution/r).
struct GeneratorConfig {
  std::uint32_t resolution = 1024;
  std::uint32_t style_dim = 512;
  std::uint32_t mapping_layers = 3;
  std::uint32_t base_channels = 32;
  std::uint32_t channel_cap = 512;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t num_style_layers() const;
  std::size_t layer_resolution(std::size_t layer) const;
  std::size_t channels_at(std::size_t res) const;

  friend bool operator==(const GeneratorConfig&, const GeneratorConfig&) = default;
};

/// One noise image per synthesis layer, held fixed for the lifetime of a run.
struct NoiseBundle {
  std::uint64_t seed = 0;
  std::vector<Tensor> planes;  // 1×r×r each
};

NoiseBundle make_noise(const GeneratorConfig& config, std::uint64_t seed);

struct DenseWeights {
  std::size_t in = 0, out = 0;
  std::vector<double> weight;  // [out][in]
  std::vector<double> bias;
};

struct SynthesisLayerWeights {
  std::size_t in_channels = 0, out_channels = 0, resolution = 0;
  bool upsample = false;
  std::vector<double> conv_weight;  // [out][in][3][3]
  std::vector<double> conv_bias;
  std::vector<double> style_weight;  // [2·out][style_dim]: rows [0,out) scale, [out,2·out) shift
  std::vector<double> style_bias;
  std::vector<double> noise_scale;  // per output channel
};

struct GeneratorWeights {
  std::vector<DenseWeights> mapping;
  Tensor constant;
  std::vector<SynthesisLayerWeights> layers;
  std::vector<double> rgb_weight;  // [3][C_last]
  std::vector<double> rgb_bias;
};

class SynthesisPass;

/// Immutable generator: mapping network, synthesis network and the noise
/// bundle generated from the config seed. Safe to share across threads.
class Generator {
 public:
  Generator(GeneratorConfig config, GeneratorWeights weights);

  /// Seeded toy instance. Weights are zero-mean Gaussians scaled by fan-in,
  /// rounded to float32 so checkpoints round-trip exactly.
  static Generator build_toy(const GeneratorConfig& config);

  const GeneratorConfig& config() const { return config_; }
  const GeneratorWeights& weights() const { return weights_; }
  const NoiseBundle& noise() const { return noise_; }

  std::size_t num_layers() const { return config_.num_style_layers(); }
  std::size_t style_dim() const { return config_.style_dim; }
  std::size_t resolution() const { return config_.resolution; }

  StyleVector map(const LatentZ& z) const;
  /// Vector-Jacobian product of map at z.
  LatentZ map_backward(const LatentZ& z, const StyleVector& grad_w) const;

  ImageBuffer synthesize(const ExtendedLatent& latent) const;
  ImageBuffer synthesize(const ExtendedLatent& latent, const NoiseBundle& noise) const;
  SynthesisPass forward(const ExtendedLatent& latent, const NoiseBundle& noise) const;
  SynthesisPass forward(const ExtendedLatent& latent) const;

  /// FNV-1a over the float32 bytes of every weight tensor.
  std::uint64_t weight_checksum() const;

 private:
  void check_latent(const ExtendedLatent& latent) const;
  void check_noise(const NoiseBundle& noise) const;

  GeneratorConfig config_;
  GeneratorWeights weights_;
  NoiseBundle noise_;
};

/// Intermediate activations of one synthesis forward pass, for backprop.
class SynthesisPass {
 public:
  const ImageBuffer& image() const { return image_; }

  /// Gradient of a scalar loss with respect to the latent, given its
  /// gradient with respect to the output image.
  ExtendedLatent backward(const ImageBuffer& grad_image) const;

 private:
  friend class Generator;

  struct LayerTape {
    Tensor input;           // after upsampling
    Tensor activation_slope;  // f'(conv + bias + noise)
    Tensor normalized;
    std::vector<double> inv_std;
    std::vector<double> scale;  // 1 + style scale
  };

  const Generator* generator_ = nullptr;
  std::vector<LayerTape> tape_;
  ImageBuffer image_;
};

/// Sample mean of map(z) over `samples` standard-Gaussian draws.
StyleVector mean_latent(const Generator& generator, std::size_t samples, std::uint64_t seed);

void save_generator(const Generator& generator, const std::filesystem::path& dir);
Generator load_generator(const std::filesystem::path& dir);

}  // namespace wplus
