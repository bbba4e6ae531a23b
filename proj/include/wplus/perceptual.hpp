#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "wplus/image.hpp"
#include "wplus/tensor.hpp"

namespace wplus {

inline constexpr std::size_t kNumTaps = 4;

/// Tap widths of the four feature stages. The default mirrors the classifier
/// layout (64, 64, 256, 512); tests use narrower random extractors.
struct ExtractorConfig {
  std::array<std::uint32_t, kNumTaps> widths{64, 64, 256, 512};
  std::uint64_t seed = 0;

  void validate() const;
};

/// Convolution followed by a smooth ReLU, or a 2×2 average pool.
struct FeatureOp {
  enum class Kind { Conv, Pool };
  Kind kind = Kind::Conv;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::vector<double> weight;  // [out][in][3][3]
  std::vector<double> bias;

  static FeatureOp pool() { return FeatureOp{Kind::Pool, 0, 0, {}, {}}; }
};

using FeatureStage = std::vector<FeatureOp>;

/// The four tapped feature maps of one image.
struct FeaturePyramid {
  std::array<Tensor, kNumTaps> maps;

  /// N_j: scalar count of tap j.
  std::size_t count(std::size_t j) const { return maps[j].size(); }
};

class FeaturePass;

/// Immutable four-stage feature extractor. Stage 1 and 2 run at the input
/// resolution, stage 3 ends at 1/4 and stage 4 at 1/8 (with the default
/// layout). A stage with no ops is the identity.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(std::array<FeatureStage, kNumTaps> stages, ExtractorConfig config = {});

  /// Seeded-random weights, He-scaled Gaussians rounded to float32.
  static FeatureExtractor build_random(const ExtractorConfig& config);

  const ExtractorConfig& config() const { return config_; }
  const std::array<FeatureStage, kNumTaps>& stages() const { return stages_; }

  FeaturePyramid extract(const ImageBuffer& image) const;
  FeaturePass forward(const ImageBuffer& image) const;

 private:
  ExtractorConfig config_;
  std::array<FeatureStage, kNumTaps> stages_;
};

class FeaturePass {
 public:
  const FeaturePyramid& pyramid() const { return pyramid_; }

  /// Image gradient from per-tap gradients (each shaped like its tap).
  ImageBuffer backward(const std::array<Tensor, kNumTaps>& grad_taps) const;

 private:
  friend class FeatureExtractor;
  const FeatureExtractor* extractor_ = nullptr;
  std::size_t side_ = 0;
  std::array<std::vector<Tensor>, kNumTaps> activation_slopes_;  // f' per conv op
  FeaturePyramid pyramid_;
};

/// λ_mse, per-tap λ_j and the side at which the perceptual term is evaluated.
struct LossWeights {
  double lambda_mse = 1.0;
  std::array<double, kNumTaps> lambda_stage{1.0, 1.0, 1.0, 1.0};
  std::uint32_t loss_resolution = 256;

  void validate() const;
};

struct LossValue {
  double total = 0.0;
  double percept = 0.0;
  /// ‖G − I‖² / N at native resolution, before λ_mse.
  double mse = 0.0;
};

/// Σ_j (λ_j / N_j) ‖F_j(a) − F_j(b)‖², evaluated at the images' own size.
double perceptual_loss(const FeatureExtractor& extractor, const ImageBuffer& a, const ImageBuffer& b,
                       const LossWeights& weights);

/// Perceptual term on copies resized to loss_resolution, plus λ_mse times the
/// normalized pixel MSE at native resolution.
LossValue embedding_loss(const FeatureExtractor& extractor, const ImageBuffer& generated,
                         const ImageBuffer& target, const LossWeights& weights);

/// embedding_loss against a fixed target, with the target's features cached.
class EmbeddingObjective {
 public:
  EmbeddingObjective(const FeatureExtractor& extractor, ImageBuffer target, LossWeights weights);

  const ImageBuffer& target() const { return target_; }
  const LossWeights& weights() const { return weights_; }

  /// Loss value; when grad is non-null it receives dLoss/dgenerated.
  LossValue evaluate(const ImageBuffer& generated, ImageBuffer* grad) const;

 private:
  const FeatureExtractor* extractor_;
  ImageBuffer target_;
  LossWeights weights_;
  FeaturePyramid target_features_;
};

void save_extractor(const FeatureExtractor& extractor, const std::filesystem::path& dir);
FeatureExtractor load_extractor(const std::filesystem::path& dir);

}  // namespace wplus
