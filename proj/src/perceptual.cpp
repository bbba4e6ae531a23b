#include "wplus/perceptual.hpp"

#include <cmath>
#include <string>

#include "checkpoint.hpp"
#include "wplus/error.hpp"
#include "wplus/rng.hpp"

namespace wplus {

namespace {

constexpr double kBiasStd = 0.01;
// Stage nonlinearity: smooth ReLU (x + sqrt(x² + δ²))/2.
constexpr double kSmoothing = 0.125;

FeatureOp conv(std::size_t in, std::size_t out) {
  FeatureOp op;
  op.kind = FeatureOp::Kind::Conv;
  op.in_channels = in;
  op.out_channels = out;
  op.weight.resize(out * in * 9);
  op.bias.resize(out);
  return op;
}

// conv1_1 | conv1_2 | pool conv2_1 conv2_2 pool conv3_1 conv3_2 | pool conv4_1 conv4_2
std::array<FeatureStage, kNumTaps> layout(const ExtractorConfig& cfg) {
  const std::size_t c1 = cfg.widths[0], c2 = cfg.widths[1], c3 = cfg.widths[2], c4 = cfg.widths[3];
  const std::size_t mid = 2 * c2;
  std::array<FeatureStage, kNumTaps> s;
  s[0] = {conv(3, c1)};
  s[1] = {conv(c1, c2)};
  s[2] = {FeatureOp::pool(), conv(c2, mid), conv(mid, mid), FeatureOp::pool(), conv(mid, c3), conv(c3, c3)};
  s[3] = {FeatureOp::pool(), conv(c3, c4), conv(c4, c4)};
  return s;
}

std::string tensor_name(std::size_t stage, std::size_t conv_index, const char* what) {
  return "fx.stage" + std::to_string(stage + 1) + ".conv" + std::to_string(conv_index + 1) + "." + what;
}

}  // namespace

void ExtractorConfig::validate() const {
  for (auto w : widths) require(w >= 1, ErrorKind::InvalidArgument, "extractor widths must be positive");
}

void LossWeights::validate() const {
  require(lambda_mse >= 0.0 && std::isfinite(lambda_mse), ErrorKind::InvalidArgument,
          "lambda_mse must be a finite value >= 0");
  for (double l : lambda_stage)
    require(l >= 0.0 && std::isfinite(l), ErrorKind::InvalidArgument, "stage weights must be finite and >= 0");
  require(loss_resolution >= 8 && is_power_of_two(loss_resolution), ErrorKind::InvalidArgument,
          "loss_resolution must be a power of two >= 8");
}

FeatureExtractor::FeatureExtractor(std::array<FeatureStage, kNumTaps> stages, ExtractorConfig config)
    : config_(config), stages_(std::move(stages)) {
  std::size_t channels = 3;
  for (const auto& stage : stages_)
    for (const auto& op : stage) {
      if (op.kind == FeatureOp::Kind::Pool) continue;
      require(op.in_channels == channels, ErrorKind::Format, "extractor stage channel chain is broken");
      require(op.weight.size() == op.out_channels * op.in_channels * 9 && op.bias.size() == op.out_channels,
              ErrorKind::Format, "extractor conv tensor shape mismatch");
      channels = op.out_channels;
    }
}

FeatureExtractor FeatureExtractor::build_random(const ExtractorConfig& config) {
  config.validate();
  auto stages = layout(config);
  Rng rng(config.seed);
  for (auto& stage : stages)
    for (auto& op : stage) {
      if (op.kind == FeatureOp::Kind::Pool) continue;
      const double std_w = std::sqrt(2.0 / static_cast<double>(9 * op.in_channels));
      for (double& v : op.weight) v = static_cast<float>(rng.gaussian() * std_w);
      for (double& v : op.bias) v = static_cast<float>(rng.gaussian() * kBiasStd);
    }
  return FeatureExtractor(std::move(stages), config);
}

FeaturePass FeatureExtractor::forward(const ImageBuffer& image) const {
  require(image.side() >= 8, ErrorKind::InvalidArgument, "extractor input side must be >= 8");
  FeaturePass pass;
  pass.extractor_ = this;
  pass.side_ = image.side();
  Tensor x = to_tensor(image);
  for (std::size_t j = 0; j < kNumTaps; ++j) {
    for (const auto& op : stages_[j]) {
      if (op.kind == FeatureOp::Kind::Pool) {
        require(x.height % 2 == 0, ErrorKind::InvalidArgument, "extractor input too small for pooling");
        x = avgpool2x2(x);
        continue;
      }
      x = conv3x3(x, op.weight, op.bias, op.out_channels);
      Tensor slope;
      smooth_leaky_relu_inplace(x, 0.0, kSmoothing, &slope);
      pass.activation_slopes_[j].push_back(std::move(slope));
    }
    pass.pyramid_.maps[j] = x;
  }
  return pass;
}

FeaturePyramid FeatureExtractor::extract(const ImageBuffer& image) const { return forward(image).pyramid(); }

ImageBuffer FeaturePass::backward(const std::array<Tensor, kNumTaps>& grad_taps) const {
  const auto& stages = extractor_->stages();
  Tensor g;
  for (std::size_t j = kNumTaps; j-- > 0;) {
    const Tensor& tap = grad_taps[j];
    require(tap.data.empty() || tap.same_shape(pyramid_.maps[j]), ErrorKind::ShapeMismatch, "tap gradient has wrong shape");
    if (g.data.empty()) {
      g = tap.data.empty() ? Tensor(pyramid_.maps[j].channels, pyramid_.maps[j].height, pyramid_.maps[j].width)
                           : tap;
    } else if (!tap.data.empty()) {
      for (std::size_t k = 0; k < g.data.size(); ++k) g.data[k] += tap.data[k];
    }
    std::size_t conv_index = activation_slopes_[j].size();
    for (std::size_t k = stages[j].size(); k-- > 0;) {
      const auto& op = stages[j][k];
      if (op.kind == FeatureOp::Kind::Pool) {
        g = avgpool2x2_backward(g);
        continue;
      }
      const Tensor& slope = activation_slopes_[j][--conv_index];
      for (std::size_t i = 0; i < g.data.size(); ++i) g.data[i] *= slope.data[i];
      g = conv3x3_backward(g, op.weight, op.in_channels);
    }
  }
  require(g.channels == 3 && g.height == side_, ErrorKind::ShapeMismatch, "extractor backward shape");
  return from_tensor(g);
}

namespace {

double stage_term(const Tensor& a, const Tensor& b, double lambda, Tensor* grad) {
  const double n = static_cast<double>(a.size());
  double acc = 0.0;
  if (grad) *grad = Tensor(a.channels, a.height, a.width);
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    acc += d * d;
    if (grad) grad->data[i] = 2.0 * lambda / n * d;
  }
  return lambda / n * acc;
}

void require_same_side(const ImageBuffer& a, const ImageBuffer& b) {
  if (a.side() != b.side())
    fail(ErrorKind::ShapeMismatch, "image sizes differ (" + std::to_string(a.side()) + " vs " +
                                       std::to_string(b.side()) + ")");
}

}  // namespace

double perceptual_loss(const FeatureExtractor& extractor, const ImageBuffer& a, const ImageBuffer& b,
                       const LossWeights& weights) {
  require_same_side(a, b);
  const FeaturePyramid fa = extractor.extract(a);
  const FeaturePyramid fb = extractor.extract(b);
  double total = 0.0;
  for (std::size_t j = 0; j < kNumTaps; ++j)
    total += stage_term(fa.maps[j], fb.maps[j], weights.lambda_stage[j], nullptr);
  return total;
}

LossValue embedding_loss(const FeatureExtractor& extractor, const ImageBuffer& generated,
                         const ImageBuffer& target, const LossWeights& weights) {
  require_same_side(generated, target);
  return EmbeddingObjective(extractor, target, weights).evaluate(generated, nullptr);
}

EmbeddingObjective::EmbeddingObjective(const FeatureExtractor& extractor, ImageBuffer target,
                                       LossWeights weights)
    : extractor_(&extractor), target_(std::move(target)), weights_(weights) {
  weights_.validate();
  target_features_ = extractor_->extract(resize(target_, weights_.loss_resolution));
}

LossValue EmbeddingObjective::evaluate(const ImageBuffer& generated, ImageBuffer* grad) const {
  require_same_side(generated, target_);
  LossValue value;

  const ImageBuffer resized = resize(generated, weights_.loss_resolution);
  const FeaturePass pass = extractor_->forward(resized);
  std::array<Tensor, kNumTaps> tap_grads;
  for (std::size_t j = 0; j < kNumTaps; ++j)
    value.percept += stage_term(pass.pyramid().maps[j], target_features_.maps[j], weights_.lambda_stage[j],
                                grad ? &tap_grads[j] : nullptr);

  const double n = static_cast<double>(generated.size());
  value.mse = squared_distance(generated, target_) / n;
  value.total = value.percept + weights_.lambda_mse * value.mse;

  if (grad) {
    *grad = resize_backward(pass.backward(tap_grads), generated.side());
    const double k = 2.0 * weights_.lambda_mse / n;
    for (std::size_t i = 0; i < generated.size(); ++i)
      grad->pixels()[i] += k * (generated.pixels()[i] - target_.pixels()[i]);
  }
  return value;
}

void save_extractor(const FeatureExtractor& extractor, const std::filesystem::path& dir) {
  ckpt::Container c;
  c.kind = "extractor";
  const auto& cfg = extractor.config();
  c.config = {{"widths", cfg.widths}, {"seed", cfg.seed}};
  const auto& stages = extractor.stages();
  for (std::size_t j = 0; j < kNumTaps; ++j) {
    std::size_t k = 0;
    for (const auto& op : stages[j]) {
      if (op.kind == FeatureOp::Kind::Pool) continue;
      c.tensors[tensor_name(j, k, "weight")] = {{op.out_channels, op.in_channels, 3, 3}, op.weight};
      c.tensors[tensor_name(j, k, "bias")] = {{op.out_channels}, op.bias};
      ++k;
    }
  }
  ckpt::write(dir, c);
}

FeatureExtractor load_extractor(const std::filesystem::path& dir) {
  const ckpt::Container c = ckpt::read(dir);
  if (c.kind != "extractor") fail(ErrorKind::Format, "checkpoint kind is '" + c.kind + "', expected 'extractor'");
  ExtractorConfig cfg;
  try {
    cfg.widths = c.config.at("widths").get<std::array<std::uint32_t, kNumTaps>>();
    cfg.seed = c.config.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Format, std::string("corrupt checkpoint manifest: ") + e.what());
  }
  auto stages = layout(cfg);
  for (std::size_t j = 0; j < kNumTaps; ++j) {
    std::size_t k = 0;
    for (auto& op : stages[j]) {
      if (op.kind == FeatureOp::Kind::Pool) continue;
      op.weight = ckpt::take(c, tensor_name(j, k, "weight"), op.weight.size());
      op.bias = ckpt::take(c, tensor_name(j, k, "bias"), op.bias.size());
      ++k;
    }
  }
  return FeatureExtractor(std::move(stages), cfg);
}

}  // namespace wplus
