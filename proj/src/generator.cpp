#include "wplus/generator.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <string>

#include "checkpoint.hpp"
#include "wplus/error.hpp"
#include "wplus/rng.hpp"

namespace wplus {

namespace {

constexpr double kLeakySlope = 0.2;
// Synthesis uses the smoothed leaky rectifier so the image is smooth in the latent.
constexpr double kSmoothing = 0.125;
constexpr double kNormEpsilon = 1e-8;
// Style affine weights are N(0, (gain²)/D). A gain well below 1 keeps the
// modulation scale (1 + s) positive for typical codes.
constexpr double kStyleGain = 0.3;
constexpr double kBiasStd = 0.1;
constexpr std::uint64_t kNoiseStream = 1;

std::size_t log2_exact(std::size_t n) { return static_cast<std::size_t>(std::countr_zero(n)); }

std::vector<double> gaussian_vector(Rng& rng, std::size_t n, double stddev) {
  std::vector<double> v(n);
  for (double& x : v) x = static_cast<float>(rng.gaussian() * stddev);
  return v;
}

}  // namespace

void GeneratorConfig::validate() const {
  require(resolution >= 8 && is_power_of_two(resolution), ErrorKind::InvalidArgument,
          "generator resolution must be a power of two >= 8, got " + std::to_string(resolution));
  require(style_dim > 0, ErrorKind::InvalidArgument, "style_dim must be positive");
  require(mapping_layers >= 1, ErrorKind::InvalidArgument, "mapping_layers must be >= 1");
  require(base_channels >= 1 && channel_cap >= 1, ErrorKind::InvalidArgument,
          "channel counts must be positive");
}

std::size_t GeneratorConfig::num_style_layers() const { return 2 * (log2_exact(resolution) - 1); }

std::size_t GeneratorConfig::layer_resolution(std::size_t layer) const {
  return std::size_t{4} << (layer / 2);
}

std::size_t GeneratorConfig::channels_at(std::size_t res) const {
  const std::size_t wide = static_cast<std::size_t>(base_channels) * (resolution / res);
  return std::max<std::size_t>(1, std::min<std::size_t>(channel_cap, wide));
}

NoiseBundle make_noise(const GeneratorConfig& config, std::uint64_t seed) {
  NoiseBundle noise;
  noise.seed = seed;
  Rng rng(seed);
  for (std::size_t i = 0; i < config.num_style_layers(); ++i) {
    const std::size_t r = config.layer_resolution(i);
    Tensor plane(1, r, r);
    for (double& v : plane.data) v = rng.gaussian();
    noise.planes.push_back(std::move(plane));
  }
  return noise;
}

Generator::Generator(GeneratorConfig config, GeneratorWeights weights)
    : config_(config), weights_(std::move(weights)) {
  config_.validate();
  const std::size_t d = config_.style_dim;
  require(weights_.mapping.size() == config_.mapping_layers, ErrorKind::Format,
          "mapping layer count does not match config");
  for (const auto& fc : weights_.mapping)
    require(fc.in == d && fc.out == d && fc.weight.size() == d * d && fc.bias.size() == d,
            ErrorKind::Format, "mapping layer shape does not match style_dim");
  require(weights_.layers.size() == config_.num_style_layers(), ErrorKind::Format,
          "synthesis layer count does not match resolution");
  for (const auto& layer : weights_.layers) {
    const std::size_t ci = layer.in_channels, co = layer.out_channels;
    require(layer.conv_weight.size() == co * ci * 9 && layer.conv_bias.size() == co &&
                layer.style_weight.size() == 2 * co * d && layer.style_bias.size() == 2 * co &&
                layer.noise_scale.size() == co,
            ErrorKind::Format, "synthesis layer tensor shapes are inconsistent");
  }
  noise_ = make_noise(config_, derive_seed(config_.seed, kNoiseStream));
}

Generator Generator::build_toy(const GeneratorConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const std::size_t d = config.style_dim;
  GeneratorWeights w;

  for (std::size_t i = 0; i < config.mapping_layers; ++i) {
    DenseWeights fc;
    fc.in = fc.out = d;
    fc.weight = gaussian_vector(rng, d * d, std::sqrt(2.0 / static_cast<double>(d)));
    fc.bias = gaussian_vector(rng, d, kBiasStd);
    w.mapping.push_back(std::move(fc));
  }

  const std::size_t c0 = config.channels_at(4);
  w.constant = Tensor(c0, 4, 4);
  w.constant.data = gaussian_vector(rng, c0 * 16, 1.0);

  std::size_t cin = c0;
  for (std::size_t i = 0; i < config.num_style_layers(); ++i) {
    SynthesisLayerWeights layer;
    layer.resolution = config.layer_resolution(i);
    layer.upsample = i > 0 && i % 2 == 0;
    layer.in_channels = cin;
    layer.out_channels = config.channels_at(layer.resolution);
    const std::size_t co = layer.out_channels;
    layer.conv_weight = gaussian_vector(rng, co * cin * 9, std::sqrt(2.0 / static_cast<double>(9 * cin)));
    layer.conv_bias = gaussian_vector(rng, co, kBiasStd);
    layer.style_weight = gaussian_vector(rng, 2 * co * d, kStyleGain / std::sqrt(static_cast<double>(d)));
    layer.style_bias = gaussian_vector(rng, 2 * co, kBiasStd);
    layer.noise_scale = gaussian_vector(rng, co, kBiasStd);
    w.layers.push_back(std::move(layer));
    cin = co;
  }
  w.rgb_weight = gaussian_vector(rng, 3 * cin, std::sqrt(1.0 / static_cast<double>(cin)));
  w.rgb_bias.assign(3, 0.0);
  return Generator(config, std::move(w));
}

void Generator::check_latent(const ExtendedLatent& latent) const {
  if (latent.layers() != num_layers() || latent.dim() != style_dim())
    fail(ErrorKind::ShapeMismatch, "latent is " + std::to_string(latent.layers()) + "x" +
                                       std::to_string(latent.dim()) + " but generator expects " +
                                       std::to_string(num_layers()) + "x" + std::to_string(style_dim()));
}

void Generator::check_noise(const NoiseBundle& noise) const {
  require(noise.planes.size() == num_layers(), ErrorKind::ShapeMismatch,
          "noise bundle has wrong layer count");
  for (std::size_t i = 0; i < num_layers(); ++i) {
    const std::size_t r = config_.layer_resolution(i);
    require(noise.planes[i].channels == 1 && noise.planes[i].height == r && noise.planes[i].width == r,
            ErrorKind::ShapeMismatch, "noise plane " + std::to_string(i) + " has wrong size");
  }
}

StyleVector Generator::map(const LatentZ& z) const {
  require(z.values.size() == style_dim(), ErrorKind::ShapeMismatch,
          "z has dimension " + std::to_string(z.values.size()) + ", expected " + std::to_string(style_dim()));
  std::vector<double> x = z.values;
  for (const auto& fc : weights_.mapping) {
    x = dense(x, fc.weight, fc.bias, fc.out);
    for (double& v : x)
      if (v < 0.0) v *= kLeakySlope;
  }
  return StyleVector{std::move(x)};
}

LatentZ Generator::map_backward(const LatentZ& z, const StyleVector& grad_w) const {
  require(z.values.size() == style_dim() && grad_w.dim() == style_dim(), ErrorKind::ShapeMismatch,
          "map_backward: dimension mismatch");
  std::vector<std::vector<double>> pre;
  std::vector<double> x = z.values;
  for (const auto& fc : weights_.mapping) {
    x = dense(x, fc.weight, fc.bias, fc.out);
    pre.push_back(x);
    for (double& v : x)
      if (v < 0.0) v *= kLeakySlope;
  }
  std::vector<double> g = grad_w.values;
  for (std::size_t k = weights_.mapping.size(); k-- > 0;) {
    for (std::size_t i = 0; i < g.size(); ++i)
      if (pre[k][i] < 0.0) g[i] *= kLeakySlope;
    g = dense_backward(g, weights_.mapping[k].weight, weights_.mapping[k].in);
  }
  return LatentZ{std::move(g)};
}

ImageBuffer Generator::synthesize(const ExtendedLatent& latent) const {
  return forward(latent, noise_).image();
}

ImageBuffer Generator::synthesize(const ExtendedLatent& latent, const NoiseBundle& noise) const {
  return forward(latent, noise).image();
}

SynthesisPass Generator::forward(const ExtendedLatent& latent) const { return forward(latent, noise_); }

// Per layer: [upsample] → conv3x3 + bias → + noise_scale·noise → smoothed leaky ReLU →
// instance norm → x·(1 + s_scale) + s_shift with s = A·w_i + b.
SynthesisPass Generator::forward(const ExtendedLatent& latent, const NoiseBundle& noise) const {
  check_latent(latent);
  check_noise(noise);
  SynthesisPass pass;
  pass.generator_ = this;
  pass.tape_.resize(num_layers());

  Tensor x = weights_.constant;
  for (std::size_t i = 0; i < num_layers(); ++i) {
    const auto& lw = weights_.layers[i];
    auto& tape = pass.tape_[i];
    tape.input = lw.upsample ? upsample_nearest2x(x) : std::move(x);

    Tensor a = conv3x3(tape.input, lw.conv_weight, lw.conv_bias, lw.out_channels);
    const double* nz = noise.planes[i].data.data();
    const std::size_t hw = a.plane_size();
    for (std::size_t c = 0; c < a.channels; ++c) {
      double* p = a.plane(c);
      const double s = lw.noise_scale[c];
      for (std::size_t k = 0; k < hw; ++k) p[k] += s * nz[k];
    }
    smooth_leaky_relu_inplace(a, kLeakySlope, kSmoothing, &tape.activation_slope);

    const std::vector<double> style = dense(latent.row(i), lw.style_weight, lw.style_bias, 2 * lw.out_channels);
    tape.inv_std.resize(a.channels);
    tape.scale.resize(a.channels);
    Tensor y(a.channels, a.height, a.width);
    tape.normalized = Tensor(a.channels, a.height, a.width);
    for (std::size_t c = 0; c < a.channels; ++c) {
      const double* p = a.plane(c);
      double mean = 0.0;
      for (std::size_t k = 0; k < hw; ++k) mean += p[k];
      mean /= static_cast<double>(hw);
      double var = 0.0;
      for (std::size_t k = 0; k < hw; ++k) var += (p[k] - mean) * (p[k] - mean);
      var /= static_cast<double>(hw);
      const double inv = 1.0 / std::sqrt(var + kNormEpsilon);
      const double scale = 1.0 + style[c];
      const double shift = style[a.channels + c];
      double* n = tape.normalized.plane(c);
      double* out = y.plane(c);
      for (std::size_t k = 0; k < hw; ++k) {
        n[k] = (p[k] - mean) * inv;
        out[k] = n[k] * scale + shift;
      }
      tape.inv_std[c] = inv;
      tape.scale[c] = scale;
    }
    x = std::move(y);
  }

  Tensor rgb = conv1x1(x, weights_.rgb_weight, weights_.rgb_bias, 3);
  for (double& v : rgb.data) v = 0.5 * (v + 1.0);
  pass.image_ = from_tensor(rgb);
  return pass;
}

ExtendedLatent SynthesisPass::backward(const ImageBuffer& grad_image) const {
  const Generator& gen = *generator_;
  const auto& w = gen.weights();
  require(grad_image.side() == image_.side(), ErrorKind::ShapeMismatch, "gradient image has wrong size");

  Tensor g = to_tensor(grad_image);
  for (double& v : g.data) v *= 0.5;
  const std::size_t c_last = w.layers.back().out_channels;
  Tensor gy = conv1x1_backward(g, w.rgb_weight, c_last);

  ExtendedLatent grad(gen.num_layers(), gen.style_dim());
  for (std::size_t i = gen.num_layers(); i-- > 0;) {
    const auto& lw = w.layers[i];
    const auto& tape = tape_[i];
    const std::size_t channels = lw.out_channels;
    const std::size_t hw = gy.plane_size();
    const double inv_hw = 1.0 / static_cast<double>(hw);

    std::vector<double> grad_style(2 * channels);
    Tensor ga(channels, gy.height, gy.width);
    for (std::size_t c = 0; c < channels; ++c) {
      const double* dy = gy.plane(c);
      const double* n = tape.normalized.plane(c);
      double d_scale = 0.0, d_shift = 0.0;
      for (std::size_t k = 0; k < hw; ++k) {
        d_scale += dy[k] * n[k];
        d_shift += dy[k];
      }
      grad_style[c] = d_scale;
      grad_style[channels + c] = d_shift;

      // d/dx of instance norm with dn = dy·scale.
      const double scale = tape.scale[c];
      const double mean_dn = scale * d_shift * inv_hw;
      const double mean_dn_n = scale * d_scale * inv_hw;
      const double inv = tape.inv_std[c];
      const double* slope = tape.activation_slope.plane(c);
      double* da = ga.plane(c);
      for (std::size_t k = 0; k < hw; ++k) {
        const double v = inv * (dy[k] * scale - mean_dn - n[k] * mean_dn_n);
        da[k] = v * slope[k];
      }
    }
    const auto grad_row = dense_backward(grad_style, lw.style_weight, gen.style_dim());
    std::copy(grad_row.begin(), grad_row.end(), grad.row(i).begin());

    if (i == 0) break;
    Tensor gx = conv3x3_backward(ga, lw.conv_weight, lw.in_channels);
    gy = lw.upsample ? upsample_nearest2x_backward(gx) : std::move(gx);
  }
  return grad;
}

std::uint64_t Generator::weight_checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const std::vector<double>& values) {
    for (double v : values) {
      const float f = static_cast<float>(v);
      std::uint32_t bits;
      std::memcpy(&bits, &f, sizeof bits);
      for (int b = 0; b < 4; ++b) {
        h ^= (bits >> (8 * b)) & 0xffu;
        h *= 0x100000001b3ULL;
      }
    }
  };
  for (const auto& fc : weights_.mapping) {
    mix(fc.weight);
    mix(fc.bias);
  }
  mix(weights_.constant.data);
  for (const auto& l : weights_.layers) {
    mix(l.conv_weight);
    mix(l.conv_bias);
    mix(l.style_weight);
    mix(l.style_bias);
    mix(l.noise_scale);
  }
  mix(weights_.rgb_weight);
  mix(weights_.rgb_bias);
  return h;
}

StyleVector mean_latent(const Generator& generator, std::size_t samples, std::uint64_t seed) {
  require(samples >= 1, ErrorKind::InvalidArgument, "mean_latent needs at least one sample");
  Rng rng(seed);
  const std::size_t d = generator.style_dim();
  std::vector<double> acc(d, 0.0);
  LatentZ z{std::vector<double>(d)};
  for (std::size_t s = 0; s < samples; ++s) {
    for (double& v : z.values) v = rng.gaussian();
    const StyleVector w = generator.map(z);
    for (std::size_t k = 0; k < d; ++k) acc[k] += w.values[k];
  }
  for (double& v : acc) v /= static_cast<double>(samples);
  return StyleVector{std::move(acc)};
}

// Checkpoint I/O

void save_generator(const Generator& generator, const std::filesystem::path& dir) {
  const auto& cfg = generator.config();
  const auto& w = generator.weights();
  ckpt::Container c;
  c.kind = "generator";
  c.config = {{"resolution", cfg.resolution},         {"style_dim", cfg.style_dim},
              {"latent_dim", cfg.style_dim},          {"mapping_layers", cfg.mapping_layers},
              {"base_channels", cfg.base_channels},   {"channel_cap", cfg.channel_cap},
              {"seed", cfg.seed},                     {"num_style_layers", cfg.num_style_layers()}};
  auto put = [&c](const std::string& name, std::vector<std::size_t> shape, const std::vector<double>& v) {
    c.tensors[name] = ckpt::Entry{std::move(shape), v};
  };
  for (std::size_t i = 0; i < w.mapping.size(); ++i) {
    const auto& fc = w.mapping[i];
    put("mapping.fc" + std::to_string(i) + ".weight", {fc.out, fc.in}, fc.weight);
    put("mapping.fc" + std::to_string(i) + ".bias", {fc.out}, fc.bias);
  }
  put("synthesis.const", {w.constant.channels, w.constant.height, w.constant.width}, w.constant.data);
  for (std::size_t i = 0; i < w.layers.size(); ++i) {
    const auto& l = w.layers[i];
    const std::string p = "synthesis.layer" + std::to_string(i) + ".";
    put(p + "conv.weight", {l.out_channels, l.in_channels, 3, 3}, l.conv_weight);
    put(p + "conv.bias", {l.out_channels}, l.conv_bias);
    put(p + "style.weight", {2 * l.out_channels, cfg.style_dim}, l.style_weight);
    put(p + "style.bias", {2 * l.out_channels}, l.style_bias);
    put(p + "noise_scale", {l.out_channels}, l.noise_scale);
  }
  put("synthesis.torgb.weight", {3, w.layers.back().out_channels}, w.rgb_weight);
  put("synthesis.torgb.bias", {3}, w.rgb_bias);
  ckpt::write(dir, c);
}

Generator load_generator(const std::filesystem::path& dir) {
  const ckpt::Container c = ckpt::read(dir);
  if (c.kind != "generator") fail(ErrorKind::Format, "checkpoint kind is '" + c.kind + "', expected 'generator'");
  GeneratorConfig cfg;
  try {
    cfg.resolution = c.config.at("resolution").get<std::uint32_t>();
    cfg.style_dim = c.config.at("style_dim").get<std::uint32_t>();
    cfg.mapping_layers = c.config.at("mapping_layers").get<std::uint32_t>();
    cfg.base_channels = c.config.at("base_channels").get<std::uint32_t>();
    cfg.channel_cap = c.config.at("channel_cap").get<std::uint32_t>();
    cfg.seed = c.config.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Format, std::string("corrupt checkpoint manifest: ") + e.what());
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Format, std::string("corrupt checkpoint manifest: ") + e.what());
  }

  const std::size_t d = cfg.style_dim;
  GeneratorWeights w;
  for (std::size_t i = 0; i < cfg.mapping_layers; ++i) {
    DenseWeights fc;
    fc.in = fc.out = d;
    fc.weight = ckpt::take(c, "mapping.fc" + std::to_string(i) + ".weight", d * d);
    fc.bias = ckpt::take(c, "mapping.fc" + std::to_string(i) + ".bias", d);
    w.mapping.push_back(std::move(fc));
  }
  const std::size_t c0 = cfg.channels_at(4);
  w.constant = Tensor(c0, 4, 4);
  w.constant.data = ckpt::take(c, "synthesis.const", c0 * 16);
  std::size_t cin = c0;
  for (std::size_t i = 0; i < cfg.num_style_layers(); ++i) {
    SynthesisLayerWeights l;
    l.resolution = cfg.layer_resolution(i);
    l.upsample = i > 0 && i % 2 == 0;
    l.in_channels = cin;
    l.out_channels = cfg.channels_at(l.resolution);
    const std::size_t co = l.out_channels;
    const std::string p = "synthesis.layer" + std::to_string(i) + ".";
    l.conv_weight = ckpt::take(c, p + "conv.weight", co * cin * 9);
    l.conv_bias = ckpt::take(c, p + "conv.bias", co);
    l.style_weight = ckpt::take(c, p + "style.weight", 2 * co * d);
    l.style_bias = ckpt::take(c, p + "style.bias", 2 * co);
    l.noise_scale = ckpt::take(c, p + "noise_scale", co);
    w.layers.push_back(std::move(l));
    cin = co;
  }
  w.rgb_weight = ckpt::take(c, "synthesis.torgb.weight", 3 * cin);
  w.rgb_bias = ckpt::take(c, "synthesis.torgb.bias", 3);
  return Generator(cfg, std::move(w));
}

}  // namespace wplus
