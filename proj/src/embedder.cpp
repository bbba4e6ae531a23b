#include "wplus/embedder.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <locale>
#include <sstream>

#include "wplus/error.hpp"
#include "wplus/rng.hpp"

namespace wplus {

namespace {
constexpr std::uint64_t kInitStream = 2;
}

const char* to_string(InitStrategy s) {
  switch (s) {
    case InitStrategy::MeanLatent: return "mean";
    case InitStrategy::RandomUniform: return "random";
    case InitStrategy::Provided: return "provided";
  }
  return "?";
}

const char* to_string(LatentSpace s) {
  switch (s) {
    case LatentSpace::WPlus: return "wplus";
    case LatentSpace::W: return "w";
    case LatentSpace::Z: return "z";
  }
  return "?";
}

void EmbedConfig::validate() const {
  require(steps >= 1, ErrorKind::InvalidArgument, "steps must be >= 1");
  require(learning_rate > 0.0 && std::isfinite(learning_rate), ErrorKind::InvalidArgument,
          "learning_rate must be > 0");
  require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0, ErrorKind::InvalidArgument,
          "beta1 and beta2 must lie in [0, 1)");
  require(epsilon >= 0.0, ErrorKind::InvalidArgument, "epsilon must be >= 0");
  require(record_every >= 1, ErrorKind::InvalidArgument, "record_every must be >= 1");
  require(mean_samples >= 1, ErrorKind::InvalidArgument, "mean_samples must be >= 1");
  require(init != InitStrategy::Provided || provided.has_value(), ErrorKind::InvalidArgument,
          "Provided init requires a starting latent");
  loss.validate();
}

std::string EmbedConfig::fingerprint() const {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << std::setprecision(17) << "init=" << to_string(init) << ";space=" << to_string(space)
    << ";steps=" << steps << ";lr=" << learning_rate << ";beta1=" << beta1 << ";beta2=" << beta2
    << ";eps=" << epsilon << ";lambda_mse=" << loss.lambda_mse << ";lambda=";
  for (double l : loss.lambda_stage) s << l << ",";
  s << ";loss_resolution=" << loss.loss_resolution << ";seed=" << seed << ";record_every=" << record_every
    << ";mean_samples=" << mean_samples << ";mean_seed=" << mean_seed;
  if (mean_anchor) {
    s << ";anchor=";
    for (double v : mean_anchor->values) s << v << ",";
  }
  return s.str();
}

Adam::Adam(std::size_t size, double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon), m_(size, 0.0), v_(size, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  require(params.size() == m_.size() && grad.size() == m_.size(), ErrorKind::ShapeMismatch,
          "Adam: parameter size mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
  }
}

std::vector<double> LossTrace::best_so_far() const {
  std::vector<double> out;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    best = std::min(best, s.total);
    out.push_back(best);
  }
  return out;
}

void LossTrace::write_csv(std::ostream& out) const {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << std::setprecision(17);
  s << kTraceHeader << '\n';
  const std::vector<double> best = best_so_far();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& r = samples[i];
    s << r.step << ',' << r.total << ',' << r.percept << ',' << r.mse << ',' << r.dist_to_mean << ',' << best[i]
      << '\n';
  }
  out << s.str();
}

void LossTrace::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  write_csv(out);
  if (!out) fail(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

LossTrace LossTrace::read_csv(std::istream& in) {
  LossTrace trace;
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) fail(ErrorKind::Format, "trace CSV: unexpected header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    row.imbue(std::locale::classic());
    TraceSample s;
    double best = 0.0;
    char c[5];
    if (!(row >> s.step >> c[0] >> s.total >> c[1] >> s.percept >> c[2] >> s.mse >> c[3] >> s.dist_to_mean >> c[4] >>
          best) ||
        std::string(c, 5) != ",,,,,")
      fail(ErrorKind::Format, "trace CSV: malformed row '" + line + "'");
    trace.samples.push_back(s);
  }
  return trace;
}

PipelineObjective::PipelineObjective(const Generator& generator, const FeatureExtractor& extractor,
                                     const ImageBuffer& target, const LossWeights& weights)
    : generator_(&generator), objective_(extractor, target, weights) {}

LossValue PipelineObjective::evaluate(const ExtendedLatent& latent, ExtendedLatent* grad) const {
  const SynthesisPass pass = generator_->forward(latent);
  if (!grad) return objective_.evaluate(pass.image(), nullptr);
  ImageBuffer grad_image;
  const LossValue value = objective_.evaluate(pass.image(), &grad_image);
  *grad = pass.backward(grad_image);
  return value;
}

StyleVector resolve_mean(const Generator& generator, const EmbedConfig& config) {
  if (config.mean_anchor) {
    require(config.mean_anchor->dim() == generator.style_dim(), ErrorKind::ShapeMismatch,
            "mean anchor dimension does not match generator");
    return *config.mean_anchor;
  }
  return mean_latent(generator, config.mean_samples, config.mean_seed);
}

double distance_to_mean(const ExtendedLatent& latent, const StyleVector& mean) {
  require(latent.dim() == mean.dim(), ErrorKind::ShapeMismatch, "distance_to_mean: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < latent.layers(); ++i) {
    auto r = latent.row(i);
    for (std::size_t d = 0; d < latent.dim(); ++d) {
      const double diff = r[d] - mean.values[d];
      acc += diff * diff;
    }
  }
  return std::sqrt(acc);
}

namespace {

// The optimization variable and its map to a W+ code.
class Variable {
 public:
  Variable(const Generator& gen, LatentSpace space) : gen_(gen), space_(space) {}

  std::vector<double> values;

  ExtendedLatent code() const {
    switch (space_) {
      case LatentSpace::WPlus:
        return ExtendedLatent(gen_.num_layers(), gen_.style_dim(), values);
      case LatentSpace::W:
        return broadcast(StyleVector{values}, gen_.num_layers());
      case LatentSpace::Z:
        return broadcast(gen_.map(LatentZ{values}), gen_.num_layers());
    }
    return {};
  }

  std::vector<double> pull_back(const ExtendedLatent& grad_code) const {
    switch (space_) {
      case LatentSpace::WPlus:
        return grad_code.values();
      case LatentSpace::W:
        return sum_rows(grad_code).values;
      case LatentSpace::Z:
        return gen_.map_backward(LatentZ{values}, sum_rows(grad_code)).values;
    }
    return {};
  }

 private:
  const Generator& gen_;
  LatentSpace space_;
};

Variable initial_variable(const Generator& gen, const EmbedConfig& config, const StyleVector& mean) {
  Variable var(gen, config.space);
  const std::size_t layers = gen.num_layers(), dim = gen.style_dim();
  const std::size_t count = config.space == LatentSpace::WPlus ? layers * dim : dim;
  Rng rng(derive_seed(config.seed, kInitStream));
  switch (config.init) {
    case InitStrategy::MeanLatent:
      if (config.space == LatentSpace::WPlus)
        var.values = broadcast(mean, layers).values();
      else if (config.space == LatentSpace::W)
        var.values = mean.values;
      else
        var.values.assign(dim, 0.0);  // the Gaussian mode of Z
      break;
    case InitStrategy::RandomUniform:
      var.values.resize(count);
      for (double& v : var.values) v = rng.uniform(-1.0, 1.0);
      break;
    case InitStrategy::Provided: {
      const ExtendedLatent& p = *config.provided;
      if (p.layers() != layers || p.dim() != dim)
        fail(ErrorKind::ShapeMismatch, "provided latent is " + std::to_string(p.layers()) + "x" +
                                           std::to_string(p.dim()) + ", generator expects " +
                                           std::to_string(layers) + "x" + std::to_string(dim));
      require(p.all_finite(), ErrorKind::InvalidArgument, "provided latent has non-finite entries");
      if (config.space == LatentSpace::WPlus) {
        var.values = p.values();
      } else if (config.space == LatentSpace::W) {
        var.values = sum_rows(p).values;
        for (double& v : var.values) v /= static_cast<double>(layers);
      } else {
        fail(ErrorKind::InvalidArgument, "Provided init is not defined for Z-space embedding");
      }
      break;
    }
  }
  return var;
}

}  // namespace

ExtendedLatent init_latent(const Generator& generator, const EmbedConfig& config) {
  config.validate();
  const StyleVector mean = config.init == InitStrategy::MeanLatent ? resolve_mean(generator, config)
                                                                   : StyleVector{};
  return initial_variable(generator, config, mean).code();
}

EmbedResult embed(const Generator& generator, const FeatureExtractor& extractor, const ImageBuffer& target,
                  const EmbedConfig& config) {
  config.validate();
  require(target.side() == generator.resolution(), ErrorKind::ShapeMismatch,
          "target is " + std::to_string(target.side()) + "px but generator resolution is " +
              std::to_string(generator.resolution()));
  const auto start = std::chrono::steady_clock::now();

  const StyleVector mean = resolve_mean(generator, config);
  Variable var = initial_variable(generator, config, mean);
  const PipelineObjective objective(generator, extractor, target, config.loss);
  Adam adam(var.values.size(), config.learning_rate, config.beta1, config.beta2, config.epsilon);

  EmbedResult result;
  bool have_best = false;
  ExtendedLatent grad;
  for (std::size_t step = 0;; ++step) {
    const bool last = step == config.steps;
    const ExtendedLatent code = var.code();
    const LossValue value = objective.evaluate(code, last ? nullptr : &grad);
    if (!std::isfinite(value.total))
      fail(ErrorKind::Numeric, "non-finite loss at step " + std::to_string(step));

    if (step % config.record_every == 0 || last) {
      const double dist = distance_to_mean(code, mean);
      result.trace.samples.push_back({step, value.total, value.percept, value.mse, dist});
      if (!have_best || value.total < result.loss.total) {
        have_best = true;
        result.latent = code;
        result.loss = value;
        result.dist_to_mean = dist;
        result.best_step = step;
      }
    }
    if (last) break;
    const std::vector<double> g = var.pull_back(grad);
    adam.step(var.values, g);
  }

  result.wallclock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

EmbedResult embed_into_w(const Generator& generator, const FeatureExtractor& extractor,
                         const ImageBuffer& target, EmbedConfig config) {
  config.space = LatentSpace::W;
  return embed(generator, extractor, target, config);
}

std::vector<EmbedResult> iterative_embed(const Generator& generator, const FeatureExtractor& extractor,
                                         const ImageBuffer& target, const EmbedConfig& config,
                                         std::size_t rounds) {
  require(rounds >= 1, ErrorKind::InvalidArgument, "rounds must be >= 1");
  EmbedConfig cfg = config;
  if (!cfg.mean_anchor) cfg.mean_anchor = resolve_mean(generator, config);
  std::vector<EmbedResult> results;
  ImageBuffer current = target;
  for (std::size_t k = 0; k < rounds; ++k) {
    results.push_back(embed(generator, extractor, current, cfg));
    current = generator.synthesize(results.back().latent);
  }
  return results;
}

}  // namespace wplus
