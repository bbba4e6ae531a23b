#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wplus/generator.hpp"
#include "wplus/perceptual.hpp"

namespace wplus {

enum class InitStrategy { MeanLatent, RandomUniform, Provided };
enum class LatentSpace { WPlus, W, Z };

const char* to_string(InitStrategy s);
const char* to_string(LatentSpace s);

struct EmbedConfig {
  InitStrategy init = InitStrategy::MeanLatent;
  LatentSpace space = LatentSpace::WPlus;
  std::size_t steps = 5000;
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  LossWeights loss;
  std::uint64_t seed = 0;
  std::size_t record_every = 10;
  // w̄ estimate used for MeanLatent init and the distance diagnostic.
  std::size_t mean_samples = 10000;
  std::uint64_t mean_seed = 0;
  /// Precomputed w̄; overrides mean_samples/mean_seed when set.
  std::optional<StyleVector> mean_anchor;
  /// Starting code for InitStrategy::Provided.
  std::optional<ExtendedLatent> provided;

  void validate() const;
  /// Stable text rendering of every field that affects the optimization.
  std::string fingerprint() const;
};

/// Adam with bias correction. Owns its moment estimates.
class Adam {
 public:
  Adam(std::size_t size, double learning_rate, double beta1, double beta2, double epsilon);

  void step(std::span<double> params, std::span<const double> grad);
  std::size_t iterations() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  std::vector<double> m_, v_;
};

struct TraceSample {
  std::size_t step = 0;
  double total = 0.0;
  double percept = 0.0;
  double mse = 0.0;
  double dist_to_mean = 0.0;

  friend bool operator==(const TraceSample&, const TraceSample&) = default;
};

inline constexpr const char* kTraceHeader = "step,total,percept,mse,dist_to_mean,best_so_far";

/// Per-iterate losses recorded every record_every steps, plus step 0 and the last step.
struct LossTrace {
  std::vector<TraceSample> samples;

  /// Running minimum of total at each sample.
  std::vector<double> best_so_far() const;

  void write_csv(std::ostream& out) const;
  void write_csv(const std::filesystem::path& path) const;
  static LossTrace read_csv(std::istream& in);
};

struct EmbedResult {
  /// Best recorded code, in W+ form regardless of the optimized space.
  ExtendedLatent latent;
  LossValue loss;
  double dist_to_mean = 0.0;
  std::size_t best_step = 0;
  LossTrace trace;
  double wallclock_seconds = 0.0;
};

/// Loss of synthesize(latent) against a target, with its latent gradient.
class PipelineObjective {
 public:
  PipelineObjective(const Generator& generator, const FeatureExtractor& extractor, const ImageBuffer& target,
                    const LossWeights& weights);

  LossValue evaluate(const ExtendedLatent& latent, ExtendedLatent* grad) const;

 private:
  const Generator* generator_;
  EmbeddingObjective objective_;
};

/// The w̄ a config refers to: its anchor if set, otherwise a fresh estimate.
StyleVector resolve_mean(const Generator& generator, const EmbedConfig& config);

/// Starting code in W+ form (for W and Z, the broadcast of the starting variable).
ExtendedLatent init_latent(const Generator& generator, const EmbedConfig& config);

/// Frobenius distance from a code to broadcast(w̄).
double distance_to_mean(const ExtendedLatent& latent, const StyleVector& mean);

EmbedResult embed(const Generator& generator, const FeatureExtractor& extractor, const ImageBuffer& target,
                  const EmbedConfig& config);

/// embed with the latent constrained to W (one shared row).
EmbedResult embed_into_w(const Generator& generator, const FeatureExtractor& extractor,
                         const ImageBuffer& target, EmbedConfig config);

/// Round k+1 embeds the image synthesized from round k's best code.
std::vector<EmbedResult> iterative_embed(const Generator& generator, const FeatureExtractor& extractor,
                                         const ImageBuffer& target, const EmbedConfig& config,
                                         std::size_t rounds = 7);

}  // namespace wplus
