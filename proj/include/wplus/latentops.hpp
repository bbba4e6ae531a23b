#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "wplus/generator.hpp"
#include "wplus/latent.hpp"

namespace wplus {

/// λ·a + (1 − λ)·b, λ ∈ [0, 1].
ExtendedLatent interpolate(const ExtendedLatent& a, const ExtendedLatent& b, double lambda);

/// Frame k synthesizes interpolate(a, b, k/(frames−1)): frame 0 is b, the last frame is a.
std::vector<ImageBuffer> morph_sequence(const Generator& generator, const ExtendedLatent& a,
                                        const ExtendedLatent& b, std::size_t frames);

/// ⌈L/2⌉, i.e. 9 of 18.
std::size_t default_split(std::size_t layers);

/// Rows [0, split) from content, rows [split, L) from style.
ExtendedLatent crossover(const ExtendedLatent& content, const ExtendedLatent& style, std::size_t split);

struct ExpressionDirection {
  ExtendedLatent rows;
  double threshold_used = 0.0;
  bool normalized = false;
};

/// Difference expressive − neutral with rows of L2 norm below `threshold`
/// zeroed, optionally scaled to unit Frobenius norm.
ExpressionDirection expression_direction(const ExtendedLatent& neutral, const ExtendedLatent& expressive,
                                         double threshold, bool normalize);

/// target + λ·direction.
ExtendedLatent apply_expression(const ExtendedLatent& target, const ExpressionDirection& direction,
                                double lambda);

/// Frobenius norm of a − b.
double latent_distance(const ExtendedLatent& a, const ExtendedLatent& b);

struct DistanceMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> values;

  /// First row and column hold labels; cells are decimal floats.
  void write_csv(std::ostream& out) const;
  void write_csv(const std::filesystem::path& path) const;
};

DistanceMatrix pairwise_distances(const std::vector<ExtendedLatent>& latents,
                                  const std::vector<std::string>& labels);

}  // namespace wplus
