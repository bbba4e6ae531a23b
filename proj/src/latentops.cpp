#include "wplus/latentops.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <locale>
#include <sstream>

#include "wplus/error.hpp"

namespace wplus {

ExtendedLatent interpolate(const ExtendedLatent& a, const ExtendedLatent& b, double lambda) {
  require_same_shape(a, b, "interpolate");
  require(lambda >= 0.0 && lambda <= 1.0, ErrorKind::InvalidArgument, "interpolate: lambda must lie in [0, 1]");
  ExtendedLatent out(a.layers(), a.dim());
  for (std::size_t i = 0; i < a.size(); ++i)
    out.values()[i] = lambda * a.values()[i] + (1.0 - lambda) * b.values()[i];
  return out;
}

std::vector<ImageBuffer> morph_sequence(const Generator& generator, const ExtendedLatent& a,
                                        const ExtendedLatent& b, std::size_t frames) {
  require(frames >= 2, ErrorKind::InvalidArgument, "morph needs at least 2 frames");
  require_same_shape(a, b, "morph");
  std::vector<ImageBuffer> out;
  out.reserve(frames);
  for (std::size_t k = 0; k < frames; ++k) {
    const double lambda = static_cast<double>(k) / static_cast<double>(frames - 1);
    out.push_back(generator.synthesize(interpolate(a, b, lambda)));
  }
  return out;
}

std::size_t default_split(std::size_t layers) { return (layers + 1) / 2; }

ExtendedLatent crossover(const ExtendedLatent& content, const ExtendedLatent& style, std::size_t split) {
  require_same_shape(content, style, "crossover");
  require(split <= content.layers(), ErrorKind::InvalidArgument,
          "crossover split " + std::to_string(split) + " exceeds layer count " + std::to_string(content.layers()));
  ExtendedLatent out = content;
  for (std::size_t i = split; i < out.layers(); ++i) {
    auto src = style.row(i);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

ExpressionDirection expression_direction(const ExtendedLatent& neutral, const ExtendedLatent& expressive,
                                         double threshold, bool normalize) {
  require_same_shape(neutral, expressive, "expression_direction");
  require(threshold >= 0.0, ErrorKind::InvalidArgument, "threshold must be >= 0");
  ExpressionDirection dir;
  dir.threshold_used = threshold;
  dir.normalized = normalize;
  dir.rows = ExtendedLatent(neutral.layers(), neutral.dim());
  double frob2 = 0.0;
  for (std::size_t i = 0; i < neutral.layers(); ++i) {
    auto n = neutral.row(i), e = expressive.row(i);
    auto d = dir.rows.row(i);
    double norm2 = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      d[k] = e[k] - n[k];
      norm2 += d[k] * d[k];
    }
    if (std::sqrt(norm2) < threshold)
      std::fill(d.begin(), d.end(), 0.0);
    else
      frob2 += norm2;
  }
  if (normalize) {
    if (frob2 == 0.0)
      fail(ErrorKind::Numeric, "degenerate expression direction: every row fell below threshold " +
                                   std::to_string(threshold));
    const double inv = 1.0 / std::sqrt(frob2);
    for (double& v : dir.rows.values()) v *= inv;
  }
  return dir;
}

ExtendedLatent apply_expression(const ExtendedLatent& target, const ExpressionDirection& direction,
                                double lambda) {
  require_same_shape(target, direction.rows, "apply_expression");
  ExtendedLatent out = target;
  for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] += lambda * direction.rows.values()[i];
  return out;
}

double latent_distance(const ExtendedLatent& a, const ExtendedLatent& b) {
  require_same_shape(a, b, "latent_distance");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.values()[i] - b.values()[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

DistanceMatrix pairwise_distances(const std::vector<ExtendedLatent>& latents,
                                  const std::vector<std::string>& labels) {
  require(latents.size() >= 2, ErrorKind::InvalidArgument, "pairwise distances need at least 2 latents");
  require(labels.size() == latents.size(), ErrorKind::InvalidArgument,
          "got " + std::to_string(labels.size()) + " labels for " + std::to_string(latents.size()) + " latents");
  for (const auto& l : latents) require_same_shape(latents.front(), l, "pairwise_distances");
  const std::size_t n = latents.size();
  DistanceMatrix m{labels, std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0))};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m.values[i][j] = m.values[j][i] = latent_distance(latents[i], latents[j]);
  return m;
}

void DistanceMatrix::write_csv(std::ostream& out) const {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << std::setprecision(17) << "label";
  for (const auto& l : labels) s << ',' << l;
  s << '\n';
  for (std::size_t i = 0; i < labels.size(); ++i) {
    s << labels[i];
    for (double v : values[i]) s << ',' << v;
    s << '\n';
  }
  out << s.str();
}

void DistanceMatrix::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  write_csv(out);
}

}  // namespace wplus
