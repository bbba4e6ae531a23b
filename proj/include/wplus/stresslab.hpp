#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "wplus/embedder.hpp"

namespace wplus {

enum class AffineKind { TranslateRight, TranslateLeft, ZoomIn, ZoomOut, Rotate };

/// Magnitude is pixels for translations, a factor for zooms, degrees for rotations.
struct AffineSpec {
  AffineKind kind = AffineKind::TranslateRight;
  double magnitude = 0.0;

  void validate() const;
  std::string label() const;
};

struct DefectRect {
  std::size_t x = 0, y = 0, width = 0, height = 0;
};

struct DefectSpec {
  std::vector<DefectRect> rectangles;
  double fill = 1.0;
};

struct DefectCondition {
  std::string label;
  DefectSpec spec;
};

/// Bilinear resampling about the image center; samples outside the frame
/// read as `fill` (black by default). Output size is unchanged.
ImageBuffer apply_affine(const ImageBuffer& image, const AffineSpec& spec, double fill = 0.0);

/// Fills each rectangle with spec.fill; other pixels are untouched.
ImageBuffer apply_defects(const ImageBuffer& image, const DefectSpec& spec);

/// Translation 140 px right and 160 px left (at 1024 px, scaled to
/// `resolution`), zoom out 2×, zoom in 2×, rotation by 90° and 180°.
std::vector<AffineSpec> reference_affine_protocol(std::size_t resolution);

struct StressRow {
  std::string condition;
  double loss_total = 0.0;
  double dist_to_mean = 0.0;
  std::size_t steps = 0;
  std::uint64_t seed = 0;

  double loss_total_x1e5() const { return loss_total * 1e5; }
  friend bool operator==(const StressRow&, const StressRow&) = default;
};

/// Reference (L ×10^5, ‖w* − w̄‖) pair measured on a pretrained 1024² face
/// model. Carried as metadata only; not reproducible with a toy generator.
struct ReferenceRow {
  std::string condition;
  double loss_x1e5 = 0.0;
  double dist_to_mean = 0.0;
  friend bool operator==(const ReferenceRow&, const ReferenceRow&) = default;
};

const std::vector<ReferenceRow>& reference_affine_table();
const std::vector<ReferenceRow>& reference_defect_table();
const std::vector<ReferenceRow>& reference_init_table();

struct StressReport {
  /// Hash of the shared EmbedConfig; every row was produced with it.
  std::string config_hash;
  std::vector<StressRow> rows;
  std::vector<ReferenceRow> references;
  /// Full results behind each row, same order. Not serialized.
  std::vector<EmbedResult> results;

  void write_csv(std::ostream& out) const;
  void write_csv(const std::filesystem::path& path) const;
  static StressReport read_csv(std::istream& in);
};

std::string config_hash(const EmbedConfig& config);

/// Baseline row plus one row per spec, all with the identical config.
StressReport run_affine_suite(const Generator& generator, const FeatureExtractor& extractor,
                              const ImageBuffer& image, const EmbedConfig& config,
                              const std::vector<AffineSpec>& specs, std::size_t jobs = 1);

/// "non_defective" row plus one row per condition.
StressReport run_defect_suite(const Generator& generator, const FeatureExtractor& extractor,
                              const ImageBuffer& image, const EmbedConfig& config,
                              const std::vector<DefectCondition>& conditions, std::size_t jobs = 1);

/// One row per round of iterative_embed.
StressReport run_iterative_suite(const Generator& generator, const FeatureExtractor& extractor,
                                 const ImageBuffer& image, const EmbedConfig& config, std::size_t rounds = 7);

/// For each labelled target, rows "<label>/mean" and "<label>/random".
StressReport run_init_comparison(const Generator& generator, const FeatureExtractor& extractor,
                                 const std::vector<std::pair<std::string, ImageBuffer>>& targets,
                                 const EmbedConfig& config, std::size_t jobs = 1);

}  // namespace wplus
