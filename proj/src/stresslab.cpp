#include "wplus/stresslab.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iomanip>
#include <locale>
#include <numbers>
#include <sstream>
#include <thread>

#include "wplus/error.hpp"

namespace wplus {

void AffineSpec::validate() const {
  require(std::isfinite(magnitude), ErrorKind::InvalidArgument, "affine magnitude must be finite");
  if (kind == AffineKind::ZoomIn || kind == AffineKind::ZoomOut)
    require(magnitude > 0.0, ErrorKind::InvalidArgument, "zoom factor must be > 0");
}

std::string AffineSpec::label() const {
  char buf[64];
  switch (kind) {
    case AffineKind::TranslateRight: std::snprintf(buf, sizeof buf, "translate_right_%gpx", magnitude); break;
    case AffineKind::TranslateLeft: std::snprintf(buf, sizeof buf, "translate_left_%gpx", magnitude); break;
    case AffineKind::ZoomIn: std::snprintf(buf, sizeof buf, "zoom_in_%gx", magnitude); break;
    case AffineKind::ZoomOut: std::snprintf(buf, sizeof buf, "zoom_out_%gx", magnitude); break;
    case AffineKind::Rotate: std::snprintf(buf, sizeof buf, "rotate_%gdeg", magnitude); break;
  }
  return buf;
}

namespace {

double sample_bilinear(const ImageBuffer& image, double sx, double sy, std::size_t c, double fill) {
  const auto n = static_cast<long>(image.side());
  const double fx = std::floor(sx), fy = std::floor(sy);
  const long x0 = static_cast<long>(fx), y0 = static_cast<long>(fy);
  const double ax = sx - fx, ay = sy - fy;
  double acc = 0.0;
  const long xs[2] = {x0, x0 + 1};
  const long ys[2] = {y0, y0 + 1};
  const double wx[2] = {1.0 - ax, ax};
  const double wy[2] = {1.0 - ay, ay};
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i) {
      const double w = wx[i] * wy[j];
      if (w == 0.0) continue;
      const bool inside = xs[i] >= 0 && xs[i] < n && ys[j] >= 0 && ys[j] < n;
      acc += w * (inside ? image.at(static_cast<std::size_t>(ys[j]), static_cast<std::size_t>(xs[i]), c) : fill);
    }
  return acc;
}

// cos/sin with exact values at multiples of 90°, so quarter turns permute pixels.
std::pair<double, double> exact_cos_sin(double degrees) {
  const double quarter = degrees / 90.0;
  if (quarter == std::round(quarter)) {
    const long q = ((static_cast<long>(std::round(quarter)) % 4) + 4) % 4;
    static constexpr double kCos[4] = {1.0, 0.0, -1.0, 0.0};
    static constexpr double kSin[4] = {0.0, 1.0, 0.0, -1.0};
    return {kCos[q], kSin[q]};
  }
  const double r = degrees * std::numbers::pi / 180.0;
  return {std::cos(r), std::sin(r)};
}

}  // namespace

ImageBuffer apply_affine(const ImageBuffer& image, const AffineSpec& spec, double fill) {
  spec.validate();
  const std::size_t n = image.side();
  const double center = (static_cast<double>(n) - 1.0) / 2.0;
  const auto [cs, sn] = exact_cos_sin(spec.magnitude);
  ImageBuffer out(n);
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x) {
      const double px = static_cast<double>(x), py = static_cast<double>(y);
      double sx = px, sy = py;
      switch (spec.kind) {
        case AffineKind::TranslateRight: sx = px - spec.magnitude; break;
        case AffineKind::TranslateLeft: sx = px + spec.magnitude; break;
        case AffineKind::ZoomIn:
          sx = center + (px - center) / spec.magnitude;
          sy = center + (py - center) / spec.magnitude;
          break;
        case AffineKind::ZoomOut:
          sx = center + (px - center) * spec.magnitude;
          sy = center + (py - center) * spec.magnitude;
          break;
        case AffineKind::Rotate: {
          // inverse rotation of the output coordinate
          const double dx = px - center, dy = py - center;
          sx = center + cs * dx + sn * dy;
          sy = center - sn * dx + cs * dy;
          break;
        }
      }
      for (std::size_t c = 0; c < 3; ++c) out.at(y, x, c) = sample_bilinear(image, sx, sy, c, fill);
    }
  return out;
}

ImageBuffer apply_defects(const ImageBuffer& image, const DefectSpec& spec) {
  const std::size_t n = image.side();
  for (const auto& r : spec.rectangles)
    require(r.x + r.width <= n && r.y + r.height <= n, ErrorKind::InvalidArgument,
            "defect rectangle (" + std::to_string(r.x) + "," + std::to_string(r.y) + "," + std::to_string(r.width) +
                "," + std::to_string(r.height) + ") exceeds the " + std::to_string(n) + "px frame");
  ImageBuffer out = image;
  for (const auto& r : spec.rectangles)
    for (std::size_t y = r.y; y < r.y + r.height; ++y)
      for (std::size_t x = r.x; x < r.x + r.width; ++x)
        for (std::size_t c = 0; c < 3; ++c) out.at(y, x, c) = spec.fill;
  return out;
}

std::vector<AffineSpec> reference_affine_protocol(std::size_t resolution) {
  const double scale = static_cast<double>(resolution) / 1024.0;
  return {{AffineKind::TranslateRight, 140.0 * scale},
          {AffineKind::TranslateLeft, 160.0 * scale},
          {AffineKind::ZoomOut, 2.0},
          {AffineKind::ZoomIn, 2.0},
          {AffineKind::Rotate, 90.0},
          {AffineKind::Rotate, 180.0}};
}

const std::vector<ReferenceRow>& reference_affine_table() {
  static const std::vector<ReferenceRow> rows = {
      {"translation_right_140px", 0.782, 48.56}, {"translation_left_160px", 0.406, 44.12},
      {"zoom_out_2x", 0.225, 38.04},             {"zoom_in_2x", 0.718, 40.55},
      {"rotation_90deg", 0.622, 47.21},          {"rotation_180deg", 0.599, 42.93}};
  return rows;
}

const std::vector<ReferenceRow>& reference_defect_table() {
  static const std::vector<ReferenceRow> rows = {
      {"non_defective", 0.204, 29.19}, {"eyes", 0.271, 34.90},          {"nose", 0.311, 39.20},
      {"mouth", 0.301, 37.04},         {"eyes_and_mouth", 0.233, 39.62}, {"eyes_nose_and_mouth", 0.285, 37.59}};
  return rows;
}

const std::vector<ReferenceRow>& reference_init_table() {
  static const std::vector<ReferenceRow> rows = {
      {"face/mean", 0.309, 30.67},     {"face/random", 0.351, 35.60},   {"cat/mean", 0.752, 70.86},
      {"cat/random", 0.740, 70.97},    {"dog/mean", 0.922, 74.78},      {"dog/random", 0.845, 75.14},
      {"painting/mean", 3.530, 103.61}, {"painting/random", 3.451, 105.29}, {"car/mean", 1.390, 82.53},
      {"car/random", 1.269, 82.60}};
  return rows;
}

std::string config_hash(const EmbedConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.fingerprint()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void StressReport::write_csv(std::ostream& out) const {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << std::setprecision(17);
  s << "# config_hash=" << config_hash << '\n';
  for (const auto& r : references)
    s << "# reference," << r.condition << ',' << r.loss_x1e5 << ',' << r.dist_to_mean << '\n';
  s << "condition,loss_total,loss_total_x1e5,dist_to_mean,steps,seed\n";
  for (const auto& r : rows)
    s << r.condition << ',' << r.loss_total << ',' << r.loss_total_x1e5() << ',' << r.dist_to_mean << ','
      << r.steps << ',' << r.seed << '\n';
  out << s.str();
}

void StressReport::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  write_csv(out);
  if (!out) fail(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& text) {
  std::istringstream in(text);
  in.imbue(std::locale::classic());
  double v;
  if (!(in >> v)) fail(ErrorKind::Format, "report CSV: bad number '" + text + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& text) {
  std::istringstream in(text);
  std::uint64_t v;
  if (!(in >> v)) fail(ErrorKind::Format, "report CSV: bad integer '" + text + "'");
  return v;
}

}  // namespace

StressReport StressReport::read_csv(std::istream& in) {
  StressReport report;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# config_hash=", 0) == 0) {
      report.config_hash = line.substr(14);
    } else if (line.rfind("# reference,", 0) == 0) {
      const auto f = split_csv(line.substr(12));
      if (f.size() != 3) fail(ErrorKind::Format, "report CSV: malformed reference line");
      report.references.push_back({f[0], parse_double(f[1]), parse_double(f[2])});
    } else if (!header) {
      if (line != "condition,loss_total,loss_total_x1e5,dist_to_mean,steps,seed")
        fail(ErrorKind::Format, "report CSV: unexpected header '" + line + "'");
      header = true;
    } else {
      const auto f = split_csv(line);
      if (f.size() != 6) fail(ErrorKind::Format, "report CSV: row has " + std::to_string(f.size()) + " fields");
      report.rows.push_back({f[0], parse_double(f[1]), parse_double(f[3]), parse_u64(f[4]), parse_u64(f[5])});
    }
  }
  if (!header) fail(ErrorKind::Format, "report CSV: missing header");
  return report;
}

namespace {

struct Job {
  std::string label;
  ImageBuffer target;
  EmbedConfig config;
};

// Runs independent embed jobs on up to `jobs` threads; result order follows input order.
StressReport run_jobs(const Generator& generator, const FeatureExtractor& extractor, std::vector<Job> work,
                      std::size_t jobs, const std::string& hash) {
  std::vector<EmbedResult> results(work.size());
  std::vector<std::exception_ptr> errors(work.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < work.size(); i = next++) {
      try {
        results[i] = embed(generator, extractor, work[i].target, work[i].config);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, work.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  StressReport report;
  report.config_hash = hash;
  for (std::size_t i = 0; i < work.size(); ++i) {
    report.rows.push_back({work[i].label, results[i].loss.total, results[i].dist_to_mean, work[i].config.steps,
                           work[i].config.seed});
  }
  report.results = std::move(results);
  return report;
}

EmbedConfig anchored(const Generator& generator, const EmbedConfig& config) {
  config.validate();
  EmbedConfig cfg = config;
  if (!cfg.mean_anchor) cfg.mean_anchor = resolve_mean(generator, config);
  return cfg;
}

}  // namespace

StressReport run_affine_suite(const Generator& generator, const FeatureExtractor& extractor,
                              const ImageBuffer& image, const EmbedConfig& config,
                              const std::vector<AffineSpec>& specs, std::size_t jobs) {
  const EmbedConfig cfg = anchored(generator, config);
  std::vector<Job> work{{"baseline", image, cfg}};
  for (const auto& spec : specs) work.push_back({spec.label(), apply_affine(image, spec), cfg});
  StressReport report = run_jobs(generator, extractor, std::move(work), jobs, config_hash(cfg));
  report.references = reference_affine_table();
  return report;
}

StressReport run_defect_suite(const Generator& generator, const FeatureExtractor& extractor,
                              const ImageBuffer& image, const EmbedConfig& config,
                              const std::vector<DefectCondition>& conditions, std::size_t jobs) {
  const EmbedConfig cfg = anchored(generator, config);
  std::vector<Job> work{{"non_defective", image, cfg}};
  for (const auto& c : conditions) work.push_back({c.label, apply_defects(image, c.spec), cfg});
  StressReport report = run_jobs(generator, extractor, std::move(work), jobs, config_hash(cfg));
  report.references = reference_defect_table();
  return report;
}

StressReport run_iterative_suite(const Generator& generator, const FeatureExtractor& extractor,
                                 const ImageBuffer& image, const EmbedConfig& config, std::size_t rounds) {
  const EmbedConfig cfg = anchored(generator, config);
  StressReport report;
  report.config_hash = config_hash(cfg);
  report.results = iterative_embed(generator, extractor, image, cfg, rounds);
  for (std::size_t k = 0; k < report.results.size(); ++k)
    report.rows.push_back({"round_" + std::to_string(k + 1), report.results[k].loss.total,
                           report.results[k].dist_to_mean, cfg.steps, cfg.seed});
  return report;
}

StressReport run_init_comparison(const Generator& generator, const FeatureExtractor& extractor,
                                 const std::vector<std::pair<std::string, ImageBuffer>>& targets,
                                 const EmbedConfig& config, std::size_t jobs) {
  EmbedConfig cfg = anchored(generator, config);
  cfg.init = InitStrategy::MeanLatent;
  EmbedConfig random_cfg = cfg;
  random_cfg.init = InitStrategy::RandomUniform;
  // Both arms share everything except the init strategy; the hash covers the shared part.
  std::vector<Job> work;
  for (const auto& [label, image] : targets) {
    work.push_back({label + "/mean", image, cfg});
    work.push_back({label + "/random", image, random_cfg});
  }
  EmbedConfig shared = cfg;
  shared.init = InitStrategy::Provided;
  StressReport report = run_jobs(generator, extractor, std::move(work), jobs, config_hash(shared));
  report.references = reference_init_table();
  return report;
}

}  // namespace wplus
