#include "wplus/wplus.h"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "wplus/embedder.hpp"
#include "wplus/error.hpp"
#include "wplus/generator.hpp"
#include "wplus/latent_file.hpp"
#include "wplus/latentops.hpp"
#include "wplus/perceptual.hpp"
#include "wplus/stresslab.hpp"

struct wplus_generator {
  wplus::Generator value;
};
struct wplus_extractor {
  wplus::FeatureExtractor value;
};
struct wplus_latent {
  wplus::ExtendedLatent value;
};
struct wplus_image {
  wplus::ImageBuffer value;
};
struct wplus_embed_result {
  wplus::EmbedResult value;
};
struct wplus_report {
  wplus::StressReport value;
};

namespace {

thread_local std::string g_last_error;

bool env_deterministic() {
  const char* v = std::getenv("WPLUS_DETERMINISTIC");
  return v == nullptr || std::strcmp(v, "0") != 0;
}

std::atomic<bool>& deterministic_flag() {
  static std::atomic<bool> flag{env_deterministic()};
  return flag;
}

wplus_status status_of(wplus::ErrorKind kind) {
  switch (kind) {
    case wplus::ErrorKind::InvalidArgument: return WPLUS_ERR_INVALID_ARGUMENT;
    case wplus::ErrorKind::ShapeMismatch: return WPLUS_ERR_SHAPE_MISMATCH;
    case wplus::ErrorKind::Io: return WPLUS_ERR_IO;
    case wplus::ErrorKind::Format: return WPLUS_ERR_FORMAT;
    case wplus::ErrorKind::Numeric: return WPLUS_ERR_NUMERIC;
  }
  return WPLUS_ERR_INTERNAL;
}

// Runs fn, translating exceptions into a status and the thread's last error.
template <class Fn>
wplus_status guarded(Fn&& fn) {
  try {
    fn();
    return WPLUS_OK;
  } catch (const wplus::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return WPLUS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return WPLUS_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return WPLUS_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) wplus::fail(wplus::ErrorKind::InvalidArgument, std::string(what) + " must not be null");
}

template <class T, class V>
void emit(T** out, V&& value) {
  *out = new T{std::forward<V>(value)};
}

std::size_t effective_jobs(std::size_t jobs) { return deterministic_flag() ? 1 : (jobs == 0 ? 1 : jobs); }

wplus::GeneratorConfig to_cpp(const wplus_generator_config& c) {
  wplus::GeneratorConfig g;
  g.resolution = c.resolution;
  g.style_dim = c.style_dim;
  g.mapping_layers = c.mapping_layers;
  g.base_channels = c.base_channels;
  g.channel_cap = c.channel_cap;
  g.seed = c.seed;
  return g;
}

wplus::EmbedConfig to_cpp(const wplus_embed_config& c) {
  wplus::EmbedConfig e;
  switch (c.init) {
    case WPLUS_INIT_MEAN: e.init = wplus::InitStrategy::MeanLatent; break;
    case WPLUS_INIT_RANDOM: e.init = wplus::InitStrategy::RandomUniform; break;
    case WPLUS_INIT_PROVIDED: e.init = wplus::InitStrategy::Provided; break;
    default: wplus::fail(wplus::ErrorKind::InvalidArgument, "unknown init strategy");
  }
  switch (c.space) {
    case WPLUS_SPACE_WPLUS: e.space = wplus::LatentSpace::WPlus; break;
    case WPLUS_SPACE_W: e.space = wplus::LatentSpace::W; break;
    case WPLUS_SPACE_Z: e.space = wplus::LatentSpace::Z; break;
    default: wplus::fail(wplus::ErrorKind::InvalidArgument, "unknown latent space");
  }
  e.steps = c.steps;
  e.learning_rate = c.learning_rate;
  e.beta1 = c.beta1;
  e.beta2 = c.beta2;
  e.epsilon = c.epsilon;
  e.loss.lambda_mse = c.lambda_mse;
  for (std::size_t j = 0; j < wplus::kNumTaps; ++j) e.loss.lambda_stage[j] = c.lambda_stage[j];
  e.loss.loss_resolution = c.loss_resolution;
  e.seed = c.seed;
  e.record_every = c.record_every;
  e.mean_samples = c.mean_samples;
  e.mean_seed = c.mean_seed;
  if (c.provided != nullptr) e.provided = c.provided->value;
  e.validate();
  return e;
}

wplus::AffineSpec to_cpp(const wplus_affine_spec& s) {
  wplus::AffineSpec a;
  switch (s.kind) {
    case WPLUS_AFFINE_TRANSLATE_RIGHT: a.kind = wplus::AffineKind::TranslateRight; break;
    case WPLUS_AFFINE_TRANSLATE_LEFT: a.kind = wplus::AffineKind::TranslateLeft; break;
    case WPLUS_AFFINE_ZOOM_IN: a.kind = wplus::AffineKind::ZoomIn; break;
    case WPLUS_AFFINE_ZOOM_OUT: a.kind = wplus::AffineKind::ZoomOut; break;
    case WPLUS_AFFINE_ROTATE: a.kind = wplus::AffineKind::Rotate; break;
    default: wplus::fail(wplus::ErrorKind::InvalidArgument, "unknown affine kind");
  }
  a.magnitude = s.magnitude;
  a.validate();
  return a;
}

wplus_affine_spec to_c(const wplus::AffineSpec& a) {
  wplus_affine_spec s{};
  switch (a.kind) {
    case wplus::AffineKind::TranslateRight: s.kind = WPLUS_AFFINE_TRANSLATE_RIGHT; break;
    case wplus::AffineKind::TranslateLeft: s.kind = WPLUS_AFFINE_TRANSLATE_LEFT; break;
    case wplus::AffineKind::ZoomIn: s.kind = WPLUS_AFFINE_ZOOM_IN; break;
    case wplus::AffineKind::ZoomOut: s.kind = WPLUS_AFFINE_ZOOM_OUT; break;
    case wplus::AffineKind::Rotate: s.kind = WPLUS_AFFINE_ROTATE; break;
  }
  s.magnitude = a.magnitude;
  return s;
}

std::vector<wplus::DefectRect> to_cpp(const wplus_defect_rect* rects, std::size_t count) {
  if (count > 0) need(rects, "rects");
  std::vector<wplus::DefectRect> out;
  for (std::size_t i = 0; i < count; ++i)
    out.push_back({rects[i].x, rects[i].y, rects[i].width, rects[i].height});
  return out;
}

void scrub_timing(wplus::EmbedResult& r) {
  if (deterministic_flag()) r.wallclock_seconds = 0.0;
}

void scrub_timing(wplus::StressReport& r) {
  for (auto& e : r.results) scrub_timing(e);
}

}  // namespace

extern "C" {

const char* wplus_last_error(void) { return g_last_error.c_str(); }

const char* wplus_status_string(wplus_status status) {
  switch (status) {
    case WPLUS_OK: return "ok";
    case WPLUS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case WPLUS_ERR_SHAPE_MISMATCH: return "shape mismatch";
    case WPLUS_ERR_IO: return "i/o error";
    case WPLUS_ERR_FORMAT: return "format error";
    case WPLUS_ERR_NUMERIC: return "numeric error";
    case WPLUS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* wplus_version(void) { return "1.0.0"; }

void wplus_set_deterministic(int enabled) { deterministic_flag() = enabled != 0; }
int wplus_is_deterministic(void) { return deterministic_flag() ? 1 : 0; }

// ---- generator

void wplus_generator_config_init(wplus_generator_config* config) {
  if (config == nullptr) return;
  const wplus::GeneratorConfig d;
  *config = {d.resolution, d.style_dim, d.mapping_layers, d.base_channels, d.channel_cap, d.seed};
}

wplus_status wplus_generator_create_toy(const wplus_generator_config* config, wplus_generator** out) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    emit(out, wplus::Generator::build_toy(to_cpp(*config)));
  });
}

wplus_status wplus_generator_load(const char* path, wplus_generator** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    emit(out, wplus::load_generator(path));
  });
}

wplus_status wplus_generator_save(const wplus_generator* generator, const char* path) {
  return guarded([&] {
    need(generator, "generator");
    need(path, "path");
    wplus::save_generator(generator->value, path);
  });
}

void wplus_generator_free(wplus_generator* generator) { delete generator; }

wplus_status wplus_generator_get_config(const wplus_generator* generator, wplus_generator_config* out) {
  return guarded([&] {
    need(generator, "generator");
    need(out, "out");
    const auto& c = generator->value.config();
    *out = {c.resolution, c.style_dim, c.mapping_layers, c.base_channels, c.channel_cap, c.seed};
  });
}

size_t wplus_generator_num_layers(const wplus_generator* generator) {
  return generator ? generator->value.num_layers() : 0;
}

size_t wplus_generator_style_dim(const wplus_generator* generator) {
  return generator ? generator->value.style_dim() : 0;
}

uint64_t wplus_generator_checksum(const wplus_generator* generator) {
  return generator ? generator->value.weight_checksum() : 0;
}

wplus_status wplus_mean_latent(const wplus_generator* generator, size_t samples, uint64_t seed,
                               wplus_latent** out) {
  return guarded([&] {
    need(generator, "generator");
    need(out, "out");
    const auto& g = generator->value;
    emit(out, wplus::broadcast(wplus::mean_latent(g, samples, seed), g.num_layers()));
  });
}

wplus_status wplus_map_latent(const wplus_generator* generator, const double* z, size_t dim, wplus_latent** out) {
  return guarded([&] {
    need(generator, "generator");
    need(z, "z");
    need(out, "out");
    const auto& g = generator->value;
    wplus::LatentZ lz{std::vector<double>(z, z + dim)};
    emit(out, wplus::broadcast(g.map(lz), g.num_layers()));
  });
}

wplus_status wplus_synthesize(const wplus_generator* generator, const wplus_latent* latent, wplus_image** out) {
  return guarded([&] {
    need(generator, "generator");
    need(latent, "latent");
    need(out, "out");
    emit(out, generator->value.synthesize(latent->value));
  });
}

// ---- extractor

void wplus_extractor_config_init(wplus_extractor_config* config) {
  if (config == nullptr) return;
  const wplus::ExtractorConfig d;
  for (std::size_t j = 0; j < wplus::kNumTaps; ++j) config->widths[j] = d.widths[j];
  config->seed = d.seed;
}

wplus_status wplus_extractor_create_random(const wplus_extractor_config* config, wplus_extractor** out) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    wplus::ExtractorConfig c;
    for (std::size_t j = 0; j < wplus::kNumTaps; ++j) c.widths[j] = config->widths[j];
    c.seed = config->seed;
    emit(out, wplus::FeatureExtractor::build_random(c));
  });
}

wplus_status wplus_extractor_load(const char* path, wplus_extractor** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    emit(out, wplus::load_extractor(path));
  });
}

wplus_status wplus_extractor_save(const wplus_extractor* extractor, const char* path) {
  return guarded([&] {
    need(extractor, "extractor");
    need(path, "path");
    wplus::save_extractor(extractor->value, path);
  });
}

void wplus_extractor_free(wplus_extractor* extractor) { delete extractor; }

// ---- latents

wplus_status wplus_latent_create(size_t layers, size_t dim, const double* values, wplus_latent** out) {
  return guarded([&] {
    need(out, "out");
    if (layers * dim > 0) need(values, "values");
    emit(out, wplus::ExtendedLatent(layers, dim, std::vector<double>(values, values + layers * dim)));
  });
}

wplus_status wplus_latent_clone(const wplus_latent* latent, wplus_latent** out) {
  return guarded([&] {
    need(latent, "latent");
    need(out, "out");
    emit(out, latent->value);
  });
}

wplus_status wplus_latent_read(const char* path, wplus_latent** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    emit(out, wplus::read_latent_file(path));
  });
}

wplus_status wplus_latent_write(const wplus_latent* latent, const char* path) {
  return guarded([&] {
    need(latent, "latent");
    need(path, "path");
    wplus::write_latent_file(latent->value, path);
  });
}

void wplus_latent_free(wplus_latent* latent) { delete latent; }
size_t wplus_latent_layers(const wplus_latent* latent) { return latent ? latent->value.layers() : 0; }
size_t wplus_latent_dim(const wplus_latent* latent) { return latent ? latent->value.dim() : 0; }
const double* wplus_latent_data(const wplus_latent* latent) {
  return latent ? latent->value.values().data() : nullptr;
}

wplus_status wplus_latent_quantize(const wplus_latent* latent, wplus_latent** out) {
  return guarded([&] {
    need(latent, "latent");
    need(out, "out");
    emit(out, wplus::quantize_f32(latent->value));
  });
}

wplus_status wplus_interpolate(const wplus_latent* a, const wplus_latent* b, double lambda, wplus_latent** out) {
  return guarded([&] {
    need(a, "a");
    need(b, "b");
    need(out, "out");
    emit(out, wplus::interpolate(a->value, b->value, lambda));
  });
}

size_t wplus_default_split(size_t layers) { return wplus::default_split(layers); }

wplus_status wplus_crossover(const wplus_latent* content, const wplus_latent* style, size_t split,
                             wplus_latent** out) {
  return guarded([&] {
    need(content, "content");
    need(style, "style");
    need(out, "out");
    emit(out, wplus::crossover(content->value, style->value, split));
  });
}

wplus_status wplus_expression_direction(const wplus_latent* neutral, const wplus_latent* expressive,
                                        double threshold, int normalize, wplus_latent** out) {
  return guarded([&] {
    need(neutral, "neutral");
    need(expressive, "expressive");
    need(out, "out");
    emit(out, wplus::expression_direction(neutral->value, expressive->value, threshold, normalize != 0).rows);
  });
}

wplus_status wplus_apply_expression(const wplus_latent* target, const wplus_latent* direction, double lambda,
                                    wplus_latent** out) {
  return guarded([&] {
    need(target, "target");
    need(direction, "direction");
    need(out, "out");
    wplus::ExpressionDirection d{direction->value, 0.0, false};
    emit(out, wplus::apply_expression(target->value, d, lambda));
  });
}

wplus_status wplus_latent_distance(const wplus_latent* a, const wplus_latent* b, double* out) {
  return guarded([&] {
    need(a, "a");
    need(b, "b");
    need(out, "out");
    *out = wplus::latent_distance(a->value, b->value);
  });
}

wplus_status wplus_pairwise_distances_csv(const wplus_latent* const* latents, const char* const* labels,
                                          size_t count, const char* path) {
  return guarded([&] {
    need(path, "path");
    if (count > 0) {
      need(latents, "latents");
      need(labels, "labels");
    }
    std::vector<wplus::ExtendedLatent> ls;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < count; ++i) {
      need(latents[i], "latent");
      need(labels[i], "label");
      ls.push_back(latents[i]->value);
      names.emplace_back(labels[i]);
    }
    wplus::pairwise_distances(ls, names).write_csv(std::filesystem::path(path));
  });
}

wplus_status wplus_morph_sequence(const wplus_generator* generator, const wplus_latent* a, const wplus_latent* b,
                                  size_t frames, wplus_image** out) {
  return guarded([&] {
    need(generator, "generator");
    need(a, "a");
    need(b, "b");
    need(out, "out");
    auto images = wplus::morph_sequence(generator->value, a->value, b->value, frames);
    std::vector<wplus_image*> made;
    try {
      for (auto& im : images) made.push_back(new wplus_image{std::move(im)});
    } catch (...) {
      for (auto* p : made) delete p;
      throw;
    }
    for (std::size_t k = 0; k < made.size(); ++k) out[k] = made[k];
  });
}

// ---- images

wplus_status wplus_image_create(size_t side, const double* pixels, wplus_image** out) {
  return guarded([&] {
    need(out, "out");
    const std::size_t n = side * side * 3;
    if (n > 0) need(pixels, "pixels");
    emit(out, wplus::ImageBuffer(side, std::vector<double>(pixels, pixels + n)));
  });
}

wplus_status wplus_image_read_png(const char* path, wplus_image** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    emit(out, wplus::read_png(path));
  });
}

wplus_status wplus_image_write_png(const wplus_image* image, const char* path) {
  return guarded([&] {
    need(image, "image");
    need(path, "path");
    wplus::write_png(image->value, path);
  });
}

void wplus_image_free(wplus_image* image) { delete image; }
size_t wplus_image_side(const wplus_image* image) { return image ? image->value.side() : 0; }
const double* wplus_image_data(const wplus_image* image) {
  return image ? image->value.pixels().data() : nullptr;
}

// ---- embedding

void wplus_embed_config_init(wplus_embed_config* config) {
  if (config == nullptr) return;
  const wplus::EmbedConfig d;
  config->init = WPLUS_INIT_MEAN;
  config->space = WPLUS_SPACE_WPLUS;
  config->steps = d.steps;
  config->learning_rate = d.learning_rate;
  config->beta1 = d.beta1;
  config->beta2 = d.beta2;
  config->epsilon = d.epsilon;
  config->lambda_mse = d.loss.lambda_mse;
  for (std::size_t j = 0; j < wplus::kNumTaps; ++j) config->lambda_stage[j] = d.loss.lambda_stage[j];
  config->loss_resolution = d.loss.loss_resolution;
  config->seed = d.seed;
  config->record_every = d.record_every;
  config->mean_samples = d.mean_samples;
  config->mean_seed = d.mean_seed;
  config->provided = nullptr;
}

wplus_status wplus_embed(const wplus_generator* generator, const wplus_extractor* extractor,
                         const wplus_image* target, const wplus_embed_config* config, wplus_embed_result** out) {
  return guarded([&] {
    need(generator, "generator");
    need(extractor, "extractor");
    need(target, "target");
    need(config, "config");
    need(out, "out");
    auto r = wplus::embed(generator->value, extractor->value, target->value, to_cpp(*config));
    scrub_timing(r);
    emit(out, std::move(r));
  });
}

void wplus_embed_result_free(wplus_embed_result* result) { delete result; }

wplus_status wplus_embed_result_latent(const wplus_embed_result* result, wplus_latent** out) {
  return guarded([&] {
    need(result, "result");
    need(out, "out");
    emit(out, result->value.latent);
  });
}

wplus_status wplus_embed_result_losses(const wplus_embed_result* result, double* total, double* percept,
                                       double* mse, double* dist_to_mean) {
  return guarded([&] {
    need(result, "result");
    const auto& r = result->value;
    if (total) *total = r.loss.total;
    if (percept) *percept = r.loss.percept;
    if (mse) *mse = r.loss.mse;
    if (dist_to_mean) *dist_to_mean = r.dist_to_mean;
  });
}

size_t wplus_embed_result_best_step(const wplus_embed_result* result) {
  return result ? result->value.best_step : 0;
}

double wplus_embed_result_wallclock(const wplus_embed_result* result) {
  return result ? result->value.wallclock_seconds : 0.0;
}

size_t wplus_embed_result_trace_size(const wplus_embed_result* result) {
  return result ? result->value.trace.samples.size() : 0;
}

wplus_status wplus_embed_result_trace_sample(const wplus_embed_result* result, size_t index, size_t* step,
                                             double* total, double* percept, double* mse, double* dist_to_mean) {
  return guarded([&] {
    need(result, "result");
    const auto& s = result->value.trace.samples;
    wplus::require(index < s.size(), wplus::ErrorKind::InvalidArgument, "trace index out of range");
    const auto& t = s[index];
    if (step) *step = t.step;
    if (total) *total = t.total;
    if (percept) *percept = t.percept;
    if (mse) *mse = t.mse;
    if (dist_to_mean) *dist_to_mean = t.dist_to_mean;
  });
}

wplus_status wplus_embed_result_write_trace(const wplus_embed_result* result, const char* path) {
  return guarded([&] {
    need(result, "result");
    need(path, "path");
    result->value.trace.write_csv(std::filesystem::path(path));
  });
}

// ---- stress

size_t wplus_reference_affine_protocol(size_t resolution, wplus_affine_spec* out, size_t capacity) {
  const auto specs = wplus::reference_affine_protocol(resolution);
  if (out != nullptr)
    for (std::size_t i = 0; i < specs.size() && i < capacity; ++i) out[i] = to_c(specs[i]);
  return specs.size();
}

wplus_status wplus_apply_affine(const wplus_image* image, wplus_affine_spec spec, wplus_image** out) {
  return guarded([&] {
    need(image, "image");
    need(out, "out");
    emit(out, wplus::apply_affine(image->value, to_cpp(spec)));
  });
}

wplus_status wplus_apply_defects(const wplus_image* image, const wplus_defect_rect* rects, size_t count,
                                 double fill, wplus_image** out) {
  return guarded([&] {
    need(image, "image");
    need(out, "out");
    emit(out, wplus::apply_defects(image->value, wplus::DefectSpec{to_cpp(rects, count), fill}));
  });
}

wplus_status wplus_run_affine_suite(const wplus_generator* generator, const wplus_extractor* extractor,
                                    const wplus_image* image, const wplus_embed_config* config,
                                    const wplus_affine_spec* specs, size_t count, size_t jobs, wplus_report** out) {
  return guarded([&] {
    need(generator, "generator");
    need(extractor, "extractor");
    need(image, "image");
    need(config, "config");
    need(out, "out");
    if (count > 0) need(specs, "specs");
    std::vector<wplus::AffineSpec> list;
    for (std::size_t i = 0; i < count; ++i) list.push_back(to_cpp(specs[i]));
    auto r = wplus::run_affine_suite(generator->value, extractor->value, image->value, to_cpp(*config), list,
                                     effective_jobs(jobs));
    scrub_timing(r);
    emit(out, std::move(r));
  });
}

wplus_status wplus_run_defect_suite(const wplus_generator* generator, const wplus_extractor* extractor,
                                    const wplus_image* image, const wplus_embed_config* config,
                                    const wplus_defect_condition* conditions, size_t count, size_t jobs,
                                    wplus_report** out) {
  return guarded([&] {
    need(generator, "generator");
    need(extractor, "extractor");
    need(image, "image");
    need(config, "config");
    need(out, "out");
    if (count > 0) need(conditions, "conditions");
    std::vector<wplus::DefectCondition> list;
    for (std::size_t i = 0; i < count; ++i) {
      need(conditions[i].label, "condition label");
      list.push_back({conditions[i].label,
                      wplus::DefectSpec{to_cpp(conditions[i].rects, conditions[i].rect_count), conditions[i].fill}});
    }
    auto r = wplus::run_defect_suite(generator->value, extractor->value, image->value, to_cpp(*config), list,
                                     effective_jobs(jobs));
    scrub_timing(r);
    emit(out, std::move(r));
  });
}

wplus_status wplus_run_iterative_suite(const wplus_generator* generator, const wplus_extractor* extractor,
                                       const wplus_image* image, const wplus_embed_config* config, size_t rounds,
                                       wplus_report** out) {
  return guarded([&] {
    need(generator, "generator");
    need(extractor, "extractor");
    need(image, "image");
    need(config, "config");
    need(out, "out");
    auto r = wplus::run_iterative_suite(generator->value, extractor->value, image->value, to_cpp(*config), rounds);
    scrub_timing(r);
    emit(out, std::move(r));
  });
}

wplus_status wplus_run_init_comparison(const wplus_generator* generator, const wplus_extractor* extractor,
                                       const wplus_image* const* images, const char* const* labels, size_t count,
                                       const wplus_embed_config* config, size_t jobs, wplus_report** out) {
  return guarded([&] {
    need(generator, "generator");
    need(extractor, "extractor");
    need(config, "config");
    need(out, "out");
    if (count > 0) {
      need(images, "images");
      need(labels, "labels");
    }
    std::vector<std::pair<std::string, wplus::ImageBuffer>> targets;
    for (std::size_t i = 0; i < count; ++i) {
      need(images[i], "image");
      need(labels[i], "label");
      targets.emplace_back(labels[i], images[i]->value);
    }
    auto r = wplus::run_init_comparison(generator->value, extractor->value, targets, to_cpp(*config),
                                        effective_jobs(jobs));
    scrub_timing(r);
    emit(out, std::move(r));
  });
}

void wplus_report_free(wplus_report* report) { delete report; }
size_t wplus_report_rows(const wplus_report* report) { return report ? report->value.rows.size() : 0; }

wplus_status wplus_report_row(const wplus_report* report, size_t index, const char** condition, double* loss_total,
                              double* dist_to_mean) {
  return guarded([&] {
    need(report, "report");
    const auto& rows = report->value.rows;
    wplus::require(index < rows.size(), wplus::ErrorKind::InvalidArgument, "report row out of range");
    if (condition) *condition = rows[index].condition.c_str();
    if (loss_total) *loss_total = rows[index].loss_total;
    if (dist_to_mean) *dist_to_mean = rows[index].dist_to_mean;
  });
}

const char* wplus_report_config_hash(const wplus_report* report) {
  return report ? report->value.config_hash.c_str() : "";
}

wplus_status wplus_report_write_csv(const wplus_report* report, const char* path) {
  return guarded([&] {
    need(report, "report");
    need(path, "path");
    report->value.write_csv(std::filesystem::path(path));
  });
}

}  // extern "C"
