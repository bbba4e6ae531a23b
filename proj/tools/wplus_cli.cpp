// wplus command-line tool. Links only the C API.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "run_config.hpp"
#include "wplus/wplus.h"

namespace fs = std::filesystem;
using wplus::cli::ConfigError;
using wplus::cli::RunConfig;

namespace {

enum Exit { kOk = 0, kInternal = 1, kBadArgs = 2, kIo = 3, kNumeric = 4 };

// Carries a C API failure (or a CLI-level usage error) to the exit-code mapping.
struct Failure {
  int code;
  std::string message;
};

int exit_code(wplus_status s) {
  switch (s) {
    case WPLUS_OK: return kOk;
    case WPLUS_ERR_INVALID_ARGUMENT:
    case WPLUS_ERR_SHAPE_MISMATCH: return kBadArgs;
    case WPLUS_ERR_IO:
    case WPLUS_ERR_FORMAT: return kIo;
    case WPLUS_ERR_NUMERIC: return kNumeric;
    default: return kInternal;
  }
}

void check(wplus_status s, const std::string& context) {
  if (s != WPLUS_OK) throw Failure{exit_code(s), context + ": " + wplus_last_error()};
}

[[noreturn]] void usage(const std::string& message) { throw Failure{kBadArgs, message}; }

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Generator = std::unique_ptr<wplus_generator, Deleter<wplus_generator, wplus_generator_free>>;
using Extractor = std::unique_ptr<wplus_extractor, Deleter<wplus_extractor, wplus_extractor_free>>;
using Latent = std::unique_ptr<wplus_latent, Deleter<wplus_latent, wplus_latent_free>>;
using Image = std::unique_ptr<wplus_image, Deleter<wplus_image, wplus_image_free>>;
using Result = std::unique_ptr<wplus_embed_result, Deleter<wplus_embed_result, wplus_embed_result_free>>;
using Report = std::unique_ptr<wplus_report, Deleter<wplus_report, wplus_report_free>>;

Generator load_generator(const std::string& path) {
  wplus_generator* g = nullptr;
  check(wplus_generator_load(path.c_str(), &g), "loading generator " + path);
  return Generator(g);
}

Latent load_latent(const std::string& path) {
  wplus_latent* l = nullptr;
  check(wplus_latent_read(path.c_str(), &l), "reading latent " + path);
  return Latent(l);
}

Image load_image(const std::string& path) {
  wplus_image* im = nullptr;
  check(wplus_image_read_png(path.c_str(), &im), "reading image " + path);
  return Image(im);
}

Image synthesize(const wplus_generator* g, const wplus_latent* l) {
  wplus_image* im = nullptr;
  check(wplus_synthesize(g, l, &im), "synthesizing");
  return Image(im);
}

void write_png(const wplus_image* im, const std::string& path) {
  check(wplus_image_write_png(im, path.c_str()), "writing " + path);
}

void write_latent(const wplus_latent* l, const std::string& path) {
  check(wplus_latent_write(l, path.c_str()), "writing " + path);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

// Flags that map onto RunConfig keys. Values stay strings until the layers
// are merged, so a flag always beats the config file.
struct Layered {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> bound;  // key, value
  std::vector<std::pair<std::string, CLI::Option*>> options;

  void bind(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    bound.emplace_back(key, std::string());
    const std::size_t idx = bound.size() - 1;
    CLI::Option* opt = app->add_option_function<std::string>(
        flag, [this, idx](const std::string& v) { bound[idx].second = v; }, help);
    options.emplace_back(key, opt);
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path.empty()) {
      if (!fs::exists(config_path)) throw Failure{kIo, "config file not found: " + config_path};
      cfg.load_file(config_path);
    }
    for (std::size_t i = 0; i < options.size(); ++i)
      if (options[i].second->count() > 0) cfg.set(bound[i].first, bound[i].second);
    return cfg;
  }
};

void bind_config(CLI::App* app, Layered& layers) {
  app->add_option("--config", layers.config_path, "key = value run configuration file");
}

void bind_embed_flags(CLI::App* app, Layered& l) {
  l.bind(app, "--space", "space", "latent space: wplus, w or z");
  l.bind(app, "--steps", "steps", "optimizer steps (default 5000)");
  l.bind(app, "--lr", "lr", "Adam learning rate (default 0.01)");
  l.bind(app, "--lambda-mse", "lambda_mse", "weight of the pixel MSE term (default 1)");
  l.bind(app, "--loss-resolution", "loss_resolution", "side at which the perceptual term is evaluated");
  l.bind(app, "--seed", "seed", "embedding seed");
  l.bind(app, "--record-every", "record_every", "trace sampling interval");
  l.bind(app, "--mean-samples", "mean_samples", "samples for the mean latent estimate");
  l.bind(app, "--mean-seed", "mean_seed", "seed for the mean latent estimate");
  l.bind(app, "--extractor-widths", "extractor_widths", "widths of a seeded-random extractor, e.g. 64,64,256,512");
  l.bind(app, "--extractor-seed", "extractor_seed", "seed of a seeded-random extractor");
}

wplus_embed_config embed_config(const RunConfig& cfg) {
  wplus_embed_config c;
  wplus_embed_config_init(&c);
  const std::string& init = cfg.get("init");
  if (init == "mean") c.init = WPLUS_INIT_MEAN;
  else if (init == "random") c.init = WPLUS_INIT_RANDOM;
  else if (init == "file") c.init = WPLUS_INIT_PROVIDED;
  else usage("init: expected mean, random or file, got '" + init + "'");
  const std::string& space = cfg.get("space");
  if (space == "wplus") c.space = WPLUS_SPACE_WPLUS;
  else if (space == "w") c.space = WPLUS_SPACE_W;
  else if (space == "z") c.space = WPLUS_SPACE_Z;
  else usage("space: expected wplus, w or z, got '" + space + "'");
  c.steps = cfg.get_u64("steps");
  c.learning_rate = cfg.get_double("lr");
  c.beta1 = cfg.get_double("beta1");
  c.beta2 = cfg.get_double("beta2");
  c.epsilon = cfg.get_double("epsilon");
  c.lambda_mse = cfg.get_double("lambda_mse");
  for (int j = 0; j < 4; ++j) c.lambda_stage[j] = cfg.get_double("lambda_stage" + std::to_string(j + 1));
  c.loss_resolution = static_cast<uint32_t>(cfg.get_u64("loss_resolution"));
  c.seed = cfg.get_u64("seed");
  c.record_every = cfg.get_u64("record_every");
  c.mean_samples = cfg.get_u64("mean_samples");
  c.mean_seed = cfg.get_u64("mean_seed");
  return c;
}

Extractor extractor_for(const std::string& path, const RunConfig& cfg) {
  wplus_extractor* fx = nullptr;
  if (!path.empty()) {
    check(wplus_extractor_load(path.c_str(), &fx), "loading extractor " + path);
    return Extractor(fx);
  }
  wplus_extractor_config ec;
  wplus_extractor_config_init(&ec);
  const auto widths = split(cfg.get("extractor_widths"), ',');
  if (widths.size() != 4) usage("extractor_widths: expected four comma-separated widths");
  for (int j = 0; j < 4; ++j) ec.widths[j] = static_cast<uint32_t>(wplus::cli::parse_u64(widths[j], "extractor width"));
  ec.seed = cfg.get_u64("extractor_seed");
  check(wplus_extractor_create_random(&ec, &fx), "building extractor");
  return Extractor(fx);
}

void print_losses(const wplus_embed_result* r) {
  double total = 0, percept = 0, mse = 0, dist = 0;
  check(wplus_embed_result_losses(r, &total, &percept, &mse, &dist), "reading result");
  std::printf("total=%.9g percept=%.9g mse=%.9g dist_to_mean=%.9g best_step=%zu\n", total, percept, mse, dist,
              wplus_embed_result_best_step(r));
}

// ---- subcommands

struct InitGeneratorArgs {
  std::string out;
  Layered layers;
};

void cmd_init_generator(InitGeneratorArgs& a) {
  const RunConfig cfg = a.layers.resolve();
  wplus_generator_config gc;
  gc.resolution = static_cast<uint32_t>(cfg.get_u64("resolution"));
  gc.style_dim = static_cast<uint32_t>(cfg.get_u64("style_dim"));
  gc.mapping_layers = static_cast<uint32_t>(cfg.get_u64("mapping_layers"));
  gc.base_channels = static_cast<uint32_t>(cfg.get_u64("base_channels"));
  gc.channel_cap = static_cast<uint32_t>(cfg.get_u64("channel_cap"));
  gc.seed = cfg.get_u64("generator_seed");
  wplus_generator* g = nullptr;
  check(wplus_generator_create_toy(&gc, &g), "building generator");
  Generator gen(g);
  check(wplus_generator_save(gen.get(), a.out.c_str()), "saving generator");
  std::printf("layers=%zu style_dim=%zu checksum=%016llx\n", wplus_generator_num_layers(gen.get()),
              wplus_generator_style_dim(gen.get()),
              static_cast<unsigned long long>(wplus_generator_checksum(gen.get())));
}

struct InitExtractorArgs {
  std::string out;
  Layered layers;
};

void cmd_init_extractor(InitExtractorArgs& a) {
  const RunConfig cfg = a.layers.resolve();
  Extractor fx = extractor_for("", cfg);
  check(wplus_extractor_save(fx.get(), a.out.c_str()), "saving extractor");
}

struct EmbedArgs {
  std::string image, generator, extractor, init_latent, out_latent, out_image, trace;
  Layered layers;
};

void cmd_embed(EmbedArgs& a) {
  const RunConfig cfg = a.layers.resolve();
  wplus_embed_config ec = embed_config(cfg);
  if (ec.steps == 0) usage("--steps must be at least 1");
  Latent provided;
  if (ec.init == WPLUS_INIT_PROVIDED) {
    if (a.init_latent.empty()) usage("--init file requires --init-latent");
    provided = load_latent(a.init_latent);
    ec.provided = provided.get();
  } else if (!a.init_latent.empty()) {
    usage("--init-latent requires --init file");
  }
  Generator gen = load_generator(a.generator);
  Extractor fx = extractor_for(a.extractor, cfg);
  Image target = load_image(a.image);

  wplus_embed_result* r = nullptr;
  check(wplus_embed(gen.get(), fx.get(), target.get(), &ec, &r), "embedding");
  Result result(r);
  print_losses(result.get());

  wplus_latent* l = nullptr;
  check(wplus_embed_result_latent(result.get(), &l), "reading result");
  Latent best(l);
  // The stored latent is float32; render from exactly what synth will read back.
  check(wplus_latent_quantize(best.get(), &l), "quantizing latent");
  Latent stored(l);
  if (!a.out_latent.empty()) write_latent(stored.get(), a.out_latent);
  if (!a.out_image.empty()) write_png(synthesize(gen.get(), stored.get()).get(), a.out_image);
  if (!a.trace.empty())
    check(wplus_embed_result_write_trace(result.get(), a.trace.c_str()), "writing " + a.trace);
}

struct SynthArgs {
  std::string latent, generator, out;
};

void cmd_synth(SynthArgs& a) {
  Generator gen = load_generator(a.generator);
  Latent l = load_latent(a.latent);
  write_png(synthesize(gen.get(), l.get()).get(), a.out);
}

struct MorphArgs {
  std::string a, b, generator, out_dir;
  std::size_t frames = 16;
};

void cmd_morph(MorphArgs& m) {
  if (m.frames < 2) usage("--frames must be at least 2");
  Generator gen = load_generator(m.generator);
  Latent a = load_latent(m.a);
  Latent b = load_latent(m.b);
  std::vector<wplus_image*> raw(m.frames, nullptr);
  check(wplus_morph_sequence(gen.get(), a.get(), b.get(), m.frames, raw.data()), "morphing");
  std::vector<Image> frames;
  for (auto* p : raw) frames.emplace_back(p);
  std::error_code ec;
  fs::create_directories(m.out_dir, ec);
  if (ec) throw Failure{kIo, "cannot create " + m.out_dir + ": " + ec.message()};
  for (std::size_t k = 0; k < frames.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%03zu.png", k);
    write_png(frames[k].get(), (fs::path(m.out_dir) / name).string());
  }
}

struct StylemixArgs {
  std::string content, style, generator, out, out_latent;
  long long split = -1;
};

void cmd_stylemix(StylemixArgs& a) {
  Generator gen = load_generator(a.generator);
  Latent content = load_latent(a.content);
  Latent style = load_latent(a.style);
  const std::size_t split =
      a.split < 0 ? wplus_default_split(wplus_latent_layers(content.get())) : static_cast<std::size_t>(a.split);
  wplus_latent* l = nullptr;
  check(wplus_crossover(content.get(), style.get(), split, &l), "crossover");
  Latent mixed(l);
  write_png(synthesize(gen.get(), mixed.get()).get(), a.out);
  if (!a.out_latent.empty()) write_latent(mixed.get(), a.out_latent);
}

struct ExprArgs {
  std::string target, neutral, expressive, generator, out, out_latent;
  double lambda = 1.0;
  double threshold = 1.0;
  bool normalize = false;
};

void cmd_expr(ExprArgs& a) {
  Generator gen = load_generator(a.generator);
  Latent target = load_latent(a.target);
  Latent neutral = load_latent(a.neutral);
  Latent expressive = load_latent(a.expressive);
  wplus_latent* l = nullptr;
  check(wplus_expression_direction(neutral.get(), expressive.get(), a.threshold, a.normalize ? 1 : 0, &l),
        "expression direction");
  Latent direction(l);
  check(wplus_apply_expression(target.get(), direction.get(), a.lambda, &l), "applying expression");
  Latent edited(l);
  write_png(synthesize(gen.get(), edited.get()).get(), a.out);
  if (!a.out_latent.empty()) write_latent(edited.get(), a.out_latent);
}

struct MeanLatentArgs {
  std::string generator, out;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
};

void cmd_mean_latent(MeanLatentArgs& a) {
  Generator gen = load_generator(a.generator);
  wplus_latent* l = nullptr;
  check(wplus_mean_latent(gen.get(), a.samples, a.seed, &l), "mean latent");
  Latent mean(l);
  write_latent(mean.get(), a.out);
}

struct DistancesArgs {
  std::vector<std::string> latents, labels;
  std::string out;
};

void cmd_distances(DistancesArgs& a) {
  if (a.latents.size() != a.labels.size())
    usage("got " + std::to_string(a.latents.size()) + " latents but " + std::to_string(a.labels.size()) +
          " labels");
  std::vector<Latent> owned;
  std::vector<const wplus_latent*> ptrs;
  std::vector<const char*> names;
  for (std::size_t i = 0; i < a.latents.size(); ++i) {
    owned.push_back(load_latent(a.latents[i]));
    ptrs.push_back(owned.back().get());
    names.push_back(a.labels[i].c_str());
  }
  check(wplus_pairwise_distances_csv(ptrs.data(), names.data(), ptrs.size(), a.out.c_str()), "distances");
}

struct StressArgs {
  std::string image, generator, extractor, report;
  std::vector<std::string> images, labels, specs, defects;
  bool reference_protocol = false;
  double fill = 1.0;
  Layered layers;
};

wplus_affine_spec parse_affine(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) usage("affine spec '" + text + "': expected kind:magnitude");
  wplus_affine_spec s{};
  const std::string& k = parts[0];
  if (k == "right") s.kind = WPLUS_AFFINE_TRANSLATE_RIGHT;
  else if (k == "left") s.kind = WPLUS_AFFINE_TRANSLATE_LEFT;
  else if (k == "zoom_in") s.kind = WPLUS_AFFINE_ZOOM_IN;
  else if (k == "zoom_out") s.kind = WPLUS_AFFINE_ZOOM_OUT;
  else if (k == "rotate") s.kind = WPLUS_AFFINE_ROTATE;
  else usage("affine kind '" + k + "': expected right, left, zoom_in, zoom_out or rotate");
  s.magnitude = wplus::cli::parse_double(parts[1], "affine magnitude");
  return s;
}

// label=x,y,w,h[;x,y,w,h...]
std::pair<std::string, std::vector<wplus_defect_rect>> parse_defect(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) usage("defect '" + text + "': expected label=x,y,w,h[;x,y,w,h]");
  std::vector<wplus_defect_rect> rects;
  for (const auto& r : split(text.substr(eq + 1), ';')) {
    const auto f = split(r, ',');
    if (f.size() != 4) usage("defect rectangle '" + r + "': expected x,y,w,h");
    std::size_t v[4];
    for (int i = 0; i < 4; ++i) v[i] = wplus::cli::parse_u64(f[i], "defect rectangle");
    rects.push_back({v[0], v[1], v[2], v[3]});
  }
  return {text.substr(0, eq), rects};
}

void finish_report(wplus_report* raw, const std::string& path) {
  Report report(raw);
  for (std::size_t i = 0; i < wplus_report_rows(report.get()); ++i) {
    const char* cond = nullptr;
    double loss = 0, dist = 0;
    check(wplus_report_row(report.get(), i, &cond, &loss, &dist), "reading report");
    std::printf("%-28s L=%.6g (x1e5 %.4f) dist=%.6g\n", cond, loss, loss * 1e5, dist);
  }
  check(wplus_report_write_csv(report.get(), path.c_str()), "writing " + path);
}

void cmd_stress(const std::string& mode, StressArgs& a) {
  const RunConfig cfg = a.layers.resolve();
  wplus_embed_config ec = embed_config(cfg);
  if (ec.init == WPLUS_INIT_PROVIDED) usage("stress suites do not take --init file");
  const std::size_t jobs = cfg.get_u64("jobs");
  Generator gen = load_generator(a.generator);
  Extractor fx = extractor_for(a.extractor, cfg);
  wplus_report* r = nullptr;

  if (mode == "init") {
    if (a.images.empty()) usage("stress init needs --images");
    if (a.labels.empty())
      for (std::size_t i = 0; i < a.images.size(); ++i) a.labels.push_back("target_" + std::to_string(i + 1));
    if (a.labels.size() != a.images.size()) usage("--labels must match --images");
    std::vector<Image> owned;
    std::vector<const wplus_image*> ptrs;
    std::vector<const char*> names;
    for (std::size_t i = 0; i < a.images.size(); ++i) {
      owned.push_back(load_image(a.images[i]));
      ptrs.push_back(owned.back().get());
      names.push_back(a.labels[i].c_str());
    }
    check(wplus_run_init_comparison(gen.get(), fx.get(), ptrs.data(), names.data(), ptrs.size(), &ec, jobs, &r),
          "init comparison");
    finish_report(r, a.report);
    return;
  }

  if (a.image.empty()) usage("stress " + mode + " needs --image");
  Image image = load_image(a.image);
  if (mode == "affine") {
    std::vector<wplus_affine_spec> specs;
    if (a.reference_protocol) {
      specs.resize(wplus_reference_affine_protocol(wplus_image_side(image.get()), nullptr, 0));
      wplus_reference_affine_protocol(wplus_image_side(image.get()), specs.data(), specs.size());
    }
    for (const auto& s : a.specs) specs.push_back(parse_affine(s));
    check(wplus_run_affine_suite(gen.get(), fx.get(), image.get(), &ec, specs.data(), specs.size(), jobs, &r),
          "affine suite");
  } else if (mode == "defect") {
    std::vector<std::pair<std::string, std::vector<wplus_defect_rect>>> parsed;
    for (const auto& d : a.defects) parsed.push_back(parse_defect(d));
    std::vector<wplus_defect_condition> conds;
    for (const auto& [label, rects] : parsed)
      conds.push_back({label.c_str(), rects.data(), rects.size(), a.fill});
    check(wplus_run_defect_suite(gen.get(), fx.get(), image.get(), &ec, conds.data(), conds.size(), jobs, &r),
          "defect suite");
  } else {
    check(wplus_run_iterative_suite(gen.get(), fx.get(), image.get(), &ec, cfg.get_u64("rounds"), &r),
          "iterative suite");
  }
  finish_report(r, a.report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wplus: embed images into the extended latent space of a style-based generator"};
  app.require_subcommand(1);

  InitGeneratorArgs ig;
  auto* c_ig = app.add_subcommand("init-generator", "write a seeded toy generator checkpoint");
  c_ig->add_option("--out", ig.out, "checkpoint directory")->required();
  bind_config(c_ig, ig.layers);
  ig.layers.bind(c_ig, "--resolution", "resolution", "output side, a power of two");
  ig.layers.bind(c_ig, "--style-dim", "style_dim", "latent dimension");
  ig.layers.bind(c_ig, "--mapping-layers", "mapping_layers", "fully connected mapping layers");
  ig.layers.bind(c_ig, "--base-channels", "base_channels", "channels at the output resolution");
  ig.layers.bind(c_ig, "--channel-cap", "channel_cap", "maximum channels per layer");
  ig.layers.bind(c_ig, "--seed", "generator_seed", "weight seed");

  InitExtractorArgs ix;
  auto* c_ix = app.add_subcommand("init-extractor", "write a seeded-random feature extractor checkpoint");
  c_ix->add_option("--out", ix.out, "checkpoint directory")->required();
  bind_config(c_ix, ix.layers);
  ix.layers.bind(c_ix, "--widths", "extractor_widths", "four comma-separated tap widths");
  ix.layers.bind(c_ix, "--seed", "extractor_seed", "weight seed");

  EmbedArgs em;
  auto* c_em = app.add_subcommand("embed", "optimize a latent code that reproduces an image");
  c_em->add_option("--image", em.image, "target PNG")->required();
  c_em->add_option("--generator", em.generator, "generator checkpoint")->required();
  c_em->add_option("--extractor", em.extractor, "extractor checkpoint (default: seeded random)");
  c_em->add_option("--init-latent", em.init_latent, "starting latent for --init file");
  c_em->add_option("--out-latent", em.out_latent, "best latent (LatentFile)");
  c_em->add_option("--out-image", em.out_image, "reconstruction PNG");
  c_em->add_option("--trace", em.trace, "loss trace CSV");
  bind_config(c_em, em.layers);
  em.layers.bind(c_em, "--init", "init", "mean, random or file");
  bind_embed_flags(c_em, em.layers);

  SynthArgs sy;
  auto* c_sy = app.add_subcommand("synth", "render a latent");
  c_sy->add_option("--latent", sy.latent)->required();
  c_sy->add_option("--generator", sy.generator)->required();
  c_sy->add_option("--out", sy.out, "output PNG")->required();

  MorphArgs mo;
  auto* c_mo = app.add_subcommand("morph", "render frames interpolating between two latents");
  c_mo->add_option("--a", mo.a)->required();
  c_mo->add_option("--b", mo.b)->required();
  c_mo->add_option("--generator", mo.generator)->required();
  c_mo->add_option("--frames", mo.frames, "frame count, at least 2")->capture_default_str();
  c_mo->add_option("--out-dir", mo.out_dir)->required();

  StylemixArgs sm;
  auto* c_sm = app.add_subcommand("stylemix", "combine coarse rows of one latent with fine rows of another");
  c_sm->add_option("--content", sm.content)->required();
  c_sm->add_option("--style", sm.style)->required();
  c_sm->add_option("--generator", sm.generator)->required();
  c_sm->add_option("--split", sm.split, "rows taken from content (default: half, rounded up)");
  c_sm->add_option("--out", sm.out, "output PNG")->required();
  c_sm->add_option("--out-latent", sm.out_latent);

  ExprArgs ex;
  auto* c_ex = app.add_subcommand("expr", "transfer an expression direction onto a target latent");
  c_ex->add_option("--target", ex.target)->required();
  c_ex->add_option("--neutral", ex.neutral)->required();
  c_ex->add_option("--expressive", ex.expressive)->required();
  c_ex->add_option("--generator", ex.generator)->required();
  c_ex->add_option("--lambda", ex.lambda, "intensity")->capture_default_str();
  c_ex->add_option("--threshold", ex.threshold, "rows with smaller norm are dropped")->capture_default_str();
  c_ex->add_flag("--normalize", ex.normalize, "scale the direction to unit norm");
  c_ex->add_option("--out", ex.out, "output PNG")->required();
  c_ex->add_option("--out-latent", ex.out_latent);

  MeanLatentArgs ml;
  auto* c_ml = app.add_subcommand("mean-latent", "estimate the mean style code");
  c_ml->add_option("--generator", ml.generator)->required();
  c_ml->add_option("--samples", ml.samples)->capture_default_str();
  c_ml->add_option("--seed", ml.seed)->capture_default_str();
  c_ml->add_option("--out", ml.out)->required();

  DistancesArgs di;
  auto* c_di = app.add_subcommand("distances", "pairwise latent distance matrix");
  c_di->add_option("--latents", di.latents)->required();
  c_di->add_option("--labels", di.labels)->required();
  c_di->add_option("--out", di.out, "CSV")->required();

  StressArgs st;
  std::string stress_mode;
  auto* c_st = app.add_subcommand("stress", "robustness suites");
  c_st->add_option("mode", stress_mode, "affine, defect, iterate or init")
      ->required()
      ->check(CLI::IsMember({"affine", "defect", "iterate", "init"}));
  c_st->add_option("--image", st.image, "target PNG");
  c_st->add_option("--images", st.images, "targets for the init comparison");
  c_st->add_option("--labels", st.labels, "labels for --images");
  c_st->add_option("--generator", st.generator)->required();
  c_st->add_option("--extractor", st.extractor, "extractor checkpoint (default: seeded random)");
  c_st->add_option("--report", st.report, "report CSV")->required();
  c_st->add_option("--spec", st.specs, "affine condition kind:magnitude, repeatable");
  c_st->add_flag("--reference-protocol", st.reference_protocol, "add the six reference transforms");
  c_st->add_option("--defect", st.defects, "defect condition label=x,y,w,h[;x,y,w,h], repeatable");
  c_st->add_option("--fill", st.fill, "defect fill value")->capture_default_str();
  bind_config(c_st, st.layers);
  st.layers.bind(c_st, "--init", "init", "mean or random");
  st.layers.bind(c_st, "--jobs", "jobs", "conditions run concurrently");
  st.layers.bind(c_st, "--rounds", "rounds", "iterative rounds (default 7)");
  bind_embed_flags(c_st, st.layers);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kBadArgs;
  }

  try {
    if (*c_ig) cmd_init_generator(ig);
    else if (*c_ix) cmd_init_extractor(ix);
    else if (*c_em) cmd_embed(em);
    else if (*c_sy) cmd_synth(sy);
    else if (*c_mo) cmd_morph(mo);
    else if (*c_sm) cmd_stylemix(sm);
    else if (*c_ex) cmd_expr(ex);
    else if (*c_ml) cmd_mean_latent(ml);
    else if (*c_di) cmd_distances(di);
    else if (*c_st) cmd_stress(stress_mode, st);
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", f.message.c_str());
    return f.code;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadArgs;
  }
  return kOk;
}
