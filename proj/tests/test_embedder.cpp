#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "support.hpp"
#include "wplus/embedder.hpp"
#include "wplus/error.hpp"

using namespace wplus;

namespace {

struct Fixture {
  Generator gen = Generator::build_toy(testing::small_generator_config());
  FeatureExtractor fx = FeatureExtractor::build_random(testing::small_extractor_config());
  ExtendedLatent truth = testing::mapped_latent(gen, 61);
  ImageBuffer target = gen.synthesize(truth);

  EmbedConfig config(std::size_t steps) const {
    EmbedConfig c;
    c.steps = steps;
    c.loss = testing::native_loss(gen.resolution());
    c.mean_samples = 2000;
    c.mean_seed = 3;
    c.record_every = 10;
    return c;
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST_CASE("config validation") {
  EmbedConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.steps == 5000);
  CHECK(c.learning_rate == 0.01);
  CHECK(c.beta1 == 0.9);
  CHECK(c.beta2 == 0.999);
  CHECK(c.epsilon == 1e-8);
  c.steps = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.learning_rate = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.beta1 = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.init = InitStrategy::Provided;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  EmbedConfig d = c;
  d.steps = 10;
  CHECK(c.fingerprint() != d.fingerprint());
  CHECK(c.fingerprint() == EmbedConfig{}.fingerprint());
}

TEST_CASE("Adam matches the closed-form update") {
  const double lr = 0.01, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  Adam adam(2, lr, b1, b2, eps);
  std::vector<double> p{0.5, -1.0};
  const std::vector<double> g1{0.3, -2.0}, g2{-0.1, 0.7};
  adam.step(p, g1);
  // Bias-corrected first step: m̂ = g, v̂ = g², so the update is lr·g/(|g| + eps).
  CHECK(std::abs(p[0] - (0.5 - lr * 0.3 / (0.3 + eps))) <= 1e-12);
  CHECK(std::abs(p[1] - (-1.0 - lr * -2.0 / (2.0 + eps))) <= 1e-12);

  // Scripted scalar oracle for the second step.
  for (std::size_t i = 0; i < 2; ++i) {
    const double m1 = (1 - b1) * g1[i], v1 = (1 - b2) * g1[i] * g1[i];
    const double m2 = b1 * m1 + (1 - b1) * g2[i], v2 = b2 * v1 + (1 - b2) * g2[i] * g2[i];
    const double mh = m2 / (1 - b1 * b1), vh = v2 / (1 - b2 * b2);
    const double start = i == 0 ? 0.5 - lr * 0.3 / (0.3 + eps) : -1.0 + lr * 2.0 / (2.0 + eps);
    const double expected = start - lr * mh / (std::sqrt(vh) + eps);
    Adam replay(2, lr, b1, b2, eps);
    std::vector<double> r{0.5, -1.0};
    replay.step(r, g1);
    replay.step(r, g2);
    CHECK(std::abs(r[i] - expected) <= 1e-12);
  }
  CHECK_THROWS_AS(adam.step(p, std::vector<double>{1.0}), Error);
}

TEST_CASE("initialization") {
  const Fixture& f = fixture();
  EmbedConfig c = f.config(1);

  SUBCASE("mean init broadcasts the mean latent") {
    const ExtendedLatent x = init_latent(f.gen, c);
    const StyleVector mean = resolve_mean(f.gen, c);
    CHECK(x == broadcast(mean, f.gen.num_layers()));
    CHECK(mean == mean_latent(f.gen, c.mean_samples, c.mean_seed));
    c.mean_anchor = StyleVector{std::vector<double>(f.gen.style_dim(), 0.25)};
    CHECK(init_latent(f.gen, c) == broadcast(*c.mean_anchor, f.gen.num_layers()));
  }

  SUBCASE("random init is uniform on [-1, 1]") {
    GeneratorConfig gc;
    gc.resolution = 64;
    gc.style_dim = 128;
    gc.base_channels = 2;
    gc.channel_cap = 4;
    const Generator wide = Generator::build_toy(gc);
    c.init = InitStrategy::RandomUniform;
    c.seed = 12;
    const ExtendedLatent x = init_latent(wide, c);
    REQUIRE(x.size() >= 1000);
    double sum = 0.0;
    for (double v : x.values()) {
      CHECK(v >= -1.0);
      CHECK(v <= 1.0);
      sum += v;
    }
    const double sigma = std::sqrt(1.0 / 3.0 / static_cast<double>(x.size()));
    CHECK(std::abs(sum / static_cast<double>(x.size())) < 3.0 * sigma);
    CHECK(init_latent(wide, c) == x);
    c.seed = 13;
    CHECK(init_latent(wide, c) != x);
  }

  SUBCASE("provided init") {
    c.init = InitStrategy::Provided;
    c.provided = f.truth;
    CHECK(init_latent(f.gen, c) == f.truth);
    c.provided = ExtendedLatent(f.gen.num_layers() + 1, f.gen.style_dim());
    try {
      init_latent(f.gen, c);
      FAIL("expected a shape error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ShapeMismatch);
    }
  }

  SUBCASE("W and Z spaces") {
    c.space = LatentSpace::W;
    const ExtendedLatent w = init_latent(f.gen, c);
    CHECK(w == broadcast(resolve_mean(f.gen, c), f.gen.num_layers()));
    c.space = LatentSpace::Z;
    const ExtendedLatent z = init_latent(f.gen, c);
    CHECK(z == broadcast(f.gen.map(LatentZ{std::vector<double>(f.gen.style_dim(), 0.0)}), f.gen.num_layers()));
    c.init = InitStrategy::Provided;
    c.provided = f.truth;
    CHECK_THROWS_AS(init_latent(f.gen, c), Error);
  }
}

TEST_CASE("pipeline gradient matches central differences at the initial point") {
  const Fixture& f = fixture();
  const PipelineObjective obj(f.gen, f.fx, f.target, testing::native_loss(f.gen.resolution()));
  const ExtendedLatent start = init_latent(f.gen, f.config(1));
  ExtendedLatent grad;
  obj.evaluate(start, &grad);
  const auto loss = [&](const std::vector<double>& v) {
    return obj.evaluate(ExtendedLatent(start.layers(), start.dim(), v), nullptr).total;
  };
  Rng pick(71);
  for (int k = 0; k < 10; ++k) {
    const std::size_t i = pick.next() % start.size();
    const double fd = testing::central_difference(loss, start.values(), i, 1e-3);
    CHECK(testing::relative_error(grad.values()[i], fd) <= 1e-3);
  }
}

TEST_CASE("embedding runs") {
  const Fixture& f = fixture();

  SUBCASE("perfect start stays put") {
    EmbedConfig c = f.config(5);
    c.init = InitStrategy::Provided;
    c.provided = f.truth;
    const EmbedResult r = embed(f.gen, f.fx, f.target, c);
    CHECK(r.trace.samples.front().total <= 1e-10);
    CHECK(r.best_step == 0);
    CHECK(r.latent == f.truth);
  }

  SUBCASE("trace schedule, best-so-far and result consistency") {
    EmbedConfig c = f.config(25);
    const EmbedResult r = embed(f.gen, f.fx, f.target, c);
    std::vector<std::size_t> steps;
    for (const auto& s : r.trace.samples) steps.push_back(s.step);
    CHECK(steps == std::vector<std::size_t>{0, 10, 20, 25});
    const auto best = r.trace.best_so_far();
    for (std::size_t i = 1; i < best.size(); ++i) CHECK(best[i] <= best[i - 1]);
    CHECK(r.loss.total == best.back());
    CHECK(r.loss.total <= r.trace.samples.front().total);
    const PipelineObjective obj(f.gen, f.fx, f.target, c.loss);
    CHECK(obj.evaluate(r.latent, nullptr).total == r.loss.total);
    CHECK(r.dist_to_mean == doctest::Approx(distance_to_mean(r.latent, resolve_mean(f.gen, c))));
    CHECK(r.dist_to_mean >= 0.0);
  }

  SUBCASE("loss decreases on an on-manifold target") {
    const EmbedResult r = embed(f.gen, f.fx, f.target, f.config(150));
    CHECK(r.loss.total < 0.5 * r.trace.samples.front().total);
  }

  SUBCASE("deterministic") {
    EmbedConfig c = f.config(20);
    c.init = InitStrategy::RandomUniform;
    c.seed = 5;
    const EmbedResult a = embed(f.gen, f.fx, f.target, c);
    const EmbedResult b = embed(f.gen, f.fx, f.target, c);
    CHECK(a.latent == b.latent);
    CHECK(a.trace.samples == b.trace.samples);
    CHECK(a.best_step == b.best_step);
  }

  SUBCASE("W constraint keeps rows equal and is a valid W+ point") {
    const EmbedResult r = embed_into_w(f.gen, f.fx, f.target, f.config(20));
    for (std::size_t i = 1; i < r.latent.layers(); ++i)
      for (std::size_t k = 0; k < r.latent.dim(); ++k) CHECK(r.latent.row(i)[k] == r.latent.row(0)[k]);
    const PipelineObjective obj(f.gen, f.fx, f.target, f.config(1).loss);
    CHECK(obj.evaluate(r.latent, nullptr).total == r.loss.total);
  }

  SUBCASE("Z space optimizes through the mapping network") {
    EmbedConfig c = f.config(40);
    c.space = LatentSpace::Z;
    const EmbedResult r = embed(f.gen, f.fx, f.target, c);
    CHECK(r.loss.total < r.trace.samples.front().total);
    for (std::size_t i = 1; i < r.latent.layers(); ++i) CHECK(r.latent.row(i)[0] == r.latent.row(0)[0]);
  }

  SUBCASE("resolution mismatch") {
    try {
      embed(f.gen, f.fx, ImageBuffer(32, 0.5), f.config(1));
      FAIL("expected a shape error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ShapeMismatch);
    }
  }

  SUBCASE("non-finite loss aborts with the step") {
    ImageBuffer bad = f.target;
    bad.pixels()[7] = std::numeric_limits<double>::quiet_NaN();
    try {
      embed(f.gen, f.fx, bad, f.config(3));
      FAIL("expected a numeric error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Numeric);
      CHECK(std::string(e.what()).find("step 0") != std::string::npos);
    }
  }
}

TEST_CASE("iterative embedding") {
  const Fixture& f = fixture();
  EmbedConfig c = f.config(15);
  c.mean_anchor = resolve_mean(f.gen, c);

  SUBCASE("one round equals embed") {
    const auto rounds = iterative_embed(f.gen, f.fx, f.target, c, 1);
    REQUIRE(rounds.size() == 1);
    CHECK(rounds[0].latent == embed(f.gen, f.fx, f.target, c).latent);
  }

  SUBCASE("each round targets the previous reconstruction") {
    const auto rounds = iterative_embed(f.gen, f.fx, f.target, c, 3);
    REQUIRE(rounds.size() == 3);
    for (const auto& r : rounds) {
      CHECK(std::isfinite(r.trace.samples.front().total));
      CHECK(r.loss.total <= r.trace.samples.front().total);
    }
    const ImageBuffer round1 = f.gen.synthesize(rounds[0].latent);
    CHECK(rounds[1].latent == embed(f.gen, f.fx, round1, c).latent);
  }

  SUBCASE("zero rounds is an error") { CHECK_THROWS_AS(iterative_embed(f.gen, f.fx, f.target, c, 0), Error); }
}

TEST_CASE("trace CSV") {
  LossTrace t;
  t.samples = {{0, 1.0 / 3.0, 0.25, 0.1, 2.5}, {10, 0.5, 0.2, 0.05, 2.4}, {20, 0.125, 0.1, 0.01, 2.3}};
  std::stringstream s;
  t.write_csv(s);
  const std::string text = s.str();
  CHECK(text.rfind("step,total,percept,mse,dist_to_mean,best_so_far\n", 0) == 0);
  // best_so_far column: 1/3, 1/3, 0.125.
  CHECK(text.find("10,0.5,0.20000000000000001,0.050000000000000003,2.3999999999999999,0.33333333333333331") !=
        std::string::npos);
  std::stringstream in(text);
  CHECK(LossTrace::read_csv(in).samples == t.samples);

  std::stringstream bad("step,total\n1,2\n");
  CHECK_THROWS_AS(LossTrace::read_csv(bad), Error);
  std::stringstream malformed("step,total,percept,mse,dist_to_mean,best_so_far\n1;2;3\n");
  CHECK_THROWS_AS(LossTrace::read_csv(malformed), Error);
}
