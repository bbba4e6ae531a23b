#include <cmath>
#include <sstream>

#include "doctest.h"
#include "support.hpp"
#include "wplus/error.hpp"
#include "wplus/latentops.hpp"

using namespace wplus;

namespace {

double frobenius(const ExtendedLatent& x) {
  double acc = 0.0;
  for (double v : x.values()) acc += v * v;
  return std::sqrt(acc);
}

ExtendedLatent fixture4(const std::vector<double>& values) { return ExtendedLatent(4, 2, values); }

}  // namespace

TEST_CASE("interpolation") {
  const ExtendedLatent a = testing::random_latent(6, 5, 1), b = testing::random_latent(6, 5, 2);
  CHECK(interpolate(a, b, 1.0) == a);
  CHECK(interpolate(a, b, 0.0) == b);
  const ExtendedLatent mid = interpolate(ExtendedLatent(3, 2, 0.0), ExtendedLatent(3, 2, 2.0), 0.5);
  for (double v : mid.values()) CHECK(v == 1.0);
  for (double lambda : {0.1, 0.37, 0.5, 0.9}) {
    const ExtendedLatent x = interpolate(a, b, lambda), y = interpolate(b, a, 1.0 - lambda);
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(std::abs(x.values()[i] - y.values()[i]) <= 1e-9);
      const double lo = std::min(a.values()[i], b.values()[i]), hi = std::max(a.values()[i], b.values()[i]);
      CHECK(x.values()[i] >= lo - 1e-12);
      CHECK(x.values()[i] <= hi + 1e-12);
    }
  }
  CHECK_THROWS_AS(interpolate(a, b, 1.5), Error);
  CHECK_THROWS_AS(interpolate(a, b, -0.1), Error);
  CHECK_THROWS_AS(interpolate(a, ExtendedLatent(5, 5), 0.5), Error);
}

TEST_CASE("morph sequence") {
  const Generator g = Generator::build_toy(testing::small_generator_config());
  const ExtendedLatent a = testing::mapped_latent(g, 3), b = testing::mapped_latent(g, 4);

  SUBCASE("two frames are the endpoints, b first") {
    const auto frames = morph_sequence(g, a, b, 2);
    REQUIRE(frames.size() == 2);
    CHECK(frames[0] == g.synthesize(b));
    CHECK(frames[1] == g.synthesize(a));
  }
  SUBCASE("identical endpoints give identical frames") {
    for (const auto& f : morph_sequence(g, a, a, 5)) CHECK(f == g.synthesize(a));
  }
  SUBCASE("adjacent-frame distance shrinks with the frame count") {
    const auto max_step = [&](std::size_t n) {
      const auto frames = morph_sequence(g, a, b, n);
      double worst = 0.0;
      for (std::size_t k = 1; k < frames.size(); ++k)
        worst = std::max(worst, std::sqrt(squared_distance(frames[k], frames[k - 1])));
      return worst;
    };
    const double d16 = max_step(16), d32 = max_step(32);
    CHECK(d32 > 0.0);
    CHECK(d16 / d32 <= 2.5);
  }
  SUBCASE("fewer than two frames") { CHECK_THROWS_AS(morph_sequence(g, a, b, 1), Error); }
}

TEST_CASE("crossover") {
  const ExtendedLatent c = testing::random_latent(18, 4, 5), s = testing::random_latent(18, 4, 6);
  CHECK(default_split(18) == 9);
  CHECK(default_split(10) == 5);
  CHECK(default_split(7) == 4);
  CHECK(crossover(c, s, 18) == c);
  CHECK(crossover(c, s, 0) == s);
  CHECK(crossover(c, c, 7) == c);
  const ExtendedLatent x = crossover(c, s, default_split(18));
  for (std::size_t i = 0; i < 18; ++i) {
    const ExtendedLatent& src = i < 9 ? c : s;
    for (std::size_t k = 0; k < 4; ++k) CHECK(x.row(i)[k] == src.row(i)[k]);
  }
  CHECK_THROWS_AS(crossover(c, s, 19), Error);
  CHECK_THROWS_AS(crossover(c, ExtendedLatent(18, 5), 9), Error);
}

TEST_CASE("expression direction") {
  const ExtendedLatent neutral(4, 2, 0.0);
  // Row norms 0.5, 2.0, 0.9, 3.0.
  const ExtendedLatent expressive = fixture4({0.3, 0.4, 1.2, 1.6, 0.0, 0.9, 1.8, 2.4});

  SUBCASE("hand-computed four-row fixture") {
    const ExpressionDirection d = expression_direction(neutral, expressive, 1.0, true);
    const double n = std::sqrt(13.0);
    const std::vector<double> expected{0.0, 0.0, 1.2 / n, 1.6 / n, 0.0, 0.0, 1.8 / n, 2.4 / n};
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(std::abs(d.rows.values()[i] - expected[i]) <= 1e-9);
    CHECK(d.rows.row(0)[0] == 0.0);
    CHECK(d.rows.row(0)[1] == 0.0);
    CHECK(d.rows.row(2)[1] == 0.0);
    CHECK(std::abs(frobenius(d.rows) - 1.0) <= 1e-9);
    CHECK(d.threshold_used == 1.0);
    CHECK(d.normalized);
  }
  SUBCASE("without normalization the surviving rows are the raw difference") {
    const ExpressionDirection d = expression_direction(neutral, expressive, 1.0, false);
    CHECK(d.rows == fixture4({0, 0, 1.2, 1.6, 0, 0, 1.8, 2.4}));
  }
  SUBCASE("threshold zero keeps the difference") {
    CHECK(expression_direction(neutral, expressive, 0.0, false).rows == expressive);
  }
  SUBCASE("antisymmetric in the pair") {
    const ExpressionDirection fwd = expression_direction(neutral, expressive, 1.0, true);
    const ExpressionDirection back = expression_direction(expressive, neutral, 1.0, true);
    for (std::size_t i = 0; i < fwd.rows.size(); ++i) CHECK(fwd.rows.values()[i] == -back.rows.values()[i]);
  }
  SUBCASE("everything thresholded away is degenerate when normalizing") {
    try {
      expression_direction(neutral, expressive, 10.0, true);
      FAIL("expected a numeric error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Numeric);
    }
    CHECK(expression_direction(neutral, expressive, 10.0, false).rows == neutral);
  }
  SUBCASE("invalid arguments") {
    CHECK_THROWS_AS(expression_direction(neutral, expressive, -1.0, true), Error);
    CHECK_THROWS_AS(expression_direction(neutral, ExtendedLatent(3, 2), 1.0, true), Error);
  }
}

TEST_CASE("applying an expression") {
  const ExtendedLatent target = testing::random_latent(5, 3, 7);
  const ExpressionDirection d{testing::random_latent(5, 3, 8), 1.0, false};
  CHECK(apply_expression(target, d, 0.0) == target);
  const ExtendedLatent twice = apply_expression(apply_expression(target, d, 0.75), d, -0.25);
  const ExtendedLatent once = apply_expression(target, d, 0.5);
  for (std::size_t i = 0; i < once.size(); ++i) CHECK(std::abs(twice.values()[i] - once.values()[i]) <= 1e-9);
  const ExtendedLatent plus = apply_expression(target, d, 1.3), minus = apply_expression(target, d, -1.3);
  const ExtendedLatent midpoint = interpolate(plus, minus, 0.5);
  for (std::size_t i = 0; i < target.size(); ++i)
    CHECK(std::abs(midpoint.values()[i] - target.values()[i]) <= 1e-9);
  CHECK_THROWS_AS(apply_expression(target, ExpressionDirection{ExtendedLatent(4, 3), 1.0, false}, 1.0), Error);
}

TEST_CASE("latent distance is a metric") {
  CHECK(latent_distance(ExtendedLatent(2, 2, {0, 0, 0, 0}), ExtendedLatent(2, 2, {3, 4, 0, 0})) == 5.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ExtendedLatent a = testing::random_latent(4, 4, 3 * seed), b = testing::random_latent(4, 4, 3 * seed + 1),
                         c = testing::random_latent(4, 4, 3 * seed + 2);
    CHECK(latent_distance(a, a) == 0.0);
    CHECK(latent_distance(a, b) == latent_distance(b, a));
    CHECK(latent_distance(a, c) <= latent_distance(a, b) + latent_distance(b, c) + 1e-12);
  }
  CHECK_THROWS_AS(latent_distance(ExtendedLatent(2, 2), ExtendedLatent(2, 3)), Error);
}

TEST_CASE("pairwise distances") {
  const std::vector<ExtendedLatent> ls{ExtendedLatent(2, 2, {0, 0, 0, 0}), ExtendedLatent(2, 2, {3, 4, 0, 0}),
                                       ExtendedLatent(2, 2, {0, 0, 1, 0})};
  const DistanceMatrix m = pairwise_distances(ls, {"a", "b", "c"});
  const double expected[3][3] = {{0, 5, 1}, {5, 0, std::sqrt(26.0)}, {1, std::sqrt(26.0), 0}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(m.values[i][j] == doctest::Approx(expected[i][j]).epsilon(1e-15));

  std::stringstream s;
  m.write_csv(s);
  std::string line;
  std::getline(s, line);
  CHECK(line == "label,a,b,c");
  std::getline(s, line);
  CHECK(line == "a,0,5,1");

  CHECK_THROWS_AS(pairwise_distances({ls[0]}, {"a"}), Error);
  CHECK_THROWS_AS(pairwise_distances(ls, {"a", "b"}), Error);
  CHECK_THROWS_AS(pairwise_distances({ls[0], ExtendedLatent(3, 2)}, {"a", "b"}), Error);
}
