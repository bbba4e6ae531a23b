#include <cmath>
#include <numeric>

#include "doctest.h"
#include "support.hpp"
#include "wplus/error.hpp"
#include "wplus/rng.hpp"
#include "wplus/tensor.hpp"

using namespace wplus;

namespace {

Tensor random_tensor(std::size_t c, std::size_t h, std::size_t w, std::uint64_t seed) {
  Tensor t(c, h, w);
  t.data = testing::gaussian_vector(t.size(), seed);
  return t;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Direct zero-padded 3×3 convolution, one output at a time.
Tensor naive_conv3x3(const Tensor& x, const std::vector<double>& w, const std::vector<double>& b, std::size_t out) {
  Tensor y(out, x.height, x.width);
  const long H = static_cast<long>(x.height), W = static_cast<long>(x.width);
  for (std::size_t o = 0; o < out; ++o)
    for (long i = 0; i < H; ++i)
      for (long j = 0; j < W; ++j) {
        double acc = b[o];
        for (std::size_t c = 0; c < x.channels; ++c)
          for (long di = -1; di <= 1; ++di)
            for (long dj = -1; dj <= 1; ++dj) {
              const long ii = i + di, jj = j + dj;
              if (ii < 0 || jj < 0 || ii >= H || jj >= W) continue;
              acc += w[((o * x.channels + c) * 3 + static_cast<std::size_t>(di + 1)) * 3 +
                       static_cast<std::size_t>(dj + 1)] *
                     x.plane(c)[ii * W + jj];
            }
        y.plane(o)[i * W + j] = acc;
      }
  return y;
}

}  // namespace

TEST_CASE("conv3x3 matches the direct definition") {
  for (auto [cin, cout, side] : {std::tuple{1ul, 1ul, 1ul}, {2ul, 3ul, 5ul}, {3ul, 2ul, 8ul}}) {
    const Tensor x = random_tensor(cin, side, side, 1 + cin);
    const auto w = testing::gaussian_vector(cout * cin * 9, 7 + cout);
    const auto b = testing::gaussian_vector(cout, 11);
    const Tensor fast = conv3x3(x, w, b, cout);
    const Tensor slow = naive_conv3x3(x, w, b, cout);
    REQUIRE(fast.same_shape(slow));
    for (std::size_t i = 0; i < fast.size(); ++i) CHECK(fast.data[i] == doctest::Approx(slow.data[i]).epsilon(1e-12));
  }
}

TEST_CASE("backward passes are adjoints of their forward maps") {
  // <A x, g> = <x, Aᵀ g> for every linear primitive (biases zero).
  const Tensor x = random_tensor(3, 6, 6, 21);

  SUBCASE("conv3x3") {
    const auto w = testing::gaussian_vector(4 * 3 * 9, 22);
    const std::vector<double> zero(4, 0.0);
    const Tensor g = random_tensor(4, 6, 6, 23);
    CHECK(dot(conv3x3(x, w, zero, 4).data, g.data) ==
          doctest::Approx(dot(x.data, conv3x3_backward(g, w, 3).data)).epsilon(1e-12));
  }
  SUBCASE("conv1x1") {
    const auto w = testing::gaussian_vector(5 * 3, 24);
    const std::vector<double> zero(5, 0.0);
    const Tensor g = random_tensor(5, 6, 6, 25);
    CHECK(dot(conv1x1(x, w, zero, 5).data, g.data) ==
          doctest::Approx(dot(x.data, conv1x1_backward(g, w, 3).data)).epsilon(1e-12));
  }
  SUBCASE("nearest upsample") {
    const Tensor g = random_tensor(3, 12, 12, 26);
    CHECK(dot(upsample_nearest2x(x).data, g.data) ==
          doctest::Approx(dot(x.data, upsample_nearest2x_backward(g).data)).epsilon(1e-12));
  }
  SUBCASE("average pool") {
    const Tensor g = random_tensor(3, 3, 3, 27);
    CHECK(dot(avgpool2x2(x).data, g.data) ==
          doctest::Approx(dot(x.data, avgpool2x2_backward(g).data)).epsilon(1e-12));
  }
  SUBCASE("dense") {
    const auto v = testing::gaussian_vector(7, 28);
    const auto w = testing::gaussian_vector(4 * 7, 29);
    const std::vector<double> zero(4, 0.0);
    const auto g = testing::gaussian_vector(4, 30);
    CHECK(dot(dense(v, w, zero, 4), g) == doctest::Approx(dot(v, dense_backward(g, w, 7))).epsilon(1e-12));
  }
}

TEST_CASE("pooling and upsampling preserve the mean") {
  const Tensor x = random_tensor(2, 8, 8, 31);
  const auto mean = [](const Tensor& t) { return std::accumulate(t.data.begin(), t.data.end(), 0.0) / t.size(); };
  CHECK(mean(avgpool2x2(x)) == doctest::Approx(mean(x)).epsilon(1e-12));
  CHECK(mean(upsample_nearest2x(x)) == doctest::Approx(mean(x)).epsilon(1e-12));
}

TEST_CASE("smooth leaky rectifier") {
  const double s = 0.2, d = 0.125;
  SUBCASE("closed-form values") {
    CHECK(smooth_leaky_relu(0.0, s, d) == doctest::Approx((1 - s) * d / 2));
    // Far from the origin the rectifier approaches x and s·x.
    CHECK(smooth_leaky_relu(100.0, s, d) == doctest::Approx(100.0).epsilon(1e-6));
    CHECK(smooth_leaky_relu(-100.0, s, d) == doctest::Approx(-20.0).epsilon(1e-5));
    // Exact residual of the negative branch: (1−s)/2 · δ²/(|x| + √(x²+δ²)).
    const double residual = (1 - s) / 2 * d * d / (100.0 + std::sqrt(1e4 + d * d));
    CHECK(smooth_leaky_relu(-100.0, s, d) == doctest::Approx(-20.0 + residual).epsilon(1e-12));
  }
  SUBCASE("tends to the leaky ReLU as delta shrinks") {
    for (double x : {-2.0, -0.3, 0.4, 3.0})
      CHECK(smooth_leaky_relu(x, s, 1e-9) == doctest::Approx(x > 0 ? x : s * x).epsilon(1e-9));
  }
  SUBCASE("derivative output matches central differences") {
    Tensor t = random_tensor(1, 4, 4, 32);
    const Tensor x = t;
    Tensor deriv;
    smooth_leaky_relu_inplace(t, s, d, &deriv);
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(t.data[i] == doctest::Approx(smooth_leaky_relu(x.data[i], s, d)));
      const double h = 1e-5;
      const double fd = (smooth_leaky_relu(x.data[i] + h, s, d) - smooth_leaky_relu(x.data[i] - h, s, d)) / (2 * h);
      CHECK(deriv.data[i] == doctest::Approx(fd).epsilon(1e-7));
    }
  }
  SUBCASE("monotone with slope between s and 1") {
    Tensor t(1, 1, 201);
    for (std::size_t i = 0; i < t.size(); ++i) t.data[i] = -5.0 + 0.05 * static_cast<double>(i);
    Tensor deriv;
    smooth_leaky_relu_inplace(t, s, d, &deriv);
    for (double g : deriv.data) {
      CHECK(g >= s);
      CHECK(g <= 1.0);
    }
  }
}

TEST_CASE("rng streams") {
  SUBCASE("same seed, same stream") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.gaussian() == b.gaussian());
  }
  SUBCASE("derived seeds differ per tag and per base") {
    CHECK(derive_seed(1, 1) != derive_seed(1, 2));
    CHECK(derive_seed(1, 1) != derive_seed(2, 1));
    CHECK(derive_seed(1, 1) == derive_seed(1, 1));
  }
  SUBCASE("uniform stays in range") {
    Rng r(3);
    for (int i = 0; i < 10000; ++i) {
      const double u = r.uniform(-1.0, 1.0);
      CHECK(u >= -1.0);
      CHECK(u < 1.0);
    }
  }
  SUBCASE("gaussian moments within five standard errors") {
    Rng r(4);
    const int n = 200000;
    double sum = 0, sum2 = 0;
    for (int i = 0; i < n; ++i) {
      const double g = r.gaussian();
      sum += g;
      sum2 += g * g;
    }
    const double mean = sum / n, var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 5.0 / std::sqrt(n));
    CHECK(std::abs(var - 1.0) < 5.0 * std::sqrt(2.0 / n));
  }
}
