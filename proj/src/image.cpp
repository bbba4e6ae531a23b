#include "wplus/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wplus/error.hpp"

namespace wplus {

ImageBuffer::ImageBuffer(std::size_t side, std::vector<double> pixels)
    : side_(side), pixels_(std::move(pixels)) {
  require(pixels_.size() == side * side * 3, ErrorKind::ShapeMismatch,
          "image: expected " + std::to_string(side * side * 3) + " scalars, got " +
              std::to_string(pixels_.size()));
}

double ImageBuffer::mean() const {
  if (pixels_.empty()) return 0.0;
  double acc = 0.0;
  for (double v : pixels_) acc += v;
  return acc / static_cast<double>(pixels_.size());
}

Tensor to_tensor(const ImageBuffer& image) {
  const std::size_t n = image.side();
  Tensor t(3, n, n);
  const auto& px = image.pixels();
  for (std::size_t i = 0; i < n * n; ++i)
    for (std::size_t c = 0; c < 3; ++c) t.data[c * n * n + i] = px[i * 3 + c];
  return t;
}

ImageBuffer from_tensor(const Tensor& tensor) {
  require(tensor.channels == 3 && tensor.height == tensor.width, ErrorKind::ShapeMismatch,
          "image tensor must be 3×n×n");
  const std::size_t n = tensor.height;
  ImageBuffer image(n);
  auto& px = image.pixels();
  for (std::size_t i = 0; i < n * n; ++i)
    for (std::size_t c = 0; c < 3; ++c) px[i * 3 + c] = tensor.data[c * n * n + i];
  return image;
}

namespace {

struct Tap {
  std::size_t index;
  double weight;
};

// Per-output-index filter taps along one axis.
std::vector<std::vector<Tap>> axis_filter(std::size_t in, std::size_t out) {
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  const double support = std::max(1.0, scale);
  std::vector<std::vector<Tap>> taps(out);
  for (std::size_t i = 0; i < out; ++i) {
    const double center = (static_cast<double>(i) + 0.5) * scale;
    const auto lo = static_cast<long>(std::floor(center - support));
    const auto hi = static_cast<long>(std::ceil(center + support));
    double total = 0.0;
    for (long j = std::max(0L, lo); j < std::min(static_cast<long>(in), hi + 1); ++j) {
      const double d = std::abs((static_cast<double>(j) + 0.5 - center) / support);
      if (d < 1.0) {
        taps[i].push_back({static_cast<std::size_t>(j), 1.0 - d});
        total += 1.0 - d;
      }
    }
    for (auto& t : taps[i]) t.weight /= total;
  }
  return taps;
}

}  // namespace

ImageBuffer resize(const ImageBuffer& image, std::size_t side) {
  require(side >= 1, ErrorKind::InvalidArgument, "resize: side must be positive");
  const std::size_t n = image.side();
  if (side == n) return image;
  const auto taps = axis_filter(n, side);
  // Rows first (n×side), then columns (side×side).
  std::vector<double> horiz(n * side * 3, 0.0);
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < side; ++x)
      for (const Tap& t : taps[x])
        for (std::size_t c = 0; c < 3; ++c)
          horiz[(y * side + x) * 3 + c] += t.weight * image.at(y, t.index, c);
  ImageBuffer out(side);
  for (std::size_t y = 0; y < side; ++y)
    for (const Tap& t : taps[y])
      for (std::size_t x = 0; x < side; ++x)
        for (std::size_t c = 0; c < 3; ++c)
          out.at(y, x, c) += t.weight * horiz[(t.index * side + x) * 3 + c];
  return out;
}

ImageBuffer resize_backward(const ImageBuffer& grad_output, std::size_t input_side) {
  const std::size_t side = grad_output.side();
  const std::size_t n = input_side;
  if (side == n) return grad_output;
  const auto taps = axis_filter(n, side);
  std::vector<double> horiz(n * side * 3, 0.0);
  for (std::size_t y = 0; y < side; ++y)
    for (const Tap& t : taps[y])
      for (std::size_t x = 0; x < side; ++x)
        for (std::size_t c = 0; c < 3; ++c)
          horiz[(t.index * side + x) * 3 + c] += t.weight * grad_output.at(y, x, c);
  ImageBuffer grad(n);
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < side; ++x)
      for (const Tap& t : taps[x])
        for (std::size_t c = 0; c < 3; ++c)
          grad.at(y, t.index, c) += t.weight * horiz[(y * side + x) * 3 + c];
  return grad;
}

double squared_distance(const ImageBuffer& a, const ImageBuffer& b) {
  require(a.side() == b.side(), ErrorKind::ShapeMismatch, "image sizes differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.pixels()[i] - b.pixels()[i];
    acc += d * d;
  }
  return acc;
}

double rmse(const ImageBuffer& a, const ImageBuffer& b) {
  return std::sqrt(squared_distance(a, b) / static_cast<double>(a.size()));
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace wplus
