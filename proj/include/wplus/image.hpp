#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "wplus/tensor.hpp"

namespace wplus {

/// Square RGB image, row-major interleaved (H×W×3). Values are nominally in
/// [0,1]; they are clamped only when exported.
class ImageBuffer {
 public:
  ImageBuffer() = default;
  explicit ImageBuffer(std::size_t side, double fill = 0.0)
      : side_(side), pixels_(side * side * 3, fill) {}
  ImageBuffer(std::size_t side, std::vector<double> pixels);

  std::size_t side() const { return side_; }
  /// Number of scalars, n·n·3.
  std::size_t size() const { return pixels_.size(); }

  double& at(std::size_t y, std::size_t x, std::size_t c) { return pixels_[(y * side_ + x) * 3 + c]; }
  double at(std::size_t y, std::size_t x, std::size_t c) const {
    return pixels_[(y * side_ + x) * 3 + c];
  }

  std::vector<double>& pixels() { return pixels_; }
  const std::vector<double>& pixels() const { return pixels_; }

  double mean() const;

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  std::size_t side_ = 0;
  std::vector<double> pixels_;
};

/// Interleaved HWC image to planar 3×H×W tensor, and back.
Tensor to_tensor(const ImageBuffer& image);
ImageBuffer from_tensor(const Tensor& tensor);

/// Bilinear resampling with a triangle filter widened by the scale factor on
/// downscale (antialiased). Resizing to the same side is the identity.
ImageBuffer resize(const ImageBuffer& image, std::size_t side);

/// Adjoint of resize: maps a gradient at the resized side back to `input_side`.
ImageBuffer resize_backward(const ImageBuffer& grad_output, std::size_t input_side);

/// Sum of squared differences over all scalars.
double squared_distance(const ImageBuffer& a, const ImageBuffer& b);

/// Root-mean-square pixel difference.
double rmse(const ImageBuffer& a, const ImageBuffer& b);

bool is_power_of_two(std::size_t n);

// PNG export quantizes round(clamp(x,0,1)·255) to 8-bit RGB.
void write_png(const ImageBuffer& image, const std::filesystem::path& path);
/// Reads any PNG as RGB in [0,1]; non-square images are rejected.
ImageBuffer read_png(const std::filesystem::path& path);

}  // namespace wplus
