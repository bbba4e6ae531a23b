#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wplus {

/// Dense channel-major feature map (C×H×W), double precision.
struct Tensor {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::size_t c, std::size_t h, std::size_t w, double fill = 0.0)
      : channels(c), height(h), width(w), data(c * h * w, fill) {}

  std::size_t plane_size() const { return height * width; }
  std::size_t size() const { return data.size(); }

  double* plane(std::size_t c) { return data.data() + c * plane_size(); }
  const double* plane(std::size_t c) const { return data.data() + c * plane_size(); }

  bool same_shape(const Tensor& other) const {
    return channels == other.channels && height == other.height && width == other.width;
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

// Primitive differentiable operations. Weight layouts:
//   conv3x3: [out][in][3][3], zero padding, stride 1
//   conv1x1: [out][in]
// Backward functions return the gradient with respect to the input only;
// weights are never trained here.

Tensor conv3x3(const Tensor& input, std::span<const double> weight,
               std::span<const double> bias, std::size_t out_channels);
Tensor conv3x3_backward(const Tensor& grad_output, std::span<const double> weight,
                        std::size_t in_channels);

Tensor conv1x1(const Tensor& input, std::span<const double> weight,
               std::span<const double> bias, std::size_t out_channels);
Tensor conv1x1_backward(const Tensor& grad_output, std::span<const double> weight,
                        std::size_t in_channels);

Tensor upsample_nearest2x(const Tensor& input);
Tensor upsample_nearest2x_backward(const Tensor& grad_output);

Tensor avgpool2x2(const Tensor& input);
Tensor avgpool2x2_backward(const Tensor& grad_output);

/// Smoothed leaky rectifier
///   f(x) = slope·x + (1 − slope)·(x + sqrt(x² + δ²))/2
/// It tends to the leaky ReLU as δ → 0; slope 0 gives a smooth ReLU.
/// When `derivative` is non-null it receives f'(x) elementwise.
void smooth_leaky_relu_inplace(Tensor& t, double slope, double delta, Tensor* derivative);
double smooth_leaky_relu(double x, double slope, double delta);

/// dense: out = W·x + b, W row-major [out][in].
std::vector<double> dense(std::span<const double> x, std::span<const double> weight,
                          std::span<const double> bias, std::size_t out);
std::vector<double> dense_backward(std::span<const double> grad_out,
                                   std::span<const double> weight, std::size_t in);

}  // namespace wplus
