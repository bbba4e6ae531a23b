#include "wplus/tensor.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace wplus {

namespace {

// dst[y][x] += Σ_{kx} k[kx] · src[y+dy][x+kx−1] over one 3-tap row of the
// kernel, zero padded; rows with y+dy outside the plane contribute nothing.
inline void accumulate_row3(double* dst, const double* src, std::size_t h, std::size_t w, int dy,
                            const double* k) {
  const std::size_t y0 = dy < 0 ? 1 : 0;
  const std::size_t y1 = dy > 0 ? h - 1 : h;
  const double k0 = k[0], k1 = k[1], k2 = k[2];
  for (std::size_t y = y0; y < y1; ++y) {
    double* d = dst + y * w;
    const double* s = src + (y + dy) * w;
    if (w == 1) {
      d[0] += k1 * s[0];
      continue;
    }
    d[0] += k1 * s[0] + k2 * s[1];
    for (std::size_t x = 1; x + 1 < w; ++x) d[x] += k0 * s[x - 1] + k1 * s[x] + k2 * s[x + 1];
    d[w - 1] += k0 * s[w - 2] + k1 * s[w - 1];
  }
}

}  // namespace

Tensor conv3x3(const Tensor& input, std::span<const double> weight,
               std::span<const double> bias, std::size_t out_channels) {
  const std::size_t cin = input.channels;
  assert(weight.size() == out_channels * cin * 9);
  Tensor out(out_channels, input.height, input.width);
  for (std::size_t co = 0; co < out_channels; ++co) {
    double* dst = out.plane(co);
    std::fill(dst, dst + out.plane_size(), bias.empty() ? 0.0 : bias[co]);
    for (std::size_t ci = 0; ci < cin; ++ci) {
      const double* k = weight.data() + (co * cin + ci) * 9;
      const double* src = input.plane(ci);
      for (int ky = 0; ky < 3; ++ky) accumulate_row3(dst, src, input.height, input.width, ky - 1, k + 3 * ky);
    }
  }
  return out;
}

Tensor conv3x3_backward(const Tensor& grad_output, std::span<const double> weight,
                        std::size_t in_channels) {
  const std::size_t cout = grad_output.channels;
  assert(weight.size() == cout * in_channels * 9);
  Tensor grad_in(in_channels, grad_output.height, grad_output.width);
  for (std::size_t ci = 0; ci < in_channels; ++ci) {
    double* dst = grad_in.plane(ci);
    for (std::size_t co = 0; co < cout; ++co) {
      const double* k = weight.data() + (co * in_channels + ci) * 9;
      const double* src = grad_output.plane(co);
      // The adjoint of a 3×3 correlation is the correlation with the kernel
      // flipped in both axes.
      for (int ky = 0; ky < 3; ++ky) {
        const double flipped[3] = {k[3 * (2 - ky) + 2], k[3 * (2 - ky) + 1], k[3 * (2 - ky)]};
        accumulate_row3(dst, src, grad_output.height, grad_output.width, ky - 1, flipped);
      }
    }
  }
  return grad_in;
}

Tensor conv1x1(const Tensor& input, std::span<const double> weight,
               std::span<const double> bias, std::size_t out_channels) {
  const std::size_t cin = input.channels;
  const std::size_t n = input.plane_size();
  Tensor out(out_channels, input.height, input.width);
  for (std::size_t co = 0; co < out_channels; ++co) {
    double* dst = out.plane(co);
    std::fill(dst, dst + n, bias.empty() ? 0.0 : bias[co]);
    for (std::size_t ci = 0; ci < cin; ++ci) {
      const double k = weight[co * cin + ci];
      const double* src = input.plane(ci);
      for (std::size_t i = 0; i < n; ++i) dst[i] += k * src[i];
    }
  }
  return out;
}

Tensor conv1x1_backward(const Tensor& grad_output, std::span<const double> weight,
                        std::size_t in_channels) {
  const std::size_t cout = grad_output.channels;
  const std::size_t n = grad_output.plane_size();
  Tensor grad_in(in_channels, grad_output.height, grad_output.width);
  for (std::size_t ci = 0; ci < in_channels; ++ci) {
    double* dst = grad_in.plane(ci);
    for (std::size_t co = 0; co < cout; ++co) {
      const double k = weight[co * in_channels + ci];
      const double* src = grad_output.plane(co);
      for (std::size_t i = 0; i < n; ++i) dst[i] += k * src[i];
    }
  }
  return grad_in;
}

Tensor upsample_nearest2x(const Tensor& input) {
  Tensor out(input.channels, input.height * 2, input.width * 2);
  for (std::size_t c = 0; c < input.channels; ++c) {
    const double* src = input.plane(c);
    double* dst = out.plane(c);
    for (std::size_t y = 0; y < out.height; ++y)
      for (std::size_t x = 0; x < out.width; ++x)
        dst[y * out.width + x] = src[(y / 2) * input.width + x / 2];
  }
  return out;
}

Tensor upsample_nearest2x_backward(const Tensor& grad_output) {
  Tensor grad_in(grad_output.channels, grad_output.height / 2, grad_output.width / 2);
  for (std::size_t c = 0; c < grad_output.channels; ++c) {
    const double* src = grad_output.plane(c);
    double* dst = grad_in.plane(c);
    for (std::size_t y = 0; y < grad_output.height; ++y)
      for (std::size_t x = 0; x < grad_output.width; ++x)
        dst[(y / 2) * grad_in.width + x / 2] += src[y * grad_output.width + x];
  }
  return grad_in;
}

Tensor avgpool2x2(const Tensor& input) {
  Tensor out(input.channels, input.height / 2, input.width / 2);
  for (std::size_t c = 0; c < input.channels; ++c) {
    const double* src = input.plane(c);
    double* dst = out.plane(c);
    for (std::size_t y = 0; y < out.height; ++y)
      for (std::size_t x = 0; x < out.width; ++x) {
        const double* s = src + 2 * y * input.width + 2 * x;
        dst[y * out.width + x] = 0.25 * (s[0] + s[1] + s[input.width] + s[input.width + 1]);
      }
  }
  return out;
}

Tensor avgpool2x2_backward(const Tensor& grad_output) {
  Tensor grad_in(grad_output.channels, grad_output.height * 2, grad_output.width * 2);
  for (std::size_t c = 0; c < grad_output.channels; ++c) {
    const double* src = grad_output.plane(c);
    double* dst = grad_in.plane(c);
    for (std::size_t y = 0; y < grad_in.height; ++y)
      for (std::size_t x = 0; x < grad_in.width; ++x)
        dst[y * grad_in.width + x] = 0.25 * src[(y / 2) * grad_output.width + x / 2];
  }
  return grad_in;
}

double smooth_leaky_relu(double x, double slope, double delta) {
  return slope * x + (1.0 - slope) * 0.5 * (x + std::sqrt(x * x + delta * delta));
}

void smooth_leaky_relu_inplace(Tensor& t, double slope, double delta, Tensor* derivative) {
  const double d2 = delta * delta;
  const double k = 0.5 * (1.0 - slope);
  if (derivative) *derivative = Tensor(t.channels, t.height, t.width);
  double* v = t.data.data();
  double* dv = derivative ? derivative->data.data() : nullptr;
  for (std::size_t i = 0; i < t.data.size(); ++i) {
    const double x = v[i];
    const double r = std::sqrt(x * x + d2);
    v[i] = slope * x + k * (x + r);
    if (dv) dv[i] = slope + k * (1.0 + x / r);
  }
}

std::vector<double> dense(std::span<const double> x, std::span<const double> weight,
                          std::span<const double> bias, std::size_t out) {
  const std::size_t in = x.size();
  std::vector<double> y(out);
  for (std::size_t o = 0; o < out; ++o) {
    double acc = bias.empty() ? 0.0 : bias[o];
    const double* row = weight.data() + o * in;
    for (std::size_t i = 0; i < in; ++i) acc += row[i] * x[i];
    y[o] = acc;
  }
  return y;
}

std::vector<double> dense_backward(std::span<const double> grad_out,
                                   std::span<const double> weight, std::size_t in) {
  std::vector<double> grad_in(in, 0.0);
  for (std::size_t o = 0; o < grad_out.size(); ++o) {
    const double g = grad_out[o];
    const double* row = weight.data() + o * in;
    for (std::size_t i = 0; i < in; ++i) grad_in[i] += row[i] * g;
  }
  return grad_in;
}

}  // namespace wplus
