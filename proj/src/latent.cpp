#include "wplus/latent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wplus/error.hpp"

namespace wplus {

ExtendedLatent::ExtendedLatent(std::size_t layers, std::size_t dim, std::vector<double> values)
    : layers_(layers), dim_(dim), values_(std::move(values)) {
  require(values_.size() == layers * dim, ErrorKind::ShapeMismatch,
          "latent values: expected " + std::to_string(layers * dim) + " entries, got " +
              std::to_string(values_.size()));
}

bool ExtendedLatent::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ExtendedLatent broadcast(const StyleVector& w, std::size_t layers) {
  ExtendedLatent out(layers, w.dim());
  for (std::size_t i = 0; i < layers; ++i) std::copy(w.values.begin(), w.values.end(), out.row(i).begin());
  return out;
}

StyleVector sum_rows(const ExtendedLatent& latent) {
  StyleVector w{std::vector<double>(latent.dim(), 0.0)};
  for (std::size_t i = 0; i < latent.layers(); ++i) {
    auto r = latent.row(i);
    for (std::size_t d = 0; d < latent.dim(); ++d) w.values[d] += r[d];
  }
  return w;
}

void require_same_shape(const ExtendedLatent& a, const ExtendedLatent& b, const char* what) {
  if (!a.same_shape(b))
    fail(ErrorKind::ShapeMismatch, std::string(what) + ": latent shapes differ (" +
                                       std::to_string(a.layers()) + "x" + std::to_string(a.dim()) +
                                       " vs " + std::to_string(b.layers()) + "x" +
                                       std::to_string(b.dim()) + ")");
}

}  // namespace wplus
