#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wplus {

/// A sample from the initial Gaussian latent space Z.
struct LatentZ {
  std::vector<double> values;
  friend bool operator==(const LatentZ&, const LatentZ&) = default;
};

/// One intermediate style code w.
struct StyleVector {
  std::vector<double> values;
  std::size_t dim() const { return values.size(); }
  friend bool operator==(const StyleVector&, const StyleVector&) = default;
};

/// Per-layer style codes (W+): row i drives the i-th style modulation site.
class ExtendedLatent {
 public:
  ExtendedLatent() = default;
  ExtendedLatent(std::size_t layers, std::size_t dim, double fill = 0.0)
      : layers_(layers), dim_(dim), values_(layers * dim, fill) {}
  ExtendedLatent(std::size_t layers, std::size_t dim, std::vector<double> values);

  std::size_t layers() const { return layers_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return values_.size(); }

  std::span<double> row(std::size_t i) { return {values_.data() + i * dim_, dim_}; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool same_shape(const ExtendedLatent& other) const {
    return layers_ == other.layers_ && dim_ == other.dim_;
  }
  bool all_finite() const;

  friend bool operator==(const ExtendedLatent&, const ExtendedLatent&) = default;

 private:
  std::size_t layers_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

/// The W code viewed in W+: every row equals w.
ExtendedLatent broadcast(const StyleVector& w, std::size_t layers);

/// Sum of rows; the adjoint of broadcast.
StyleVector sum_rows(const ExtendedLatent& latent);

/// Throws ShapeMismatch naming `what` when a and b differ in shape.
void require_same_shape(const ExtendedLatent& a, const ExtendedLatent& b, const char* what);

}  // namespace wplus
