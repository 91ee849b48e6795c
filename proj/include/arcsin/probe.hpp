#ifndef ARCSIN_PROBE_HPP
#define ARCSIN_PROBE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "arcsin/core.hpp"

namespace arcsin {

/// Linear softmax classifier: logits = W x + b, W is K x C.
struct LinearProbe {
  EmbeddingBatch weights;
  std::vector<double> bias;

  LinearProbe() = default;
  LinearProbe(std::size_t num_classes, std::size_t dim)
      : weights(num_classes, dim), bias(num_classes, 0.0) {}

  std::size_t num_classes() const noexcept { return weights.rows(); }
  std::size_t dim() const noexcept { return weights.cols(); }

  void logits(std::span<const double> x, std::span<double> out) const noexcept {
    for (std::size_t k = 0; k < num_classes(); ++k) out[k] = dot(weights.row(k), x) + bias[k];
  }

  // Lowest class index wins ties.
  std::size_t predict(std::span<const double> x) const {
    std::vector<double> z(num_classes());
    logits(x, z);
    return static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
  }

  bool finite() const {
    for (double v : weights.values()) {
      if (!std::isfinite(v)) return false;
    }
    return std::all_of(bias.begin(), bias.end(), [](double v) { return std::isfinite(v); });
  }
};

inline void require_labels(const EmbeddingBatch& x, std::span<const std::size_t> labels,
                           std::size_t num_classes, const char* where) {
  if (labels.size() != x.rows()) {
    throw ShapeError(std::string(where) + ": " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(x.rows()) + " rows");
  }
  for (std::size_t y : labels) {
    if (y >= num_classes) throw InvalidArgument(std::string(where) + ": label out of range");
  }
}

/// Mean softmax cross-entropy over the batch. When `grad` is given it
/// receives the gradient with respect to (W, b).
inline double softmax_cross_entropy(const LinearProbe& probe, const EmbeddingBatch& x,
                                    std::span<const std::size_t> labels, LinearProbe* grad = nullptr) {
  const std::size_t k = probe.num_classes();
  if (grad) *grad = LinearProbe(k, probe.dim());
  std::vector<double> z(k);
  double loss = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    probe.logits(x.row(r), z);
    const double zmax = *std::max_element(z.begin(), z.end());
    double denom = 0.0;
    for (double& v : z) {
      v = std::exp(v - zmax);
      denom += v;
    }
    const std::size_t y = labels[r];
    loss -= std::log(z[y] / denom);
    if (grad) {
      auto xr = x.row(r);
      for (std::size_t c = 0; c < k; ++c) {
        const double g = z[c] / denom - (c == y ? 1.0 : 0.0);
        if (g == 0.0) continue;
        auto wrow = grad->weights.row(c);
        for (std::size_t j = 0; j < xr.size(); ++j) wrow[j] += g * xr[j];
        grad->bias[c] += g;
      }
    }
  }
  const double n = static_cast<double>(x.rows());
  if (grad) {
    for (double& v : grad->weights.values()) v /= n;
    for (double& v : grad->bias) v /= n;
  }
  return loss / n;
}

inline double eval_probe(const LinearProbe& probe, const EmbeddingBatch& x,
                         std::span<const std::size_t> labels) {
  if (x.rows() == 0) throw InvalidArgument("eval_probe: empty batch");
  if (x.cols() != probe.dim()) {
    throw ShapeError("eval_probe: batch has " + std::to_string(x.cols()) +
                     " columns, probe expects " + std::to_string(probe.dim()));
  }
  require_labels(x, labels, probe.num_classes(), "eval_probe");
  std::size_t correct = 0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    if (probe.predict(x.row(r)) == labels[r]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(x.rows());
}

}  // namespace arcsin

#endif  // ARCSIN_PROBE_HPP
