#ifndef ARCSIN_SCENARIO_HPP
#define ARCSIN_SCENARIO_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "arcsin/core.hpp"

namespace arcsin {

struct ScenarioConfig {
  std::size_t dim = 64;
  std::size_t num_classes = 10;
  std::size_t train_per_class = 200;
  std::size_t test_per_class = 200;
  double text_noise_sigma = 0.3;
  double image_noise_sigma = 0.3;
  double gap_magnitude = 2.0;

  void validate() const {
    if (dim == 0 || num_classes == 0 || train_per_class == 0 || test_per_class == 0) {
      throw InvalidArgument("ScenarioConfig: sizes must be positive");
    }
    if (!(text_noise_sigma >= 0.0) || !(image_noise_sigma >= 0.0) || !(gap_magnitude >= 0.0) ||
        !std::isfinite(text_noise_sigma) || !std::isfinite(image_noise_sigma) ||
        !std::isfinite(gap_magnitude)) {
      throw InvalidArgument("ScenarioConfig: sigmas and gap magnitude must be finite and >= 0");
    }
  }

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct LabeledBatch {
  EmbeddingBatch x;
  std::vector<std::size_t> labels;
};

/// Paired two-modality data. Row r of every split belongs to class r % K.
struct SyntheticScenario {
  EmbeddingBatch prototypes;  // K x C, unit rows
  std::vector<double> gap;    // unit vector shared by all image rows
  LabeledBatch train_text;
  LabeledBatch test_text;
  LabeledBatch test_image;
  std::size_t num_classes = 0;
};

namespace detail {

template <NormalSource G>
std::vector<double> random_unit_vector(std::size_t dim, G& rng) {
  std::vector<double> v(dim);
  double n = 0.0;
  do {
    for (double& x : v) x = rng.normal();
    n = l2_norm(v);
  } while (n == 0.0);
  for (double& x : v) x /= n;
  return v;
}

// normalize(prototype + sigma * z + offset)
template <NormalSource G>
LabeledBatch sample_split(const EmbeddingBatch& prototypes, std::size_t per_class, double sigma,
                          std::span<const double> offset, G& rng) {
  const std::size_t k = prototypes.rows();
  const std::size_t c = prototypes.cols();
  LabeledBatch out{EmbeddingBatch(k * per_class, c), std::vector<std::size_t>(k * per_class)};
  for (std::size_t r = 0; r < k * per_class; ++r) {
    const std::size_t label = r % k;
    out.labels[r] = label;
    auto row = out.x.row(r);
    auto proto = prototypes.row(label);
    for (std::size_t j = 0; j < c; ++j) {
      row[j] = proto[j] + sigma * rng.normal() + (offset.empty() ? 0.0 : offset[j]);
    }
  }
  normalize_rows(out.x);
  return out;
}

}  // namespace detail

/// Text rows are noisy copies of class prototypes; image rows additionally
/// carry the constant offset gap_magnitude * g before renormalization.
template <NormalSource G>
SyntheticScenario generate_scenario(const ScenarioConfig& cfg, G& rng) {
  cfg.validate();
  SyntheticScenario s;
  s.num_classes = cfg.num_classes;
  s.prototypes = EmbeddingBatch(cfg.num_classes, cfg.dim);
  for (std::size_t k = 0; k < cfg.num_classes; ++k) {
    const auto p = detail::random_unit_vector(cfg.dim, rng);
    std::copy(p.begin(), p.end(), s.prototypes.row(k).begin());
  }
  s.gap = detail::random_unit_vector(cfg.dim, rng);
  std::vector<double> offset(cfg.dim);
  for (std::size_t j = 0; j < cfg.dim; ++j) offset[j] = cfg.gap_magnitude * s.gap[j];

  s.train_text =
      detail::sample_split(s.prototypes, cfg.train_per_class, cfg.text_noise_sigma, {}, rng);
  s.test_text =
      detail::sample_split(s.prototypes, cfg.test_per_class, cfg.text_noise_sigma, {}, rng);
  s.test_image =
      detail::sample_split(s.prototypes, cfg.test_per_class, cfg.image_noise_sigma, offset, rng);
  return s;
}

// First `per_class` rows of each class. Rows stay interleaved by label.
inline LabeledBatch take_per_class(const LabeledBatch& data, std::size_t num_classes,
                                   std::size_t per_class) {
  const std::size_t rows = num_classes * per_class;
  if (rows == 0) throw InvalidArgument("take_per_class: zero training rows");
  if (rows > data.x.rows()) throw InvalidArgument("take_per_class: not enough rows");
  std::vector<double> values(data.x.values().begin(),
                             data.x.values().begin() + static_cast<std::ptrdiff_t>(rows * data.x.cols()));
  return {EmbeddingBatch(rows, data.x.cols(), std::move(values)),
          std::vector<std::size_t>(data.labels.begin(),
                                   data.labels.begin() + static_cast<std::ptrdiff_t>(rows))};
}

}  // namespace arcsin

#endif  // ARCSIN_SCENARIO_HPP
