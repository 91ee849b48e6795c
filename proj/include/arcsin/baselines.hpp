#ifndef ARCSIN_BASELINES_HPP
#define ARCSIN_BASELINES_HPP

#include <cmath>
#include <cstdint>
#include <string>

#include "arcsin/core.hpp"

namespace arcsin {

enum class BaselineKind { identity, fixed_gaussian };

inline const char* to_string(BaselineKind k) noexcept {
  return k == BaselineKind::identity ? "identity" : "fixed_gaussian";
}

struct BaselineConfig {
  BaselineKind kind = BaselineKind::identity;
  double scale = 0.1;  // standard deviation; ignored by identity
  std::uint64_t seed = 0;

  void validate() const {
    if (!(scale >= 0.0) || !std::isfinite(scale)) {
      throw InvalidArgument("BaselineConfig: scale must be a finite value >= 0");
    }
  }

  friend bool operator==(const BaselineConfig&, const BaselineConfig&) = default;
};

// "Without noise" reference.
inline EmbeddingBatch identity_inject(const EmbeddingBatch& e) { return e; }

// Isotropic noise of one fixed intensity, independent of the entry values.
template <NormalSource G>
EmbeddingBatch gaussian_inject(const EmbeddingBatch& e, double scale, G& rng) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw InvalidArgument("gaussian_inject: scale must be a finite value >= 0");
  }
  EmbeddingBatch out = e;
  for (double& v : out.values()) v += scale * rng.normal();
  return out;
}

}  // namespace arcsin

#endif  // ARCSIN_BASELINES_HPP
