#ifndef ARCSIN_INJECTOR_HPP
#define ARCSIN_INJECTOR_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "arcsin/bounds.hpp"
#include "arcsin/core.hpp"

namespace arcsin {

struct InjectorConfig {
  std::size_t pool_size = 8;
  double threshold = 0.9;
  double epsilon = 0.01;
  bool post_clamp = false;
  std::uint64_t seed = 0;

  void validate() const {
    if (pool_size < 1) throw InvalidArgument("InjectorConfig: pool_size must be >= 1");
    if (!(threshold > 0.0 && threshold < 1.0)) {
      throw InvalidArgument("InjectorConfig: threshold must lie in (0, 1)");
    }
    if (!(epsilon > 0.0 && epsilon < std::min(threshold, 1.0 - threshold))) {
      throw InvalidArgument("InjectorConfig: epsilon must lie in (0, min(s, 1 - s))");
    }
  }

  friend bool operator==(const InjectorConfig&, const InjectorConfig&) = default;
};

/// Interval [lower, upper] from which the per-batch rotation budget is drawn,
/// plus the similarity band [threshold - epsilon, threshold + epsilon] the
/// controller steers towards.
struct AngleRangeState {
  double lower = 0.0;
  double upper = kHalfPi;
  double threshold = 0.9;
  double epsilon = 0.01;
  double last_alpha = 0.0;

  // Intervals narrower than this count as collapsed and are reset.
  static constexpr double kMinWidth = 1e-6;

  static AngleRangeState initial(const InjectorConfig& cfg) {
    return {0.0, kHalfPi, cfg.threshold, cfg.epsilon, 0.0};
  }

  void validate() const {
    if (!(lower >= 0.0 && lower <= upper && upper <= kHalfPi)) {
      throw InvalidArgument("AngleRangeState: requires 0 <= lower <= upper <= pi/2");
    }
    if (!(threshold > 0.0 && threshold < 1.0)) {
      throw InvalidArgument("AngleRangeState: threshold must lie in (0, 1)");
    }
    if (!(epsilon > 0.0 && epsilon < std::min(threshold, 1.0 - threshold))) {
      throw InvalidArgument("AngleRangeState: epsilon must lie in (0, min(s, 1 - s))");
    }
  }

  friend bool operator==(const AngleRangeState&, const AngleRangeState&) = default;
};

struct TraceRecord {
  std::size_t batch = 0;
  double alpha = 0.0;
  double avg_similarity = 0.0;
  double lower = 0.0;  // after the update
  double upper = 0.0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

using InjectionTrace = std::vector<TraceRecord>;

/// Per-entry deviation bounds of a batch for one rotation budget.
struct DeviationBounds {
  EmbeddingBatch plus;
  EmbeddingBatch minus;
};

inline void require_unit_box(const EmbeddingBatch& e, const char* where) {
  for (std::size_t r = 0; r < e.rows(); ++r) {
    for (std::size_t c = 0; c < e.cols(); ++c) {
      const double v = e(r, c);
      if (!(v >= -1.0 && v <= 1.0)) {
        throw InvalidArgument(std::string(where) + ": entry (" + std::to_string(r) + ", " +
                              std::to_string(c) + ") = " + std::to_string(v) +
                              " outside [-1, 1]; clamp the input first");
      }
    }
  }
}

inline DeviationBounds deviation_bounds(const EmbeddingBatch& e, double alpha) {
  require_angle(alpha, "deviation_bounds");
  require_unit_box(e, "deviation_bounds");
  DeviationBounds b{EmbeddingBatch(e.rows(), e.cols()), EmbeddingBatch(e.rows(), e.cols())};
  auto src = e.values();
  auto plus = b.plus.values();
  auto minus = b.minus.values();
  if (alpha == 0.0) return b;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const auto [up, down] = detail::deviation_pair(src[i], alpha);
    plus[i] = up;
    minus[i] = down;
  }
  return b;
}

// Applies the injection rule entrywise with `noise` as the draws.
inline EmbeddingBatch apply_injection(const EmbeddingBatch& e, const DeviationBounds& bounds,
                                      const EmbeddingBatch& noise, bool post_clamp) {
  require_same_shape(e, noise, "apply_injection");
  EmbeddingBatch out(e.rows(), e.cols());
  auto src = e.values();
  auto xi = noise.values();
  auto plus = bounds.plus.values();
  auto minus = bounds.minus.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    double v = inject_component(src[i], plus[i], minus[i], xi[i]);
    if (post_clamp) v = std::min(1.0, std::max(-1.0, v));
    dst[i] = v;
  }
  return out;
}

inline EmbeddingBatch inject_with_noise(const EmbeddingBatch& e, double alpha,
                                        const EmbeddingBatch& noise, bool post_clamp = false) {
  return apply_injection(e, deviation_bounds(e, alpha), noise, post_clamp);
}

/// Plain (pool-free) injection: one standard-normal draw per entry.
/// The input must already lie in [-1, 1].
template <NormalSource G>
EmbeddingBatch inject_plain(const EmbeddingBatch& e, double alpha, G& rng, bool post_clamp = false) {
  auto bounds = deviation_bounds(e, alpha);
  const EmbeddingBatch noise = gaussian_sample(rng, e.rows(), e.cols());
  return apply_injection(e, bounds, noise, post_clamp);
}

using NoisePool = std::vector<EmbeddingBatch>;

template <NormalSource G>
NoisePool build_noise_pool(std::size_t rows, std::size_t pool_size, std::size_t cols, G& rng) {
  if (rows == 0 || pool_size == 0 || cols == 0) {
    throw InvalidArgument("build_noise_pool: sizes must be positive");
  }
  NoisePool pool;
  pool.reserve(pool_size);
  for (std::size_t n = 0; n < pool_size; ++n) pool.push_back(gaussian_sample(rng, rows, cols));
  return pool;
}

struct PoolSelection {
  EmbeddingBatch output;
  std::vector<double> similarity;  // per row, input vs selected output
  std::vector<std::size_t> chosen;  // winning candidate index per row
};

/// Injects every pool candidate and keeps, per row, the candidate whose
/// result is most similar to the input row. Ties go to the lowest index.
/// Similarity is measured on the returned (post-clamp, if enabled) values.
inline PoolSelection inject_with_pool(const EmbeddingBatch& e, double alpha, const NoisePool& pool,
                                      bool post_clamp = false) {
  if (pool.empty()) throw InvalidArgument("inject_with_pool: empty pool");
  for (const auto& candidate : pool) require_same_shape(e, candidate, "inject_with_pool");
  const auto bounds = deviation_bounds(e, alpha);

  PoolSelection sel{EmbeddingBatch(e.rows(), e.cols()), std::vector<double>(e.rows(), -2.0),
                    std::vector<std::size_t>(e.rows(), 0)};
  std::vector<double> scratch(e.cols());
  for (std::size_t r = 0; r < e.rows(); ++r) {
    const auto src = e.row(r);
    const auto plus = bounds.plus.row(r);
    const auto minus = bounds.minus.row(r);
    const double src_norm = l2_norm(src);
    for (std::size_t n = 0; n < pool.size(); ++n) {
      const auto xi = pool[n].row(r);
      double dot_sum = 0.0;
      double sq_sum = 0.0;
      for (std::size_t j = 0; j < src.size(); ++j) {
        double v = inject_component(src[j], plus[j], minus[j], xi[j]);
        if (post_clamp) v = std::min(1.0, std::max(-1.0, v));
        scratch[j] = v;
        dot_sum += src[j] * v;
        sq_sum += v * v;
      }
      if (src_norm == 0.0 || sq_sum == 0.0) {
        throw DegenerateInput("inject_with_pool: zero-norm row " + std::to_string(r) +
                              " (candidate " + std::to_string(n) + ")");
      }
      const double sim = std::clamp(dot_sum / (src_norm * std::sqrt(sq_sum)), -1.0, 1.0);
      if (sim > sel.similarity[r]) {
        sel.similarity[r] = sim;
        sel.chosen[r] = n;
        std::copy(scratch.begin(), scratch.end(), sel.output.row(r).begin());
      }
    }
  }
  return sel;
}

/// One feedback step: similarity below the band caps the interval at the
/// last drawn angle, similarity above it raises the floor, otherwise no
/// change. A collapsed or inverted interval resets to [0, pi/2].
inline AngleRangeState controller_update(AngleRangeState state, double avg_sim) {
  if (avg_sim < state.threshold - state.epsilon) {
    state.upper = state.last_alpha;
  } else if (avg_sim > state.threshold + state.epsilon) {
    state.lower = state.last_alpha;
  } else {
    return state;
  }
  if (state.lower > state.upper || state.upper - state.lower < AngleRangeState::kMinWidth) {
    state.lower = 0.0;
    state.upper = kHalfPi;
  }
  return state;
}

struct ForwardResult {
  EmbeddingBatch output;
  AngleRangeState state;
  TraceRecord record;
};

/// One full forward pass: clamp, draw the rotation budget, build the pool,
/// select per row, measure the average similarity and update the controller.
/// `batch_index` only labels the trace record.
template <NormalSource G>
  requires requires(G& g) { { g.uniform(0.0, 1.0) } -> std::convertible_to<double>; }
ForwardResult arcsin_forward(const AngleRangeState& state, const InjectorConfig& cfg,
                             const EmbeddingBatch& e, G& rng, std::size_t batch_index = 0) {
  state.validate();
  cfg.validate();
  const EmbeddingBatch clamped = clamp_components(e, -1.0, 1.0);

  AngleRangeState next = state;
  next.last_alpha = rng.uniform(state.lower, state.upper);

  const NoisePool pool = build_noise_pool(clamped.rows(), cfg.pool_size, clamped.cols(), rng);
  PoolSelection sel = inject_with_pool(clamped, next.last_alpha, pool, cfg.post_clamp);
  const double avg = mean(sel.similarity);
  next = controller_update(next, avg);

  TraceRecord rec{batch_index, next.last_alpha, avg, next.lower, next.upper};
  return {std::move(sel.output), next, rec};
}

/// Stateful wrapper owning the controller, its random stream and the trace.
/// Calls must be serialized per instance.
class ArcSinInjector {
 public:
  explicit ArcSinInjector(const InjectorConfig& cfg)
      : cfg_(cfg), state_(AngleRangeState::initial(cfg)), rng_(cfg.seed) {
    cfg_.validate();
  }

  ArcSinInjector(const InjectorConfig& cfg, const AngleRangeState& state)
      : cfg_(cfg), state_(state), rng_(cfg.seed) {
    cfg_.validate();
    state_.validate();
  }

  EmbeddingBatch forward(const EmbeddingBatch& e) {
    auto result = arcsin_forward(state_, cfg_, e, rng_, trace_.size());
    state_ = result.state;
    trace_.push_back(result.record);
    return std::move(result.output);
  }

  const AngleRangeState& state() const noexcept { return state_; }
  const InjectorConfig& config() const noexcept { return cfg_; }
  const InjectionTrace& trace() const noexcept { return trace_; }

 private:
  InjectorConfig cfg_;
  AngleRangeState state_;
  SeededRng rng_;
  InjectionTrace trace_;
};

}  // namespace arcsin

#endif  // ARCSIN_INJECTOR_HPP
