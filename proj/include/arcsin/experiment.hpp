#ifndef ARCSIN_EXPERIMENT_HPP
#define ARCSIN_EXPERIMENT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "arcsin/baselines.hpp"
#include "arcsin/injector.hpp"
#include "arcsin/probe.hpp"
#include "arcsin/scenario.hpp"

namespace arcsin {

enum class InjectorKind { identity, fixed_gaussian, arcsin };

struct InjectorSpec {
  InjectorKind kind = InjectorKind::identity;
  double scale = 0.1;        // fixed_gaussian only
  InjectorConfig arcsin{};   // arcsin only; its seed is overwritten per run

  static InjectorSpec identity() { return {}; }
  static InjectorSpec gaussian(double scale) { return {InjectorKind::fixed_gaussian, scale, {}}; }
  static InjectorSpec arc(const InjectorConfig& cfg = {}) {
    return {InjectorKind::arcsin, 0.1, cfg};
  }

  std::string name() const {
    switch (kind) {
      case InjectorKind::identity:
        return "identity";
      case InjectorKind::fixed_gaussian: {
        std::ostringstream os;
        os << "gaussian_" << scale;
        return os.str();
      }
      case InjectorKind::arcsin:
        return "arcsin";
    }
    return "unknown";
  }

  friend bool operator==(const InjectorSpec&, const InjectorSpec&) = default;
};

struct TrainingConfig {
  std::size_t epochs = 300;
  double learning_rate = 0.1;
  std::size_t batch_size = 64;  // rows per injector call

  void validate() const {
    if (epochs < 1) throw InvalidArgument("TrainingConfig: epochs must be >= 1");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
      throw InvalidArgument("TrainingConfig: learning_rate must be > 0");
    }
    if (batch_size < 1) throw InvalidArgument("TrainingConfig: batch_size must be >= 1");
  }

  friend bool operator==(const TrainingConfig&, const TrainingConfig&) = default;
};

/// Runtime augmenter built from a spec. Applies the injector batch by batch
/// and accumulates the per-row input/output similarity.
class Augmenter {
 public:
  Augmenter(const InjectorSpec& spec, std::uint64_t seed, std::size_t batch_size)
      : spec_(spec), rng_(seed), batch_size_(batch_size) {
    if (spec_.kind == InjectorKind::fixed_gaussian) {
      BaselineConfig{BaselineKind::fixed_gaussian, spec_.scale, seed}.validate();
    }
    if (spec_.kind == InjectorKind::arcsin) {
      InjectorConfig cfg = spec_.arcsin;
      cfg.seed = rng_.derive_seed();
      injector_.emplace(cfg);
    }
  }

  EmbeddingBatch apply(const EmbeddingBatch& x) {
    EmbeddingBatch out(x.rows(), x.cols());
    for (std::size_t start = 0; start < x.rows(); start += batch_size_) {
      const std::size_t n = std::min(batch_size_, x.rows() - start);
      std::vector<double> chunk(x.values().begin() + static_cast<std::ptrdiff_t>(start * x.cols()),
                                x.values().begin() +
                                    static_cast<std::ptrdiff_t>((start + n) * x.cols()));
      const EmbeddingBatch in(n, x.cols(), std::move(chunk));
      const EmbeddingBatch aug = apply_batch(in);
      for (double s : batch_cosine_sim(in, aug)) {
        sim_sum_ += s;
        ++sim_count_;
      }
      std::copy(aug.values().begin(), aug.values().end(),
                out.values().begin() + static_cast<std::ptrdiff_t>(start * x.cols()));
    }
    return out;
  }

  double mean_similarity() const noexcept {
    return sim_count_ == 0 ? 1.0 : sim_sum_ / static_cast<double>(sim_count_);
  }

  InjectionTrace trace() const { return injector_ ? injector_->trace() : InjectionTrace{}; }

 private:
  EmbeddingBatch apply_batch(const EmbeddingBatch& x) {
    switch (spec_.kind) {
      case InjectorKind::identity:
        return identity_inject(x);
      case InjectorKind::fixed_gaussian:
        return gaussian_inject(x, spec_.scale, rng_);
      case InjectorKind::arcsin:
        return injector_->forward(x);
    }
    return x;
  }

  InjectorSpec spec_;
  SeededRng rng_;
  std::size_t batch_size_;
  std::optional<ArcSinInjector> injector_;
  double sim_sum_ = 0.0;
  std::size_t sim_count_ = 0;
};

struct TrainingResult {
  LinearProbe probe;
  std::vector<double> loss_history;  // loss of the batch each step was taken on
  double mean_similarity = 1.0;
  InjectionTrace trace;
};

/// Full-batch gradient descent from zero initialization. The injector
/// re-augments the whole training set before every epoch.
inline TrainingResult train_probe(const LabeledBatch& train, std::size_t num_classes,
                                  const InjectorSpec& spec, const TrainingConfig& tcfg,
                                  std::uint64_t seed) {
  tcfg.validate();
  require_labels(train.x, train.labels, num_classes, "train_probe");
  TrainingResult result{LinearProbe(num_classes, train.x.cols()), {}, 1.0, {}};
  result.loss_history.reserve(tcfg.epochs);
  Augmenter augmenter(spec, seed, tcfg.batch_size);
  LinearProbe grad;
  for (std::size_t epoch = 1; epoch <= tcfg.epochs; ++epoch) {
    const EmbeddingBatch batch = augmenter.apply(train.x);
    const double loss = softmax_cross_entropy(result.probe, batch, train.labels, &grad);
    if (!std::isfinite(loss)) throw TrainingDiverged(epoch);
    result.loss_history.push_back(loss);
    auto w = result.probe.weights.values();
    auto gw = grad.weights.values();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= tcfg.learning_rate * gw[i];
    for (std::size_t k = 0; k < num_classes; ++k) {
      result.probe.bias[k] -= tcfg.learning_rate * grad.bias[k];
    }
    if (!result.probe.finite()) throw TrainingDiverged(epoch);
  }
  result.mean_similarity = augmenter.mean_similarity();
  result.trace = augmenter.trace();
  return result;
}

struct InjectorResult {
  std::string name;
  InjectorSpec spec;
  std::uint64_t seed = 0;
  double image_accuracy = 0.0;
  double text_accuracy = 0.0;
  double mean_train_similarity = 1.0;
  double final_loss = 0.0;
  InjectionTrace trace;  // arcsin only
};

struct ExperimentReport {
  std::uint64_t master_seed = 0;
  double train_fraction = 1.0;
  ScenarioConfig scenario;
  TrainingConfig training;
  std::vector<InjectorResult> results;

  const InjectorResult* find(const std::string& name) const {
    for (const auto& r : results) {
      if (r.name == name) return &r;
    }
    return nullptr;
  }
};

namespace detail {

struct ExperimentSeeds {
  std::uint64_t scenario = 0;
  std::vector<std::uint64_t> injectors;
};

// Scenario seed first, then one child seed per injector, all from the master stream.
inline ExperimentSeeds derive_seeds(std::uint64_t master_seed, std::size_t count) {
  SeededRng master(master_seed);
  ExperimentSeeds s;
  s.scenario = master.derive_seed();
  for (std::size_t i = 0; i < count; ++i) s.injectors.push_back(master.derive_seed());
  return s;
}

inline ExperimentReport run_on_scenario(const SyntheticScenario& scenario, const LabeledBatch& train,
                                        const ScenarioConfig& cfg,
                                        const std::vector<InjectorSpec>& specs,
                                        const TrainingConfig& tcfg, const ExperimentSeeds& seeds,
                                        std::uint64_t master_seed, double fraction) {
  ExperimentReport report{master_seed, fraction, cfg, tcfg, {}};
  for (std::size_t i = 0; i < specs.size(); ++i) {
    auto trained = train_probe(train, scenario.num_classes, specs[i], tcfg, seeds.injectors[i]);
    InjectorResult r;
    r.name = specs[i].name();
    r.spec = specs[i];
    r.seed = seeds.injectors[i];
    r.image_accuracy =
        eval_probe(trained.probe, scenario.test_image.x, scenario.test_image.labels);
    r.text_accuracy = eval_probe(trained.probe, scenario.test_text.x, scenario.test_text.labels);
    r.mean_train_similarity = trained.mean_similarity;
    r.final_loss = trained.loss_history.back();
    r.trace = std::move(trained.trace);
    report.results.push_back(std::move(r));
  }
  return report;
}

}  // namespace detail

/// One scenario, one independently seeded probe per injector, evaluated on
/// the image-side and text-side test sets.
inline ExperimentReport run_experiment(const ScenarioConfig& cfg,
                                       const std::vector<InjectorSpec>& specs,
                                       const TrainingConfig& tcfg, std::uint64_t master_seed) {
  if (specs.empty()) throw InvalidArgument("run_experiment: at least one injector required");
  cfg.validate();
  tcfg.validate();
  const auto seeds = detail::derive_seeds(master_seed, specs.size());
  SeededRng scenario_rng(seeds.scenario);
  const auto scenario = generate_scenario(cfg, scenario_rng);
  return detail::run_on_scenario(scenario, scenario.train_text, cfg, specs, tcfg, seeds,
                                 master_seed, 1.0);
}

inline std::size_t scaled_count(std::size_t n, double fraction) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction + 1e-9));
}

/// Reruns the experiment on the leading fraction of each class's training
/// rows. The scenario (and so the test sets) is shared by all fractions.
inline std::vector<ExperimentReport> scale_sweep(const ScenarioConfig& cfg,
                                                 const std::vector<double>& fractions,
                                                 const std::vector<InjectorSpec>& specs,
                                                 const TrainingConfig& tcfg,
                                                 std::uint64_t master_seed) {
  std::vector<ExperimentReport> reports;
  if (fractions.empty()) return reports;
  if (specs.empty()) throw InvalidArgument("scale_sweep: at least one injector required");
  cfg.validate();
  tcfg.validate();
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw InvalidArgument("scale_sweep: fractions must lie in (0, 1]");
    if (scaled_count(cfg.train_per_class, f) == 0) {
      throw InvalidArgument("scale_sweep: fraction " + std::to_string(f) +
                            " leaves no training rows");
    }
  }
  const auto seeds = detail::derive_seeds(master_seed, specs.size());
  SeededRng scenario_rng(seeds.scenario);
  const auto scenario = generate_scenario(cfg, scenario_rng);
  for (double f : fractions) {
    const auto train = take_per_class(scenario.train_text, scenario.num_classes,
                                      scaled_count(cfg.train_per_class, f));
    reports.push_back(
        detail::run_on_scenario(scenario, train, cfg, specs, tcfg, seeds, master_seed, f));
  }
  return reports;
}

}  // namespace arcsin

#endif  // ARCSIN_EXPERIMENT_HPP
