#ifndef ARCSIN_REPORT_HPP
#define ARCSIN_REPORT_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "arcsin/config.hpp"
#include "arcsin/experiment.hpp"
#include "arcsin/io.hpp"
#include "arcsin/version.hpp"

namespace arcsin {

using Json = nlohmann::ordered_json;

inline Json to_json(const ScenarioConfig& c) {
  return Json{{"dim", c.dim},
              {"num_classes", c.num_classes},
              {"train_per_class", c.train_per_class},
              {"test_per_class", c.test_per_class},
              {"text_noise_sigma", c.text_noise_sigma},
              {"image_noise_sigma", c.image_noise_sigma},
              {"gap_magnitude", c.gap_magnitude}};
}

inline Json to_json(const TrainingConfig& c) {
  return Json{{"epochs", c.epochs}, {"learning_rate", c.learning_rate}, {"batch_size", c.batch_size}};
}

inline Json to_json(const InjectorSpec& s) {
  Json j{{"kind", s.kind == InjectorKind::identity         ? "identity"
                  : s.kind == InjectorKind::fixed_gaussian ? "fixed_gaussian"
                                                           : "arcsin"}};
  if (s.kind == InjectorKind::fixed_gaussian) j["scale"] = s.scale;
  if (s.kind == InjectorKind::arcsin) {
    j["threshold"] = s.arcsin.threshold;
    j["epsilon"] = s.arcsin.epsilon;
    j["pool_size"] = s.arcsin.pool_size;
    j["post_clamp"] = s.arcsin.post_clamp;
  }
  return j;
}

// Column-per-field layout keeps long traces compact.
inline Json to_json(const InjectionTrace& trace) {
  Json batch = Json::array(), alpha = Json::array(), sim = Json::array(), lower = Json::array(),
       upper = Json::array();
  for (const auto& r : trace) {
    batch.push_back(r.batch);
    alpha.push_back(r.alpha);
    sim.push_back(r.avg_similarity);
    lower.push_back(r.lower);
    upper.push_back(r.upper);
  }
  return Json{{"batch", batch}, {"alpha", alpha}, {"avg_similarity", sim}, {"lower", lower},
              {"upper", upper}};
}

inline Json to_json(const ExperimentReport& r) {
  Json results = Json::array();
  for (const auto& e : r.results) {
    Json j{{"name", e.name},
           {"injector", to_json(e.spec)},
           {"seed", e.seed},
           {"image_accuracy", e.image_accuracy},
           {"text_accuracy", e.text_accuracy},
           {"mean_train_similarity", e.mean_train_similarity},
           {"final_loss", e.final_loss}};
    if (e.spec.kind == InjectorKind::arcsin) j["trace"] = to_json(e.trace);
    results.push_back(std::move(j));
  }
  return Json{{"master_seed", r.master_seed},
              {"train_fraction", r.train_fraction},
              {"scenario", to_json(r.scenario)},
              {"training", to_json(r.training)},
              {"results", std::move(results)}};
}

/// Everything one seed produced: the main experiment and, when fractions
/// are configured, the scale sweep.
struct SeedRun {
  std::uint64_t seed = 0;
  ExperimentReport experiment;
  std::vector<ExperimentReport> sweep;
};

inline Json seed_report_json(const SeedRun& run, const RunConfig& cfg) {
  Json sweep = Json::array();
  for (const auto& r : run.sweep) sweep.push_back(to_json(r));
  return Json{{"tool", "arcsin"},
              {"tool_version", kToolVersion},
              {"master_seed", run.seed},
              {"config", format_config(cfg)},
              {"experiment", to_json(run.experiment)},
              {"scale_sweep", std::move(sweep)}};
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw InvalidArgument("median: empty input");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct AggregateEntry {
  std::string name;
  double median_image_accuracy = 0.0;
  double median_text_accuracy = 0.0;
};

/// Median accuracies per injector across seeds, in injector order.
inline std::vector<AggregateEntry> aggregate(const std::vector<ExperimentReport>& reports) {
  std::vector<AggregateEntry> out;
  if (reports.empty()) return out;
  for (std::size_t i = 0; i < reports.front().results.size(); ++i) {
    std::vector<double> img, txt;
    for (const auto& r : reports) {
      img.push_back(r.results.at(i).image_accuracy);
      txt.push_back(r.results.at(i).text_accuracy);
    }
    out.push_back({reports.front().results[i].name, median(img), median(txt)});
  }
  return out;
}

inline Json to_json(const std::vector<AggregateEntry>& entries) {
  Json out = Json::array();
  for (const auto& e : entries) {
    out.push_back(Json{{"name", e.name},
                       {"median_image_accuracy", e.median_image_accuracy},
                       {"median_text_accuracy", e.median_text_accuracy}});
  }
  return out;
}

inline Json aggregate_report_json(const std::vector<SeedRun>& runs, const RunConfig& cfg) {
  Json seeds = Json::array();
  std::vector<ExperimentReport> experiments;
  for (const auto& r : runs) {
    seeds.push_back(r.seed);
    experiments.push_back(r.experiment);
  }
  Json sweep = Json::array();
  if (!runs.empty()) {
    for (std::size_t f = 0; f < runs.front().sweep.size(); ++f) {
      std::vector<ExperimentReport> at_fraction;
      for (const auto& r : runs) at_fraction.push_back(r.sweep.at(f));
      sweep.push_back(Json{{"train_fraction", runs.front().sweep[f].train_fraction},
                           {"injectors", to_json(aggregate(at_fraction))}});
    }
  }
  return Json{{"tool", "arcsin"},
              {"tool_version", kToolVersion},
              {"seeds", std::move(seeds)},
              {"config", format_config(cfg)},
              {"injectors", to_json(aggregate(experiments))},
              {"scale_sweep", std::move(sweep)}};
}

inline void write_report(const Json& report, const std::filesystem::path& path) {
  atomic_write(path, report.dump(2) + "\n");
}

inline void write_report(const ExperimentReport& report, const std::filesystem::path& path) {
  Json j{{"tool", "arcsin"}, {"tool_version", kToolVersion}, {"master_seed", report.master_seed}};
  j["experiment"] = to_json(report);
  write_report(j, path);
}

}  // namespace arcsin

#endif  // ARCSIN_REPORT_HPP
