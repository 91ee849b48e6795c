#ifndef ARCSIN_TOOLS_CLI_HPP
#define ARCSIN_TOOLS_CLI_HPP

// Command-line front end. Kept in a header so tests can drive it in-process.
//
// Exit codes: 0 success, 1 usage or validation error, 2 runtime error.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "arcsin/arcsin.hpp"

namespace arcsin::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

struct AugmentOptions {
  std::string input;
  std::string output;
  std::string format = "binary";
  double threshold = InjectorConfig{}.threshold;
  double epsilon = InjectorConfig{}.epsilon;
  std::size_t pool = InjectorConfig{}.pool_size;
  std::size_t batch = TrainingConfig{}.batch_size;
  std::optional<double> alpha_fixed;
  bool post_clamp = false;
  std::uint64_t seed = 0;
};

struct CurveOptions {
  double alpha = 0.0;
  std::size_t points = 101;
  std::string output;
  std::uint64_t seed = 0;
};

struct SimulateOptions {
  std::string config;
  std::string out;
  std::vector<std::uint64_t> seeds;
  std::optional<std::uint64_t> seed;
};

struct StatsOptions {
  std::string input;
  std::string reference;
  std::string format = "binary";
  std::uint64_t seed = 0;
};

struct AugmentSummary {
  std::size_t rows = 0;
  std::size_t batches = 0;
  double mean_similarity = 1.0;
  double tail_mean_similarity = 1.0;  // second half of the batches
  double lower = 0.0;
  double upper = 0.0;
};

inline std::string fixed(double v, int digits = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

inline EmbeddingBatch slice_rows(const EmbeddingBatch& x, std::size_t start, std::size_t n) {
  std::vector<double> v(x.values().begin() + static_cast<std::ptrdiff_t>(start * x.cols()),
                        x.values().begin() + static_cast<std::ptrdiff_t>((start + n) * x.cols()));
  return EmbeddingBatch(n, x.cols(), std::move(v));
}

inline AugmentSummary augment_file(const AugmentOptions& o) {
  const auto format = parse_format(o.format);
  if (o.batch < 1) throw InvalidArgument("--batch must be >= 1");
  InjectorConfig cfg;
  cfg.threshold = o.threshold;
  cfg.epsilon = o.epsilon;
  cfg.pool_size = o.pool;
  cfg.post_clamp = o.post_clamp;
  cfg.seed = o.seed;
  cfg.validate();
  if (o.alpha_fixed) require_angle(*o.alpha_fixed, "--alpha-fixed");

  const EmbeddingBatch input = read_embeddings(o.input, format);
  EmbeddingBatch output(input.rows(), input.cols());
  std::vector<double> batch_means;
  double sim_sum = 0.0;

  ArcSinInjector injector(cfg);
  SeededRng fixed_rng(o.seed);
  for (std::size_t start = 0; start < input.rows(); start += o.batch) {
    const std::size_t n = std::min(o.batch, input.rows() - start);
    const EmbeddingBatch chunk = clamp_components(slice_rows(input, start, n), -1.0, 1.0);
    const EmbeddingBatch aug = o.alpha_fixed
                                   ? inject_plain(chunk, *o.alpha_fixed, fixed_rng, o.post_clamp)
                                   : injector.forward(chunk);
    const auto sims = batch_cosine_sim(chunk, aug);
    for (double s : sims) sim_sum += s;
    batch_means.push_back(mean(sims));
    std::copy(aug.values().begin(), aug.values().end(),
              output.values().begin() + static_cast<std::ptrdiff_t>(start * input.cols()));
  }
  write_embeddings(output, o.output, format);

  AugmentSummary s;
  s.rows = input.rows();
  s.batches = batch_means.size();
  s.mean_similarity = sim_sum / static_cast<double>(input.rows());
  const std::size_t half = batch_means.size() / 2;
  s.tail_mean_similarity = mean(std::span<const double>(batch_means).subspan(half));
  if (o.alpha_fixed) {
    s.lower = s.upper = *o.alpha_fixed;
  } else {
    s.lower = injector.state().lower;
    s.upper = injector.state().upper;
  }
  return s;
}

struct SimilarityStats {
  double min, p25, median, p75, max, mean;
};

// Linear interpolation between closest ranks.
inline double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline SimilarityStats similarity_stats(const EmbeddingBatch& input, const EmbeddingBatch& reference) {
  auto sims = batch_cosine_sim(reference, input);
  const double m = mean(sims);
  std::sort(sims.begin(), sims.end());
  return {sims.front(), quantile(sims, 0.25), quantile(sims, 0.5), quantile(sims, 0.75), sims.back(), m};
}

inline std::filesystem::path seed_report_path(const std::filesystem::path& out, std::uint64_t seed) {
  auto p = out;
  p.replace_filename(out.stem().string() + ".seed" + std::to_string(seed) + out.extension().string());
  return p;
}

inline int run_simulate(const SimulateOptions& o, std::ostream& out) {
  const RunConfig cfg = o.config.empty() ? RunConfig{} : parse_config(o.config);
  std::vector<std::uint64_t> seeds = o.seeds;
  if (o.seed) seeds.push_back(*o.seed);
  if (seeds.empty()) seeds.push_back(cfg.seed);
  const auto specs = cfg.injector_specs();

  std::vector<SeedRun> runs;
  for (std::uint64_t seed : seeds) {
    SeedRun run;
    run.seed = seed;
    run.experiment = run_experiment(cfg.scenario, specs, cfg.training, seed);
    run.sweep = scale_sweep(cfg.scenario, cfg.fractions, specs, cfg.training, seed);
    write_report(seed_report_json(run, cfg), seed_report_path(o.out, seed));
    runs.push_back(std::move(run));
  }
  write_report(aggregate_report_json(runs, cfg), o.out);

  out << "injector median_image_accuracy median_text_accuracy (" << seeds.size() << " seeds)\n";
  std::vector<ExperimentReport> experiments;
  for (const auto& r : runs) experiments.push_back(r.experiment);
  for (const auto& e : aggregate(experiments)) {
    out << e.name << " " << fixed(e.median_image_accuracy, 4) << " "
        << fixed(e.median_text_accuracy, 4) << "\n";
  }
  return kExitOk;
}

/// Parses and executes one invocation. Messages go to `out`, errors to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cosine-similarity-bounded noise injection for embedding vectors", "arcsin"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  AugmentOptions aug;
  auto* augment = app.add_subcommand("augment", "Inject adaptive bounded noise into an embedding file");
  augment->add_option("--input", aug.input, "Input embedding file")->required();
  augment->add_option("--output", aug.output, "Output embedding file")->required();
  augment->add_option("--format", aug.format, "Embedding file format (text or binary)")
      ->capture_default_str()
      ->check(CLI::IsMember({"text", "binary"}));
  augment->add_option("--threshold", aug.threshold, "Target similarity s")->capture_default_str();
  augment->add_option("--epsilon", aug.epsilon, "Half-width of the similarity band")
      ->capture_default_str();
  augment->add_option("--pool", aug.pool, "Noise pool size")->capture_default_str();
  augment->add_option("--batch", aug.batch, "Rows per injection batch")->capture_default_str();
  augment->add_option("--alpha-fixed", aug.alpha_fixed,
                      "Use this fixed rotation angle (radians) and bypass the controller");
  augment->add_flag("--post-clamp", aug.post_clamp, "Clamp outputs to [-1, 1]");
  augment->add_option("--seed", aug.seed, "Random seed")->capture_default_str();

  CurveOptions curve_opts;
  auto* curve = app.add_subcommand("curve", "Export deviation bounds over y0 in [-1, 1]");
  curve->add_option("--alpha", curve_opts.alpha, "Rotation angle in radians, [0, pi/2]")->required();
  curve->add_option("--points", curve_opts.points, "Grid points")->capture_default_str();
  curve->add_option("--output", curve_opts.output, "Output CSV path")->required();
  curve->add_option("--seed", curve_opts.seed, "Random seed (unused; the curve is deterministic)")
      ->capture_default_str();

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Run the synthetic modality-gap experiment");
  simulate->add_option("--config", sim.config, "Run config file (key = value); defaults if omitted")
      ->check(CLI::ExistingFile);
  simulate->add_option("--out", sim.out, "Aggregate report path; per-seed reports are written beside it")
      ->required();
  simulate->add_option("--seeds", sim.seeds, "Master seeds, comma-separated (default: config seed)")
      ->delimiter(',');
  simulate->add_option("--seed", sim.seed, "Single master seed, appended to --seeds");

  StatsOptions st;
  auto* stats = app.add_subcommand("stats", "Per-row cosine similarity quantiles between two files");
  stats->add_option("--input", st.input, "Embedding file")->required();
  stats->add_option("--reference", st.reference, "Reference embedding file")->required();
  stats->add_option("--format", st.format, "Embedding file format (text or binary)")
      ->capture_default_str()
      ->check(CLI::IsMember({"text", "binary"}));
  stats->add_option("--seed", st.seed, "Random seed (unused; stats are deterministic)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*augment) {
      const auto s = augment_file(aug);
      out << "rows=" << s.rows << " batches=" << s.batches
          << " mean_similarity=" << fixed(s.mean_similarity)
          << " tail_mean_similarity=" << fixed(s.tail_mean_similarity)
          << " lower=" << fixed(s.lower) << " upper=" << fixed(s.upper) << "\n";
      return kExitOk;
    }
    if (*curve) {
      export_delta_curve(curve_opts.alpha, curve_opts.points, curve_opts.output);
      out << "wrote " << curve_opts.points << " points to " << curve_opts.output << "\n";
      return kExitOk;
    }
    if (*simulate) return run_simulate(sim, out);
    if (*stats) {
      const auto format = parse_format(st.format);
      const auto s = similarity_stats(read_embeddings(st.input, format),
                                      read_embeddings(st.reference, format));
      out << "min=" << fixed(s.min) << " p25=" << fixed(s.p25) << " median=" << fixed(s.median)
          << " p75=" << fixed(s.p75) << " max=" << fixed(s.max) << " mean=" << fixed(s.mean) << "\n";
      return kExitOk;
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace arcsin::cli

#endif  // ARCSIN_TOOLS_CLI_HPP
