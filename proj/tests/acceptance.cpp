// Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails. Every tolerance is pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "arcsin/arcsin.hpp"
#include "arcsin_cli.hpp"
#include "oracle.hpp"

#ifndef ARCSIN_DEFAULT_CONFIG
#error "ARCSIN_DEFAULT_CONFIG must point at the shipped default config"
#endif

namespace fs = std::filesystem;
using namespace arcsin;

namespace {

// 1, 2
constexpr double kOracleTol = 1e-12;
constexpr double kFastSeconds = 1.0;
// 3
constexpr std::size_t kPropertyEntries = 100000;
// 4
constexpr std::size_t kPoolBatches = 500;
constexpr double kPoolAlpha = 0.5;
// 5
constexpr double kControllerBandLo = 0.85;
constexpr double kControllerBandHi = 0.95;
constexpr double kControllerFrozenLo = 0.89;  // frozen after the first run
constexpr double kControllerFrozenHi = 0.91;
constexpr double kControllerSeconds = 30.0;
// 6, 7
constexpr std::uint64_t kSeeds[] = {1, 2, 3, 4, 5};
constexpr double kGaussianSlack = 0.01;
constexpr double kTransferSeconds = 300.0;
// Medians observed on the first run; a drift beyond kFrozenTol flags a regression.
constexpr double kFrozenIdentity = 0.8635;
constexpr double kFrozenArcsin = 0.8640;
constexpr double kFrozenBestGaussian = 0.8650;
constexpr double kFrozenSweep[] = {0.8445, 0.8455, 0.8640};
constexpr double kFrozenTol = 0.0025;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << std::fixed << v;
  return os.str();
}

std::string sci(double v) {
  std::ostringstream os;
  os.precision(2);
  os << std::scientific << v;
  return os.str();
}

EmbeddingBatch unit_rows(SeededRng& rng, std::size_t rows, std::size_t cols) {
  auto x = gaussian_sample(rng, rows, cols);
  normalize_rows(x);
  return x;
}

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  std::vector<double> alphas;
  for (int i = 0; i * 0.05 < kHalfPi; ++i) alphas.push_back(i * 0.05);
  alphas.push_back(kHalfPi);
  double worst = 0.0;
  std::size_t points = 0;
  for (int i = -100; i <= 100; ++i) {
    const double y = i / 100.0;
    const oracle::Hp theta = asin(oracle::Hp(y));
    for (double a : alphas) {
      worst = std::max(worst, std::abs(delta_plus(y, a) - oracle::delta_plus_at(y, theta, a)));
      worst = std::max(worst, std::abs(delta_minus(y, a) - oracle::delta_minus_at(y, theta, a)));
      ++points;
    }
  }
  const double t = seconds_since(t0);
  return {worst <= kOracleTol && t < kFastSeconds,
          std::to_string(points) + " grid points, max_abs_err=" + sci(worst) + " (tol " +
              sci(kOracleTol) + "), " + fmt(t, 3) + " s (limit " + fmt(kFastSeconds, 1) + ")"};
}

Outcome rotation_identity() {
  const auto t0 = Clock::now();
  SeededRng rng(2);
  double worst_sin = 0.0, worst_cos = 0.0;
  for (int i = 0; i < 1000; ++i) {
    // Keep a small margin from the pole: the recovered cosine component
    // sqrt(1 - y'^2) amplifies rounding as y' approaches 1.
    const double theta = rng.uniform(-kHalfPi + 0.01, kHalfPi - 0.01);
    const double alpha = rng.uniform(0.0, std::min(kHalfPi, kHalfPi - theta - 0.01));
    const double y = std::sin(theta);
    const double moved = y + delta_plus(y, alpha);
    worst_sin = std::max(worst_sin, std::abs(std::sin(theta + alpha) - moved));
    const double before[] = {std::cos(theta), y};
    const double after[] = {std::sqrt((1.0 - moved) * (1.0 + moved)), moved};
    worst_cos = std::max(worst_cos, std::abs(cosine_sim(before, after) - std::cos(alpha)));
  }
  const double t = seconds_since(t0);
  return {worst_sin <= kOracleTol && worst_cos <= kOracleTol && t < kFastSeconds,
          "1000 pairs, max sin err=" + sci(worst_sin) + ", max cos err=" + sci(worst_cos) +
              " (tol " + sci(kOracleTol) + "), " + fmt(t, 3) + " s"};
}

Outcome injection_identity_and_bounds() {
  SeededRng rng(3);
  const std::size_t rows = 100, cols = kPropertyEntries / rows;
  EmbeddingBatch e(rows, cols);
  for (double& v : e.values()) v = rng.uniform(-1.0, 1.0);
  e.values()[0] = 1.0;
  e.values()[1] = -1.0;
  e.values()[2] = 0.0;

  const EmbeddingBatch zero(rows, cols);
  const bool xi_zero = inject_with_noise(e, 1.0, zero) == e;
  const bool alpha_zero = inject_plain(e, 0.0, rng) == e;

  std::size_t violations = 0;
  for (int trial = 0; trial < 4; ++trial) {
    const double alpha = std::vector<double>{0.1, 0.5, 1.0, kHalfPi}[trial];
    EmbeddingBatch xi = gaussian_sample(rng, rows, cols);
    xi = clamp_components(xi, -1.0, 1.0);
    const auto out = inject_with_noise(e, alpha, xi);
    for (std::size_t i = 0; i < e.values().size(); ++i) {
      const double y = e.values()[i];
      const double hi = y + delta_plus(y, alpha);
      const double lo = y + delta_minus(y, alpha);
      const double v = out.values()[i];
      if (!(v >= lo && v <= hi && lo >= -1.0 && hi <= 1.0)) ++violations;
    }
  }
  return {xi_zero && alpha_zero && violations == 0,
          std::string("xi=0 exact: ") + (xi_zero ? "yes" : "no") +
              ", alpha=0 exact: " + (alpha_zero ? "yes" : "no") + ", bound violations " +
              std::to_string(violations) + " / " + std::to_string(4 * kPropertyEntries)};
}

Outcome pool_behavior() {
  SeededRng data(4);
  const auto e = unit_rows(data, 16, 64);

  // N_p = 1 against plain injection on the same stream.
  SeededRng a(40), b(40);
  const auto plain = inject_plain(e, kPoolAlpha, a);
  const auto pooled = inject_with_pool(e, kPoolAlpha, build_noise_pool(e.rows(), 1, e.cols(), b));
  const bool same = plain == pooled.output;

  // Exhaustive dominance over every candidate.
  std::size_t dominance_failures = 0;
  SeededRng prng(41);
  for (std::size_t np = 1; np <= 16; ++np) {
    const auto pool = build_noise_pool(e.rows(), np, e.cols(), prng);
    const auto sel = inject_with_pool(e, kPoolAlpha, pool);
    for (const auto& candidate : pool) {
      const auto sims = batch_cosine_sim(e, inject_with_noise(e, kPoolAlpha, candidate));
      for (std::size_t r = 0; r < e.rows(); ++r) {
        if (sel.similarity[r] < sims[r]) ++dominance_failures;
      }
    }
  }

  // Mean selected similarity over seeded batches for N_p in {1, 4, 16}.
  std::vector<double> means;
  for (std::size_t np : {1u, 4u, 16u}) {
    SeededRng brng(42), nrng(43);
    double sum = 0.0;
    for (std::size_t i = 0; i < kPoolBatches; ++i) {
      const auto batch = unit_rows(brng, 16, 64);
      sum += mean(inject_with_pool(batch, kPoolAlpha, build_noise_pool(16, np, 64, nrng)).similarity);
    }
    means.push_back(sum / kPoolBatches);
  }
  const bool increasing = means[0] < means[1] && means[1] < means[2];
  return {same && dominance_failures == 0 && increasing,
          std::string("N_p=1 == plain: ") + (same ? "yes" : "no") + ", dominance failures " +
              std::to_string(dominance_failures) + ", mean sim N_p=1/4/16: " + fmt(means[0]) +
              " < " + fmt(means[1]) + " < " + fmt(means[2])};
}

Outcome controller_convergence() {
  const auto t0 = Clock::now();
  InjectorConfig cfg;
  cfg.threshold = 0.9;
  cfg.epsilon = 0.01;
  cfg.pool_size = 8;
  cfg.seed = 5;
  ArcSinInjector inj(cfg);
  SeededRng data(50);
  bool ordered = true;
  for (int i = 0; i < 500; ++i) {
    inj.forward(unit_rows(data, 64, 512));
    ordered = ordered && inj.state().lower <= inj.state().upper;
  }
  double tail = 0.0;
  const auto& trace = inj.trace();
  for (std::size_t i = trace.size() - 100; i < trace.size(); ++i) tail += trace[i].avg_similarity;
  tail /= 100.0;
  const double t = seconds_since(t0);
  const bool in_band = tail >= kControllerBandLo && tail <= kControllerBandHi;
  const bool in_frozen = tail >= kControllerFrozenLo && tail <= kControllerFrozenHi;
  return {in_band && in_frozen && ordered && t < kControllerSeconds,
          "trailing-100 mean=" + fmt(tail) + " (band [" + fmt(kControllerBandLo, 2) + ", " +
              fmt(kControllerBandHi, 2) + "], frozen [" + fmt(kControllerFrozenLo, 2) + ", " +
              fmt(kControllerFrozenHi, 2) + "]), lower<=upper always: " +
              (ordered ? "yes" : "no") + ", " + fmt(t, 1) + " s"};
}

// Shared by criteria 6 and 7: the full sweep on the shipped config. The
// fraction-1.0 entry is exactly run_experiment on the default scenario.
struct TransferRuns {
  RunConfig cfg;
  std::vector<std::vector<ExperimentReport>> sweeps;  // per seed, per fraction
  double seconds = 0.0;
};

const TransferRuns& transfer_runs() {
  static const TransferRuns runs = [] {
    TransferRuns r;
    const auto t0 = Clock::now();
    r.cfg = parse_config(ARCSIN_DEFAULT_CONFIG);
    for (std::uint64_t seed : kSeeds) {
      r.sweeps.push_back(
          scale_sweep(r.cfg.scenario, r.cfg.fractions, r.cfg.injector_specs(), r.cfg.training, seed));
    }
    r.seconds = seconds_since(t0);
    return r;
  }();
  return runs;
}

double median_image(const TransferRuns& r, std::size_t fraction_index, const std::string& name) {
  std::vector<double> v;
  for (const auto& sweep : r.sweeps) v.push_back(sweep.at(fraction_index).find(name)->image_accuracy);
  return median(v);
}

std::size_t full_fraction_index(const RunConfig& cfg) {
  const auto it = std::find(cfg.fractions.begin(), cfg.fractions.end(), 1.0);
  if (it == cfg.fractions.end()) throw InvalidArgument("default config must include fraction 1");
  return static_cast<std::size_t>(it - cfg.fractions.begin());
}

Outcome cross_modal_transfer() {
  const auto& r = transfer_runs();
  const std::size_t full = full_fraction_index(r.cfg);
  const double id = median_image(r, full, "identity");
  const double arc = median_image(r, full, "arcsin");
  double best = 0.0;
  std::string best_name;
  for (const auto& spec : r.cfg.injector_specs()) {
    if (spec.kind != InjectorKind::fixed_gaussian) continue;
    const double g = median_image(r, full, spec.name());
    if (g > best) {
      best = g;
      best_name = spec.name();
    }
  }
  const bool ordering = arc > id && arc >= best - kGaussianSlack;
  const bool frozen = std::abs(id - kFrozenIdentity) <= kFrozenTol &&
                      std::abs(arc - kFrozenArcsin) <= kFrozenTol &&
                      std::abs(best - kFrozenBestGaussian) <= kFrozenTol;
  return {ordering && frozen && r.seconds < kTransferSeconds,
          "median image acc: arcsin=" + fmt(arc) + " identity=" + fmt(id) + " best " + best_name +
              "=" + fmt(best) + "; arcsin-identity=" + fmt(arc - id) + ", arcsin-best=" +
              fmt(arc - best) + " (slack " + fmt(kGaussianSlack, 2) + "); frozen within " +
              fmt(kFrozenTol) + ": " + (frozen ? "yes" : "no") + "; " + fmt(r.seconds, 1) +
              " s for criteria 6+7"};
}

Outcome scale_sweep_monotone() {
  const auto& r = transfer_runs();
  std::string detail = "median arcsin image acc by fraction:";
  bool monotone = true, frozen = r.cfg.fractions.size() == std::size(kFrozenSweep);
  double prev = -1.0;
  for (std::size_t f = 0; f < r.cfg.fractions.size(); ++f) {
    const double m = median_image(r, f, "arcsin");
    detail += " " + format_shortest(r.cfg.fractions[f]) + "->" + fmt(m);
    monotone = monotone && m >= prev;
    if (frozen) frozen = std::abs(m - kFrozenSweep[f]) <= kFrozenTol;
    prev = m;
  }
  const bool expected_fractions = r.cfg.fractions == std::vector<double>{0.25, 0.5, 1.0};
  detail += std::string("; frozen: ") + (frozen ? "yes" : "no");
  return {monotone && frozen && expected_fractions, detail};
}

Outcome determinism_and_formats() {
  const auto dir = fs::temp_directory_path() / "arcsin_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::vector<std::string> failures;

  // Augmented files through the CLI, twice with the same seed.
  SeededRng data(8);
  write_embeddings(unit_rows(data, 500, 64), dir / "in.bin", EmbeddingFormat::binary);
  auto augment = [&](const std::string& out) {
    const std::string in = (dir / "in.bin").string(), o = (dir / out).string();
    const char* argv[] = {"arcsin", "augment", "--input", in.c_str(), "--output", o.c_str(),
                          "--seed", "17"};
    std::ostringstream sink;
    return cli::run(8, argv, sink, sink);
  };
  if (augment("a.bin") != 0 || augment("b.bin") != 0) failures.push_back("augment failed");
  if (read_file(dir / "a.bin") != read_file(dir / "b.bin")) failures.push_back("augment differs");

  // Reports.
  ScenarioConfig sc;
  sc.train_per_class = sc.test_per_class = 20;
  TrainingConfig tc;
  tc.epochs = 20;
  const std::vector<InjectorSpec> specs{InjectorSpec::identity(), InjectorSpec::gaussian(0.1),
                                        InjectorSpec::arc()};
  write_report(run_experiment(sc, specs, tc, 9), dir / "r1.json");
  write_report(run_experiment(sc, specs, tc, 9), dir / "r2.json");
  if (read_file(dir / "r1.json") != read_file(dir / "r2.json")) failures.push_back("report differs");

  // Binary round trip, bit-exact on float32-representable values.
  SeededRng frng(10);
  EmbeddingBatch f(37, 13);
  for (double& v : f.values()) v = static_cast<float>(frng.normal() * 10.0);
  f.values()[0] = std::numeric_limits<float>::denorm_min();
  f.values()[1] = -0.0;
  f.values()[2] = std::numeric_limits<float>::max();
  write_embeddings(f, dir / "f.bin", EmbeddingFormat::binary);
  const auto back = read_embeddings(dir / "f.bin", EmbeddingFormat::binary);
  bool bits = back.rows() == f.rows() && back.cols() == f.cols();
  for (std::size_t i = 0; bits && i < f.values().size(); ++i) {
    bits = std::signbit(back.values()[i]) == std::signbit(f.values()[i]) &&
           back.values()[i] == f.values()[i];
  }
  write_embeddings(back, dir / "g.bin", EmbeddingFormat::binary);
  if (!bits || read_file(dir / "f.bin") != read_file(dir / "g.bin")) {
    failures.push_back("binary round trip");
  }

  // Config round trip, default and shipped.
  for (const RunConfig& c : {RunConfig{}, parse_config(ARCSIN_DEFAULT_CONFIG)}) {
    const std::string text = format_config(c);
    if (!(parse_config_text(text) == c) || format_config(parse_config_text(text)) != text) {
      failures.push_back("config round trip");
    }
  }
  fs::remove_all(dir);

  std::string detail = "augment files, reports, binary round trip, config round trip";
  if (!failures.empty()) {
    detail += "; failed:";
    for (const auto& f : failures) detail += " " + f + ";";
  }
  return {failures.empty(), detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"delta-bound oracle equivalence", oracle_equivalence},
      {"2D rotation identity", rotation_identity},
      {"injection identity and bounds", injection_identity_and_bounds},
      {"pool behavior", pool_behavior},
      {"controller convergence", controller_convergence},
      {"synthetic cross-modal transfer", cross_modal_transfer},
      {"scale sweep", scale_sweep_monotone},
      {"determinism and formats", determinism_and_formats},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
