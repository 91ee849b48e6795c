#ifndef ARCSIN_CONFIG_HPP
#define ARCSIN_CONFIG_HPP

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "arcsin/experiment.hpp"
#include "arcsin/io.hpp"

namespace arcsin {

/// Every tunable of a run, in one flat document of `key = value` lines.
/// Blank lines and lines starting with '#' are ignored. Lists are
/// comma-separated; an empty value is an empty list.
struct RunConfig {
  std::uint64_t seed = 1;

  InjectorConfig injector{};
  BaselineConfig baseline{BaselineKind::fixed_gaussian, 0.1, 0};
  std::vector<double> gaussian_sweep{};  // replaces baseline.scale when non-empty

  ScenarioConfig scenario{};
  TrainingConfig training{};

  std::vector<std::string> injectors{"identity", "gaussian", "arcsin"};
  std::vector<double> fractions{};

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  /// Expands the injector names into concrete specs. "gaussian" becomes one
  /// spec per sweep scale, or the single baseline scale.
  std::vector<InjectorSpec> injector_specs() const {
    std::vector<InjectorSpec> specs;
    for (const auto& name : injectors) {
      if (name == "identity") {
        specs.push_back(InjectorSpec::identity());
      } else if (name == "gaussian") {
        if (gaussian_sweep.empty()) {
          specs.push_back(InjectorSpec::gaussian(baseline.scale));
        } else {
          for (double s : gaussian_sweep) specs.push_back(InjectorSpec::gaussian(s));
        }
      } else if (name == "arcsin") {
        specs.push_back(InjectorSpec::arc(injector));
      } else {
        throw InvalidArgument("unknown injector '" + name + "'");
      }
    }
    return specs;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  if constexpr (std::is_unsigned_v<T>) {
    if (s.front() == '-' || s.front() == '+') return false;
  }
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

inline std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> items;
  if (trim(s).empty()) return items;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    items.push_back(trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                         : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

struct KeyContext {
  std::size_t line;
  std::string key;

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(line, key, what); }
};

inline std::size_t as_size(const KeyContext& ctx, std::string_view v, std::size_t min_value) {
  std::size_t out = 0;
  if (!parse_number(v, out)) ctx.fail("expected a non-negative integer, got '" + std::string(v) + "'");
  if (out < min_value) ctx.fail("must be >= " + std::to_string(min_value));
  return out;
}

inline double as_double(const KeyContext& ctx, std::string_view v) {
  double out = 0.0;
  if (!parse_number(v, out) || !std::isfinite(out)) {
    ctx.fail("expected a finite number, got '" + std::string(v) + "'");
  }
  return out;
}

inline bool as_bool(const KeyContext& ctx, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  ctx.fail("expected true or false, got '" + std::string(v) + "'");
}

inline std::vector<double> as_double_list(const KeyContext& ctx, std::string_view v) {
  std::vector<double> out;
  for (auto item : split_list(v)) out.push_back(as_double(ctx, item));
  return out;
}

}  // namespace detail

/// Parses a config document; missing keys keep their defaults. Errors name
/// the offending line and key.
inline RunConfig parse_config_text(std::string_view text) {
  using detail::KeyContext;
  RunConfig cfg;
  using Setter = std::function<void(const KeyContext&, std::string_view)>;
  const std::map<std::string, Setter, std::less<>> setters{
      {"seed",
       [&](const KeyContext& c, std::string_view v) {
         if (!detail::parse_number(v, cfg.seed)) c.fail("expected an unsigned 64-bit integer");
       }},
      {"threshold",
       [&](const KeyContext& c, std::string_view v) {
         cfg.injector.threshold = detail::as_double(c, v);
         if (!(cfg.injector.threshold > 0.0 && cfg.injector.threshold < 1.0)) c.fail("must lie in (0, 1)");
       }},
      {"epsilon",
       [&](const KeyContext& c, std::string_view v) {
         cfg.injector.epsilon = detail::as_double(c, v);
         if (!(cfg.injector.epsilon > 0.0)) c.fail("must be > 0");
       }},
      {"pool_size",
       [&](const KeyContext& c, std::string_view v) { cfg.injector.pool_size = detail::as_size(c, v, 1); }},
      {"post_clamp",
       [&](const KeyContext& c, std::string_view v) { cfg.injector.post_clamp = detail::as_bool(c, v); }},
      {"gaussian_scale",
       [&](const KeyContext& c, std::string_view v) {
         cfg.baseline.scale = detail::as_double(c, v);
         if (cfg.baseline.scale < 0.0) c.fail("must be >= 0");
       }},
      {"gaussian_sweep",
       [&](const KeyContext& c, std::string_view v) {
         cfg.gaussian_sweep = detail::as_double_list(c, v);
         for (double s : cfg.gaussian_sweep) {
           if (s < 0.0) c.fail("scales must be >= 0");
         }
       }},
      {"dim", [&](const KeyContext& c, std::string_view v) { cfg.scenario.dim = detail::as_size(c, v, 1); }},
      {"num_classes",
       [&](const KeyContext& c, std::string_view v) { cfg.scenario.num_classes = detail::as_size(c, v, 1); }},
      {"train_per_class",
       [&](const KeyContext& c, std::string_view v) {
         cfg.scenario.train_per_class = detail::as_size(c, v, 1);
       }},
      {"test_per_class",
       [&](const KeyContext& c, std::string_view v) {
         cfg.scenario.test_per_class = detail::as_size(c, v, 1);
       }},
      {"text_noise_sigma",
       [&](const KeyContext& c, std::string_view v) {
         cfg.scenario.text_noise_sigma = detail::as_double(c, v);
         if (cfg.scenario.text_noise_sigma < 0.0) c.fail("must be >= 0");
       }},
      {"image_noise_sigma",
       [&](const KeyContext& c, std::string_view v) {
         cfg.scenario.image_noise_sigma = detail::as_double(c, v);
         if (cfg.scenario.image_noise_sigma < 0.0) c.fail("must be >= 0");
       }},
      {"gap_magnitude",
       [&](const KeyContext& c, std::string_view v) {
         cfg.scenario.gap_magnitude = detail::as_double(c, v);
         if (cfg.scenario.gap_magnitude < 0.0) c.fail("must be >= 0");
       }},
      {"epochs", [&](const KeyContext& c, std::string_view v) { cfg.training.epochs = detail::as_size(c, v, 1); }},
      {"learning_rate",
       [&](const KeyContext& c, std::string_view v) {
         cfg.training.learning_rate = detail::as_double(c, v);
         if (!(cfg.training.learning_rate > 0.0)) c.fail("must be > 0");
       }},
      {"batch_size",
       [&](const KeyContext& c, std::string_view v) { cfg.training.batch_size = detail::as_size(c, v, 1); }},
      {"injectors",
       [&](const KeyContext& c, std::string_view v) {
         cfg.injectors.clear();
         for (auto item : detail::split_list(v)) {
           if (item != "identity" && item != "gaussian" && item != "arcsin") {
             c.fail("unknown injector '" + std::string(item) + "' (expected identity, gaussian, arcsin)");
           }
           cfg.injectors.emplace_back(item);
         }
         if (cfg.injectors.empty()) c.fail("at least one injector required");
       }},
      {"fractions",
       [&](const KeyContext& c, std::string_view v) {
         cfg.fractions = detail::as_double_list(c, v);
         for (double f : cfg.fractions) {
           if (!(f > 0.0 && f <= 1.0)) c.fail("fractions must lie in (0, 1]");
         }
       }},
  };

  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = detail::trim(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(line_no, std::string(line), "expected 'key = value'");
    }
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    const KeyContext ctx{line_no, key};
    const auto it = setters.find(key);
    if (it == setters.end()) ctx.fail("unknown key");
    if (!seen.insert(key).second) ctx.fail("duplicate key");
    it->second(ctx, value);
  }

  if (!(cfg.injector.epsilon < std::min(cfg.injector.threshold, 1.0 - cfg.injector.threshold))) {
    throw ConfigError(0, "epsilon", "must be smaller than min(threshold, 1 - threshold)");
  }
  for (double f : cfg.fractions) {
    if (scaled_count(cfg.scenario.train_per_class, f) == 0) {
      throw ConfigError(0, "fractions", "fraction " + format_shortest(f) + " leaves no training rows");
    }
  }
  return cfg;
}

inline RunConfig parse_config(const std::filesystem::path& path) {
  return parse_config_text(read_file(path));
}

/// Canonical text form; parse_config_text(format_config(c)) == c.
inline std::string format_config(const RunConfig& cfg) {
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_shortest(v[i]);
    return s;
  };
  std::string names;
  for (std::size_t i = 0; i < cfg.injectors.size(); ++i) names += (i ? "," : "") + cfg.injectors[i];

  std::string out;
  auto put = [&](std::string_view key, const std::string& value) {
    out += std::string(key) + " = " + value + "\n";
  };
  put("seed", std::to_string(cfg.seed));
  put("threshold", format_shortest(cfg.injector.threshold));
  put("epsilon", format_shortest(cfg.injector.epsilon));
  put("pool_size", std::to_string(cfg.injector.pool_size));
  put("post_clamp", cfg.injector.post_clamp ? "true" : "false");
  put("gaussian_scale", format_shortest(cfg.baseline.scale));
  put("gaussian_sweep", list(cfg.gaussian_sweep));
  put("dim", std::to_string(cfg.scenario.dim));
  put("num_classes", std::to_string(cfg.scenario.num_classes));
  put("train_per_class", std::to_string(cfg.scenario.train_per_class));
  put("test_per_class", std::to_string(cfg.scenario.test_per_class));
  put("text_noise_sigma", format_shortest(cfg.scenario.text_noise_sigma));
  put("image_noise_sigma", format_shortest(cfg.scenario.image_noise_sigma));
  put("gap_magnitude", format_shortest(cfg.scenario.gap_magnitude));
  put("epochs", std::to_string(cfg.training.epochs));
  put("learning_rate", format_shortest(cfg.training.learning_rate));
  put("batch_size", std::to_string(cfg.training.batch_size));
  put("injectors", names);
  put("fractions", list(cfg.fractions));
  return out;
}

}  // namespace arcsin

#endif  // ARCSIN_CONFIG_HPP
