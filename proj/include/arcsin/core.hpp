#ifndef ARCSIN_CORE_HPP
#define ARCSIN_CORE_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "arcsin/errors.hpp"
#include "arcsin/rng.hpp"

namespace arcsin {

/// Anything that yields standard-normal doubles. `SeededRng` is the
/// production source; tests substitute fixed streams.
template <typename G>
concept NormalSource = requires(G& g) {
  { g.normal() } -> std::convertible_to<double>;
};

/// Dense row-major B×C matrix of finite doubles. Rows are batch items.
class EmbeddingBatch {
 public:
  EmbeddingBatch() = default;

  EmbeddingBatch(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(checked_size(rows, cols), fill) {
    require_finite_value(fill);
  }

  EmbeddingBatch(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != checked_size(rows, cols)) {
      throw ShapeError("EmbeddingBatch: data size " + std::to_string(data_.size()) +
                       " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
      if (!std::isfinite(data_[i])) {
        throw InvalidArgument("EmbeddingBatch: non-finite value at row " +
                              std::to_string(i / cols) + ", column " + std::to_string(i % cols));
      }
    }
  }

  EmbeddingBatch(std::initializer_list<std::initializer_list<double>> rows) {
    if (rows.size() == 0 || rows.begin()->size() == 0) {
      throw InvalidArgument("EmbeddingBatch: needs at least one row and one column");
    }
    rows_ = rows.size();
    cols_ = rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw ShapeError("EmbeddingBatch: ragged initializer");
      for (double v : r) {
        require_finite_value(v);
        data_.push_back(v);
      }
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool same_shape(const EmbeddingBatch& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const EmbeddingBatch&, const EmbeddingBatch&) = default;

 private:
  static std::size_t checked_size(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) {
      throw InvalidArgument("EmbeddingBatch: rows and cols must be >= 1 (got " +
                            std::to_string(rows) + "x" + std::to_string(cols) + ")");
    }
    return rows * cols;
  }

  static void require_finite_value(double v) {
    if (!std::isfinite(v)) throw InvalidArgument("EmbeddingBatch: non-finite value");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline void require_same_shape(const EmbeddingBatch& a, const EmbeddingBatch& b, const char* where) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(where) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
}

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double l2_norm(std::span<const double> v) noexcept { return std::sqrt(dot(v, v)); }

/// ⟨a,b⟩ / (‖a‖‖b‖). Throws DegenerateInput on a zero-norm operand.
inline double cosine_sim(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeError("cosine_sim: length mismatch " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
  if (a.empty()) throw InvalidArgument("cosine_sim: empty vectors");
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) throw DegenerateInput("cosine_sim: zero-norm vector");
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

inline double cosine_sim(std::initializer_list<double> a, std::initializer_list<double> b) {
  return cosine_sim(std::span<const double>(a.begin(), a.size()),
                    std::span<const double>(b.begin(), b.size()));
}

inline std::vector<double> batch_cosine_sim(const EmbeddingBatch& a, const EmbeddingBatch& b) {
  require_same_shape(a, b, "batch_cosine_sim");
  std::vector<double> out(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    try {
      out[r] = cosine_sim(a.row(r), b.row(r));
    } catch (const DegenerateInput&) {
      throw DegenerateInput("batch_cosine_sim: zero-norm row " + std::to_string(r));
    }
  }
  return out;
}

inline std::vector<double> l2_normalize(std::span<const double> v) {
  const double n = l2_norm(v);
  if (v.empty() || n == 0.0) throw DegenerateInput("l2_normalize: zero vector");
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x /= n;
  return out;
}

inline std::vector<double> l2_normalize(std::initializer_list<double> v) {
  return l2_normalize(std::span<const double>(v.begin(), v.size()));
}

// Normalizes each row in place.
inline void normalize_rows(EmbeddingBatch& x) {
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    const double n = l2_norm(row);
    if (n == 0.0) throw DegenerateInput("normalize_rows: zero-norm row " + std::to_string(r));
    for (double& v : row) v /= n;
  }
}

template <NormalSource G>
EmbeddingBatch gaussian_sample(G& rng, std::size_t rows, std::size_t cols) {
  EmbeddingBatch out(rows, cols);
  for (double& v : out.values()) v = rng.normal();
  return out;
}

inline EmbeddingBatch clamp_components(EmbeddingBatch x, double lo, double hi) {
  if (!(lo < hi)) throw InvalidArgument("clamp_components: requires lo < hi");
  for (double& v : x.values()) v = std::min(hi, std::max(lo, v));
  return x;
}

inline double mean(std::span<const double> v) {
  if (v.empty()) throw InvalidArgument("mean: empty input");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace arcsin

#endif  // ARCSIN_CORE_HPP
