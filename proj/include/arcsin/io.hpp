#ifndef ARCSIN_IO_HPP
#define ARCSIN_IO_HPP

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "arcsin/bounds.hpp"
#include "arcsin/core.hpp"

namespace arcsin {

enum class EmbeddingFormat { text, binary };

inline EmbeddingFormat parse_format(std::string_view name) {
  if (name == "text") return EmbeddingFormat::text;
  if (name == "binary") return EmbeddingFormat::binary;
  throw InvalidArgument("unknown embedding format '" + std::string(name) +
                        "' (expected text or binary)");
}

inline constexpr std::array<char, 4> kBinaryMagic{'A', 'R', 'S', 'N'};
inline constexpr std::string_view kTextMagic = "ARSN-TEXT";
inline constexpr std::uint32_t kFormatVersion = 1;

// Shortest representation that parses back to the same value.
template <typename T>
std::string format_shortest(T value) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

/// Writes `contents` to a sibling temporary file, then renames it over
/// `path`, so readers never observe a partial file.
inline void atomic_write(const std::filesystem::path& path, std::string_view contents) {
  namespace fs = std::filesystem;
  std::random_device rd;
  const fs::path tmp = path.string() + ".tmp." + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace detail {

inline float to_storage(double v, std::size_t r, std::size_t c) {
  const auto f = static_cast<float>(v);
  if (!std::isfinite(f)) {
    throw InvalidArgument("value at row " + std::to_string(r) + ", column " + std::to_string(c) +
                          " does not fit a 32-bit float");
  }
  return f;
}

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

inline std::uint32_t get_u32(std::string_view in, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  }
  return v;
}

inline std::string encode_binary(const EmbeddingBatch& batch) {
  if (batch.rows() > std::numeric_limits<std::uint32_t>::max() ||
      batch.cols() > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("embedding shape exceeds 32-bit header fields");
  }
  std::string out(kBinaryMagic.begin(), kBinaryMagic.end());
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(batch.rows()));
  put_u32(out, static_cast<std::uint32_t>(batch.cols()));
  out.reserve(out.size() + 4 * batch.rows() * batch.cols());
  for (std::size_t r = 0; r < batch.rows(); ++r) {
    for (std::size_t c = 0; c < batch.cols(); ++c) {
      put_u32(out, std::bit_cast<std::uint32_t>(to_storage(batch(r, c), r, c)));
    }
  }
  return out;
}

inline EmbeddingBatch decode_binary(std::string_view in) {
  constexpr std::size_t kHeader = 16;
  if (in.size() < kHeader || !std::equal(kBinaryMagic.begin(), kBinaryMagic.end(), in.begin())) {
    throw FormatError("binary embeddings: missing ARSN header");
  }
  const std::uint32_t version = get_u32(in, 4);
  if (version != kFormatVersion) {
    throw FormatError("binary embeddings: unsupported version " + std::to_string(version));
  }
  const std::size_t rows = get_u32(in, 8);
  const std::size_t cols = get_u32(in, 12);
  if (rows == 0 || cols == 0) throw FormatError("binary embeddings: empty shape in header");
  const std::size_t expected = kHeader + 4 * rows * cols;
  if (in.size() != expected) {
    throw FormatError("binary embeddings: header declares " + std::to_string(rows) + "x" +
                      std::to_string(cols) + " (" + std::to_string(expected) +
                      " bytes) but file has " + std::to_string(in.size()) + " bytes");
  }
  std::vector<double> values(rows * cols);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const float f = std::bit_cast<float>(get_u32(in, kHeader + 4 * i));
    if (!std::isfinite(f)) {
      throw FormatError("binary embeddings: non-finite value at row " + std::to_string(i / cols) +
                        ", column " + std::to_string(i % cols));
    }
    values[i] = f;
  }
  return EmbeddingBatch(rows, cols, std::move(values));
}

inline std::string encode_text(const EmbeddingBatch& batch) {
  std::string out = std::string(kTextMagic) + " " + std::to_string(kFormatVersion) + " " +
                    std::to_string(batch.rows()) + " " + std::to_string(batch.cols()) + "\n";
  for (std::size_t r = 0; r < batch.rows(); ++r) {
    for (std::size_t c = 0; c < batch.cols(); ++c) {
      if (c) out.push_back(',');
      out += format_shortest(to_storage(batch(r, c), r, c));
    }
    out.push_back('\n');
  }
  return out;
}

inline std::size_t parse_size(std::string_view token, const char* what) {
  std::size_t v = 0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
    throw FormatError(std::string("text embeddings: bad ") + what + " '" + std::string(token) + "'");
  }
  return v;
}

inline EmbeddingBatch decode_text(std::string_view in) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < in.size()) {
    std::size_t end = in.find('\n', pos);
    if (end == std::string_view::npos) end = in.size();
    std::string_view line = in.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = end + 1;
  }
  if (lines.empty()) throw FormatError("text embeddings: empty file");

  std::istringstream header{std::string(lines[0])};
  std::string magic, version, rows_tok, cols_tok, extra;
  header >> magic >> version >> rows_tok >> cols_tok;
  if (magic != kTextMagic || cols_tok.empty() || (header >> extra)) {
    throw FormatError("text embeddings: malformed header '" + std::string(lines[0]) +
                      "' (expected 'ARSN-TEXT 1 <rows> <cols>')");
  }
  if (parse_size(version, "version") != kFormatVersion) {
    throw FormatError("text embeddings: unsupported version " + version);
  }
  const std::size_t rows = parse_size(rows_tok, "row count");
  const std::size_t cols = parse_size(cols_tok, "column count");
  if (rows == 0 || cols == 0) throw FormatError("text embeddings: empty shape in header");

  // Trailing blank lines are tolerated.
  while (lines.size() > 1 && lines.back().empty()) lines.pop_back();
  if (lines.size() - 1 != rows) {
    throw FormatError("text embeddings: header declares " + std::to_string(rows) +
                      " rows but file has " + std::to_string(lines.size() - 1));
  }

  std::vector<double> values;
  values.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    std::string_view line = lines[r + 1];
    std::size_t col = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string_view tok =
          line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      if (col >= cols) {
        throw FormatError("text embeddings: row " + std::to_string(r) + " has more than " +
                          std::to_string(cols) + " columns");
      }
      float f = 0.0f;
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), f);
      if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size() || !std::isfinite(f)) {
        throw FormatError("text embeddings: invalid or non-finite value '" + std::string(tok) +
                          "' at row " + std::to_string(r) + ", column " + std::to_string(col));
      }
      values.push_back(f);
      ++col;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (col != cols) {
      throw FormatError("text embeddings: row " + std::to_string(r) + " has " +
                        std::to_string(col) + " columns, header declares " + std::to_string(cols));
    }
  }
  return EmbeddingBatch(rows, cols, std::move(values));
}

}  // namespace detail

inline void write_embeddings(const EmbeddingBatch& batch, const std::filesystem::path& path,
                             EmbeddingFormat format) {
  if (batch.empty()) throw InvalidArgument("write_embeddings: empty batch");
  atomic_write(path, format == EmbeddingFormat::binary ? detail::encode_binary(batch)
                                                       : detail::encode_text(batch));
}

inline EmbeddingBatch read_embeddings(const std::filesystem::path& path, EmbeddingFormat format) {
  const std::string contents = read_file(path);
  return format == EmbeddingFormat::binary ? detail::decode_binary(contents)
                                           : detail::decode_text(contents);
}

struct DeltaCurvePoint {
  double y0;
  double plus;
  double minus;
};

// Uniform grid on [-1, 1]; the endpoints are exact.
inline std::vector<DeltaCurvePoint> delta_curve(double alpha, std::size_t grid_points) {
  require_angle(alpha, "delta_curve");
  if (grid_points < 2) throw InvalidArgument("delta_curve: grid_points must be >= 2");
  std::vector<DeltaCurvePoint> pts;
  pts.reserve(grid_points);
  const double step = 2.0 / static_cast<double>(grid_points - 1);
  for (std::size_t i = 0; i < grid_points; ++i) {
    double y = i + 1 == grid_points ? 1.0 : -1.0 + step * static_cast<double>(i);
    y = std::min(1.0, y);
    pts.push_back({y, delta_plus(y, alpha), delta_minus(y, alpha)});
  }
  return pts;
}

inline std::string format_delta_curve(const std::vector<DeltaCurvePoint>& pts) {
  std::string out = "y0,delta_plus,delta_minus\n";
  for (const auto& p : pts) {
    out += format_shortest(p.y0) + "," + format_shortest(p.plus) + "," + format_shortest(p.minus) +
           "\n";
  }
  return out;
}

inline void export_delta_curve(double alpha, std::size_t grid_points,
                               const std::filesystem::path& path) {
  atomic_write(path, format_delta_curve(delta_curve(alpha, grid_points)));
}

}  // namespace arcsin

#endif  // ARCSIN_IO_HPP
