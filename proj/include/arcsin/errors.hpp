#ifndef ARCSIN_ERRORS_HPP
#define ARCSIN_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace arcsin {

// Invalid argument to a numeric routine (domain, size or shape).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Shapes of two operands disagree.
class ShapeError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Zero-norm vector where a direction is required.
class DegenerateInput : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Malformed embedding file, config or report input.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public InvalidArgument {
 public:
  ConfigError(std::size_t line, const std::string& key, const std::string& what)
      : InvalidArgument("line " + std::to_string(line) + ": key '" + key + "': " + what),
        line_(line),
        key_(key) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  std::size_t line_;
  std::string key_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrainingDiverged : public std::runtime_error {
 public:
  explicit TrainingDiverged(std::size_t epoch)
      : std::runtime_error("training diverged: non-finite loss at epoch " + std::to_string(epoch)),
        epoch_(epoch) {}

  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

}  // namespace arcsin

#endif  // ARCSIN_ERRORS_HPP
