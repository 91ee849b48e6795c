#ifndef ARCSIN_BOUNDS_HPP
#define ARCSIN_BOUNDS_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "arcsin/errors.hpp"

namespace arcsin {

inline constexpr double kHalfPi = std::numbers::pi / 2.0;

inline void require_component(double y, const char* where) {
  if (!(y >= -1.0 && y <= 1.0)) {
    throw InvalidArgument(std::string(where) + ": component " + std::to_string(y) +
                          " outside [-1, 1]");
  }
}

inline void require_angle(double alpha, const char* where) {
  if (!(alpha >= 0.0 && alpha <= kHalfPi)) {
    throw InvalidArgument(std::string(where) + ": angle " + std::to_string(alpha) +
                          " outside [0, pi/2]");
  }
}

namespace detail {

struct DeviationPair {
  double plus;
  double minus;
};

// Both bounds from one arcsin evaluation; arguments are assumed valid and
// alpha > 0.
inline DeviationPair deviation_pair(double y, double alpha) noexcept {
  const double theta = std::asin(y);
  const double up = theta + alpha < kHalfPi ? std::clamp(std::sin(theta + alpha) - y, 0.0, 1.0 - y)
                                            : 1.0 - y;
  const double down = theta - alpha > -kHalfPi
                          ? std::clamp(std::sin(theta - alpha) - y, -1.0 - y, 0.0)
                          : -1.0 - y;
  return {up, down};
}

}  // namespace detail

// Largest upward change of a unit-circle component y = sin(theta) when theta
// is rotated by at most alpha. Saturates at 1 - y once theta + alpha reaches
// pi/2. Result lies in [0, 1 - y].
inline double delta_plus(double y, double alpha) {
  require_component(y, "delta_plus");
  require_angle(alpha, "delta_plus");
  if (alpha == 0.0) return 0.0;
  return detail::deviation_pair(y, alpha).plus;
}

// Mirror of delta_plus for downward rotation. Result lies in [-1 - y, 0].
inline double delta_minus(double y, double alpha) {
  require_component(y, "delta_minus");
  require_angle(alpha, "delta_minus");
  if (alpha == 0.0) return 0.0;
  return detail::deviation_pair(y, alpha).minus;
}

// Single-entry injection rule: positive draws scale the upward bound,
// negative draws the downward one.
inline double inject_component(double y, double dplus, double dminus, double xi) noexcept {
  return xi >= 0.0 ? y + dplus * xi : y - dminus * xi;
}

}  // namespace arcsin

#endif  // ARCSIN_BOUNDS_HPP
