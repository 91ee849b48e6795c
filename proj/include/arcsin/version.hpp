#ifndef ARCSIN_VERSION_HPP
#define ARCSIN_VERSION_HPP

namespace arcsin {

inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace arcsin

#endif  // ARCSIN_VERSION_HPP
