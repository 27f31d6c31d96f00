#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdrl {

using Vec = std::vector<double>;

// Thrown on malformed configuration; `field` carries the dotted key path.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class ShapeError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool all_finite(std::span<const double> xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

inline void require_finite(std::span<const double> xs, const char* what) {
  if (!all_finite(xs)) throw NumericError(std::string(what) + ": non-finite value");
}

inline void require_shape(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

inline double clamp(double x, double lo, double hi) {
  return x < lo ? lo : (x > hi ? hi : x);
}

}  // namespace cdrl
