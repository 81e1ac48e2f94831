#pragma once

#include <cmath>
#include <limits>
#include <ostream>

namespace uot {

// A real number or +inf. Sums saturate at +inf; -inf never arises.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double v) : value_(v) {}  // NOLINT(google-explicit-constructor)

  static constexpr ExtendedReal infinity() { return ExtendedReal(std::numeric_limits<double>::infinity()); }

  bool is_infinite() const { return std::isinf(value_) && value_ > 0; }
  bool is_finite() const { return std::isfinite(value_); }
  double value() const { return value_; }

  ExtendedReal& operator+=(ExtendedReal other) {
    if (is_infinite() || other.is_infinite())
      value_ = std::numeric_limits<double>::infinity();
    else
      value_ += other.value_;
    return *this;
  }
  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b) { return a += b; }

  // Scaling by a nonnegative factor; 0 * inf = 0 (measure-theoretic convention).
  friend ExtendedReal operator*(double k, ExtendedReal a) {
    if (k == 0.0) return ExtendedReal(0.0);
    if (a.is_infinite()) return a;
    return ExtendedReal(k * a.value_);
  }

  friend bool operator==(ExtendedReal a, ExtendedReal b) { return a.value_ == b.value_; }
  friend bool operator<(ExtendedReal a, ExtendedReal b) { return a.value_ < b.value_; }
  friend std::ostream& operator<<(std::ostream& os, ExtendedReal a) {
    if (a.is_infinite()) return os << "+inf";
    return os << a.value_;
  }

 private:
  double value_ = 0.0;
};

}  // namespace uot
