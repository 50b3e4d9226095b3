#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace metent {

inline constexpr std::size_t kMaxDim = 8;

/// Axis-aligned box [lo_1, hi_1] x ... x [lo_d, hi_d] with 1 <= d <= 8.
class Rect {
 public:
  Rect(std::vector<double> lo, std::vector<double> hi);

  static Rect unit(std::size_t d);
  static Rect cube(std::size_t d, double a, double b);

  std::size_t dim() const { return lo_.size(); }
  const std::vector<double>& lo() const { return lo_; }
  const std::vector<double>& hi() const { return hi_; }
  double width(std::size_t i) const { return hi_[i] - lo_[i]; }
  double volume() const;

  bool contains(std::span<const double> x) const;
  bool interior(std::span<const double> x) const;
  bool is_unit() const;

  friend bool operator==(const Rect&, const Rect&) = default;

 private:
  std::vector<double> lo_;
  std::vector<double> hi_;
};

}  // namespace metent
