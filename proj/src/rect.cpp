#include "metent/rect.hpp"

#include <cmath>
#include <string>

#include "metent/errors.hpp"

namespace metent {

Rect::Rect(std::vector<double> lo, std::vector<double> hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size()) throw ParameterError("Rect: lo and hi differ in dimension");
  if (lo_.empty() || lo_.size() > kMaxDim)
    throw ParameterError("Rect: dimension must be in [1, 8], got " + std::to_string(lo_.size()));
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    if (!std::isfinite(lo_[i]) || !std::isfinite(hi_[i]) || !(lo_[i] < hi_[i]))
      throw ParameterError("Rect: need finite lo[i] < hi[i] on axis " + std::to_string(i));
  }
}

Rect Rect::unit(std::size_t d) { return cube(d, 0.0, 1.0); }

Rect Rect::cube(std::size_t d, double a, double b) {
  return Rect(std::vector<double>(d, a), std::vector<double>(d, b));
}

double Rect::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < dim(); ++i) v *= width(i);
  return v;
}

bool Rect::contains(std::span<const double> x) const {
  if (x.size() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i)
    if (!(x[i] >= lo_[i] && x[i] <= hi_[i])) return false;
  return true;
}

bool Rect::interior(std::span<const double> x) const {
  if (x.size() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i)
    if (!(x[i] > lo_[i] && x[i] < hi_[i])) return false;
  return true;
}

bool Rect::is_unit() const {
  for (std::size_t i = 0; i < dim(); ++i)
    if (lo_[i] != 0.0 || hi_[i] != 1.0) return false;
  return true;
}

}  // namespace metent
