#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "metent/rect.hpp"

namespace metent {

enum class QuadratureRule { midpoint, trapezoid };

std::string to_string(QuadratureRule r);
QuadratureRule quadrature_rule_from_string(const std::string& s);

inline constexpr std::size_t kMaxGridNodes = 10'000'000;

/// n points per axis. Midpoint places nodes at cell centres; trapezoid uses
/// the n vertices including both endpoints.
struct GridSpec {
  std::size_t n = 101;
  QuadratureRule rule = QuadratureRule::midpoint;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Tensor-product quadrature grid over a rectangle. Node k (flat) has
/// multi-index digits in base n with axis 0 varying fastest.
class TensorGrid {
 public:
  TensorGrid(const Rect& domain, GridSpec spec);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return size_; }
  std::size_t n() const { return spec_.n; }
  const GridSpec& spec() const { return spec_; }

  double coord(std::size_t axis, std::size_t i) const { return coords_[axis][i]; }
  double weight(std::size_t axis, std::size_t i) const { return weights_[axis][i]; }

  // Writes the coordinates of flat node k into x and returns its weight.
  double node(std::size_t k, double* x) const;

  // Multi-index stepping used by the kernels to avoid per-node division.
  void decode(std::size_t k, std::size_t* idx) const;
  void fill(const std::size_t* idx, double* x) const;
  double weight_of(const std::size_t* idx) const;
  static void advance(std::size_t* idx, std::size_t d, std::size_t n);

 private:
  std::size_t dim_;
  std::size_t size_;
  GridSpec spec_;
  std::vector<std::vector<double>> coords_;
  std::vector<std::vector<double>> weights_;
};

/// Vertex-grid nodes (n per axis, endpoints included) as a flat N x d array.
std::vector<double> vertex_nodes(const Rect& domain, std::size_t n);

/// n^d, or throws ParameterError when it exceeds kMaxGridNodes.
std::size_t checked_node_count(std::size_t n, std::size_t d);

}  // namespace metent
