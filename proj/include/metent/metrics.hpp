#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "metent/convex_function.hpp"
#include "metent/grid.hpp"

namespace metent {

struct MetricDescriptor {
  enum class Kind { lp, linf_grid, hausdorff_epigraph };

  Kind kind = Kind::lp;
  double p = 1.0;                  // lp only
  double bound = 1.0;              // hausdorff only: the epigraph cap B
  std::size_t n_directions = 0;    // hausdorff only

  static MetricDescriptor lp(double p) { return {Kind::lp, p, 1.0, 0}; }
  static MetricDescriptor linf_grid() { return {Kind::linf_grid, 0.0, 1.0, 0}; }
  static MetricDescriptor hausdorff(double bound, std::size_t n_directions) {
    return {Kind::hausdorff_epigraph, 0.0, bound, n_directions};
  }

  std::string name() const;
};

/// A distance together with a resolution-refinement error estimate.
struct DistanceReport {
  double value = 0.0;
  double error_estimate = 0.0;
  GridSpec grid;
  MetricDescriptor metric;
};

/// ||f - g||_p over the common domain by tensor quadrature. The error estimate
/// compares resolutions n and 2n - 1 (or ceil(n/2) when 2n - 1 would exceed
/// the node cap).
DistanceReport lp_distance(const ConvexFunction& f, const ConvexFunction& g, double p, GridSpec grid);

/// max |f - g| over the grid nodes. Always a lower bound on the sup norm.
DistanceReport linf_grid_distance(const ConvexFunction& f, const ConvexFunction& g, GridSpec grid);

struct EpigraphSupportQuery {
  std::vector<double> direction;  // unit vector in R^{d+1}
  double bound = 1.0;

  EpigraphSupportQuery(std::vector<double> dir, double b);
};

/// Support function of V_f(B) = {(x, t) : f(x) <= t <= B} in direction u,
/// maximised over the n^d vertex grid (n = grid.n).
double epigraph_support(const ConvexFunction& f, const EpigraphSupportQuery& q,
                        GridSpec grid = GridSpec{257, QuadratureRule::trapezoid});

/// Deterministic quasi-uniform unit vectors in R^dim: the 2*dim signed axes
/// first, then a circle lattice (dim 2), Fibonacci sphere (dim 3) or a
/// fixed-seed Gaussian sample (dim >= 4). Flat count x dim array.
std::vector<double> sphere_directions(std::size_t dim, std::size_t count);

/// Epigraph support values of f at each direction (flat M x (d+1) input).
std::vector<double> support_profile(const ConvexFunction& f, double bound, std::size_t grid_n,
                                    const std::vector<double>& directions);

/// Hausdorff distance between V_f(B) and V_g(B), computed as the largest
/// support-function gap over n_directions sampled directions, polished by a
/// local compass search around the best samples. The error
/// estimate compares against half the directions and ~half the grid, plus
/// the direction resolution left by the search.
DistanceReport hausdorff_epigraph(const ConvexFunction& f, const ConvexFunction& g, double bound,
                                  std::size_t n_directions, GridSpec grid);

/// Distance under any descriptor (dispatches to the functions above).
DistanceReport distance(const ConvexFunction& f, const ConvexFunction& g, const MetricDescriptor& metric,
                        GridSpec grid);

/// Admits family members in order when they are >= eps from every admitted
/// member. Returns indices into `family`.
std::vector<std::size_t> greedy_packing(const std::vector<ConvexFunction>& family, double eps,
                                        const MetricDescriptor& metric, GridSpec grid);

}  // namespace metent
