#include "metent/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "metent/errors.hpp"
#include "metent/kernels.hpp"
#include "metent/random.hpp"

namespace metent {

std::string MetricDescriptor::name() const {
  switch (kind) {
    case Kind::lp: return "lp";
    case Kind::linf_grid: return "linf_grid";
    case Kind::hausdorff_epigraph: return "hausdorff_epigraph";
  }
  return "unknown";
}

namespace {

void require_common_domain(const ConvexFunction& f, const ConvexFunction& g) {
  if (!(f.domain() == g.domain())) throw ParameterError("distance: functions live on different domains");
}

double lp_value(const ConvexFunction& f, const ConvexFunction& g, double p, GridSpec spec) {
  const TensorGrid grid(f.domain(), spec);
  double integral;
  if (p == 1.0) {
    integral = kernels::parallel::weighted_sum(
        grid, [&](const double* x) { return std::abs(f.eval_unchecked(x) - g.eval_unchecked(x)); });
  } else if (p == 2.0) {
    integral = kernels::parallel::weighted_sum(grid, [&](const double* x) {
      const double t = f.eval_unchecked(x) - g.eval_unchecked(x);
      return t * t;
    });
  } else {
    integral = kernels::parallel::weighted_sum(
        grid, [&](const double* x) { return std::pow(std::abs(f.eval_unchecked(x) - g.eval_unchecked(x)), p); });
  }
  return std::pow(std::max(integral, 0.0), 1.0 / p);
}

double linf_value(const ConvexFunction& f, const ConvexFunction& g, GridSpec spec) {
  const TensorGrid grid(f.domain(), spec);
  return kernels::parallel::max(grid,
                                [&](const double* x) { return std::abs(f.eval_unchecked(x) - g.eval_unchecked(x)); });
}

// Resolution used for the error estimate: 2n - 1, or a coarser grid when the
// finer one would not fit under the node cap.
GridSpec comparison_grid(GridSpec spec, std::size_t d) {
  GridSpec fine{2 * spec.n - 1, spec.rule};
  try {
    checked_node_count(fine.n, d);
    return fine;
  } catch (const ParameterError&) {
    return GridSpec{std::max<std::size_t>(2, (spec.n + 1) / 2), spec.rule};
  }
}

}  // namespace

DistanceReport lp_distance(const ConvexFunction& f, const ConvexFunction& g, double p, GridSpec grid) {
  require_common_domain(f, g);
  if (!(p >= 1.0) || !std::isfinite(p)) throw ParameterError("lp_distance: need 1 <= p < inf");
  checked_node_count(grid.n, f.dim());
  const double v = lp_value(f, g, p, grid);
  const double w = lp_value(f, g, p, comparison_grid(grid, f.dim()));
  return DistanceReport{v, std::abs(v - w), grid, MetricDescriptor::lp(p)};
}

DistanceReport linf_grid_distance(const ConvexFunction& f, const ConvexFunction& g, GridSpec grid) {
  require_common_domain(f, g);
  checked_node_count(grid.n, f.dim());
  const double v = linf_value(f, g, grid);
  const double w = linf_value(f, g, comparison_grid(grid, f.dim()));
  return DistanceReport{v, std::abs(v - w), grid, MetricDescriptor::linf_grid()};
}

EpigraphSupportQuery::EpigraphSupportQuery(std::vector<double> dir, double b) : direction(std::move(dir)), bound(b) {
  double norm2 = 0.0;
  for (double c : direction) norm2 += c * c;
  if (direction.size() < 2 || std::abs(std::sqrt(norm2) - 1.0) > 1e-12)
    throw ParameterError("epigraph support direction must be a unit vector in R^{d+1}");
}

std::vector<double> support_profile(const ConvexFunction& f, double bound, std::size_t grid_n,
                                    const std::vector<double>& directions) {
  const std::size_t d = f.dim();
  const std::vector<double> pts = vertex_nodes(f.domain(), grid_n);
  const std::size_t npts = pts.size() / d;
  std::vector<double> vals(npts);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(npts); ++j)
    vals[static_cast<std::size_t>(j)] = f.eval_unchecked(pts.data() + static_cast<std::size_t>(j) * d);
  return kernels::parallel::epigraph_support(pts, vals, bound, directions, d);
}

double epigraph_support(const ConvexFunction& f, const EpigraphSupportQuery& q, GridSpec grid) {
  if (q.direction.size() != f.dim() + 1) throw ParameterError("epigraph_support: direction has wrong dimension");
  return support_profile(f, q.bound, grid.n, q.direction).front();
}

std::vector<double> sphere_directions(std::size_t dim, std::size_t count) {
  if (dim < 2) throw ParameterError("sphere_directions: need dim >= 2");
  std::vector<double> out;
  out.reserve(count * dim);
  const std::size_t axes = std::min(count, 2 * dim);
  for (std::size_t a = 0; a < axes; ++a) {
    for (std::size_t i = 0; i < dim; ++i) out.push_back(i == a / 2 ? (a % 2 == 0 ? 1.0 : -1.0) : 0.0);
  }
  const std::size_t rest = count - axes;
  if (rest == 0) return out;
  if (dim == 2) {
    for (std::size_t j = 0; j < rest; ++j) {
      const double t = 2.0 * std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(rest);
      out.push_back(std::cos(t));
      out.push_back(std::sin(t));
    }
  } else if (dim == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t j = 0; j < rest; ++j) {
      const double z = 1.0 - 2.0 * (static_cast<double>(j) + 0.5) / static_cast<double>(rest);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * static_cast<double>(j);
      out.push_back(r * std::cos(phi));
      out.push_back(r * std::sin(phi));
      out.push_back(z);
    }
  } else {
    Rng rng(0x5eedULL + dim);
    std::vector<double> v(dim);
    for (std::size_t j = 0; j < rest; ++j) {
      double norm2 = 0.0;
      do {
        norm2 = 0.0;
        for (std::size_t i = 0; i < dim; i += 2) {
          // Box-Muller pairs.
          const double r = std::sqrt(-2.0 * std::log(rng.open01()));
          const double t = 2.0 * std::numbers::pi * rng.uniform01();
          v[i] = r * std::cos(t);
          if (i + 1 < dim) v[i + 1] = r * std::sin(t);
        }
        for (double c : v) norm2 += c * c;
      } while (norm2 < 1e-12);
      const double inv = 1.0 / std::sqrt(norm2);
      for (double c : v) out.push_back(c * inv);
    }
  }
  return out;
}

namespace {

struct EpigraphSamples {
  std::vector<double> points;
  std::vector<double> values;
};

EpigraphSamples sample_epigraph(const ConvexFunction& f, std::size_t grid_n) {
  const std::size_t d = f.dim();
  EpigraphSamples s{vertex_nodes(f.domain(), grid_n), {}};
  const std::size_t npts = s.points.size() / d;
  s.values.resize(npts);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(npts); ++j)
    s.values[static_cast<std::size_t>(j)] = f.eval_unchecked(s.points.data() + static_cast<std::size_t>(j) * d);
  return s;
}

constexpr std::size_t kCompassBudget = 300;

// Orthonormal basis of the tangent space of the sphere at u.
std::vector<std::vector<double>> tangent_basis(const std::vector<double>& u) {
  const std::size_t dim = u.size();
  std::vector<std::vector<double>> basis;
  for (std::size_t a = 0; a < dim && basis.size() + 1 < dim; ++a) {
    std::vector<double> t(dim, 0.0);
    t[a] = 1.0;
    auto project_out = [&](const std::vector<double>& e) {
      double dot = 0.0;
      for (std::size_t i = 0; i < dim; ++i) dot += t[i] * e[i];
      for (std::size_t i = 0; i < dim; ++i) t[i] -= dot * e[i];
    };
    project_out(u);
    for (const auto& b : basis) project_out(b);
    double norm2 = 0.0;
    for (double c : t) norm2 += c * c;
    if (norm2 < 1e-6) continue;
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& c : t) c *= inv;
    basis.push_back(std::move(t));
  }
  return basis;
}

// Largest support-function gap: sampled directions first, then a compass
// search on the sphere started from the best few samples. The gap has kinks
// at its maximisers, so pure sampling would lose accuracy linearly in the
// direction spacing.
struct GapEstimate {
  double value = 0.0;
  double resolution = 0.0;  // bound on what the search's final step may have missed
};

double sample_radius(const EpigraphSamples& s, double bound, std::size_t d) {
  double r2 = 0.0;
  for (std::size_t j = 0; j < s.values.size(); ++j) {
    double x2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) x2 += s.points[j * d + i] * s.points[j * d + i];
    const double t = std::max(std::abs(s.values[j]), std::abs(bound));
    r2 = std::max(r2, x2 + t * t);
  }
  return std::sqrt(r2);
}

GapEstimate hausdorff_value(const ConvexFunction& f, const ConvexFunction& g, double bound, std::size_t ndir,
                            std::size_t grid_n) {
  const std::size_t d = f.dim();
  const std::size_t dim = d + 1;
  const auto dirs = sphere_directions(dim, ndir);
  const EpigraphSamples sf = sample_epigraph(f, grid_n);
  const EpigraphSamples sg = sample_epigraph(g, grid_n);
  const auto hf = kernels::parallel::epigraph_support(sf.points, sf.values, bound, dirs, d);
  const auto hg = kernels::parallel::epigraph_support(sg.points, sg.values, bound, dirs, d);

  std::vector<std::size_t> order(hf.size());
  for (std::size_t m = 0; m < order.size(); ++m) order[m] = m;
  auto gap_at = [&](std::size_t m) { return std::abs(hf[m] - hg[m]); };
  const std::size_t starts = std::min(order.size(), 2 * dim);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(starts), order.end(),
                    [&](std::size_t a, std::size_t b) { return gap_at(a) > gap_at(b) || (gap_at(a) == gap_at(b) && a < b); });
  double best = starts > 0 ? gap_at(order[0]) : 0.0;
  double final_step = 0.0;

  auto gap = [&](const std::vector<double>& u) {
    const double a = kernels::serial::epigraph_support(sf.points, sf.values, bound, u, d).front();
    const double b = kernels::serial::epigraph_support(sg.points, sg.values, bound, u, d).front();
    return std::abs(a - b);
  };
  const double step0 = std::min(0.5, std::pow(4.0 * std::numbers::pi / static_cast<double>(ndir),
                                              1.0 / static_cast<double>(dim - 1)));
  for (std::size_t r = 0; r < starts; ++r) {
    std::vector<double> u(dirs.begin() + static_cast<std::ptrdiff_t>(order[r] * dim),
                          dirs.begin() + static_cast<std::ptrdiff_t>((order[r] + 1) * dim));
    double val = gap_at(order[r]);
    // Compass search crawls along kinked ridges, so each start gets a fixed
    // evaluation budget; every evaluated direction is still a valid sample.
    std::size_t budget = kCompassBudget;
    double step = step0;
    while (step > 1e-12 && budget > 0) {
      bool moved = false;
      for (const auto& t : tangent_basis(u)) {
        for (double sign : {1.0, -1.0}) {
          std::vector<double> v(dim);
          double norm2 = 0.0;
          for (std::size_t i = 0; i < dim; ++i) {
            v[i] = u[i] + sign * step * t[i];
            norm2 += v[i] * v[i];
          }
          const double inv = 1.0 / std::sqrt(norm2);
          for (double& c : v) c *= inv;
          if (budget == 0) break;
          --budget;
          const double cand = gap(v);
          if (cand > val) {
            val = cand;
            u = std::move(v);
            moved = true;
            break;
          }
        }
        if (moved) break;
      }
      if (!moved) step *= 0.5;
    }
    best = std::max(best, val);
    final_step = std::max(final_step, step);
  }
  // Support functions are R-Lipschitz in the direction, so the gap is 2R-Lipschitz.
  const double radius = std::max(sample_radius(sf, bound, d), sample_radius(sg, bound, d));
  return GapEstimate{best, 2.0 * radius * final_step};
}

}  // namespace

DistanceReport hausdorff_epigraph(const ConvexFunction& f, const ConvexFunction& g, double bound,
                                  std::size_t n_directions, GridSpec grid) {
  require_common_domain(f, g);
  const std::size_t d = f.dim();
  if (n_directions < 2 * (d + 1)) throw ParameterError("hausdorff_epigraph: need n_directions >= 2(d+1)");
  if (!(bound > 0.0)) throw ParameterError("hausdorff_epigraph: bound must be > 0");
  checked_node_count(grid.n, d);
  const GapEstimate v = hausdorff_value(f, g, bound, n_directions, grid.n);
  const std::size_t coarse_dirs = std::max(2 * (d + 1), n_directions / 2);
  const std::size_t coarse_n = std::max<std::size_t>(2, (grid.n + 1) / 2);
  const GapEstimate w = hausdorff_value(f, g, bound, coarse_dirs, coarse_n);
  return DistanceReport{v.value, std::abs(v.value - w.value) + v.resolution, grid,
                        MetricDescriptor::hausdorff(bound, n_directions)};
}

DistanceReport distance(const ConvexFunction& f, const ConvexFunction& g, const MetricDescriptor& metric,
                        GridSpec grid) {
  switch (metric.kind) {
    case MetricDescriptor::Kind::lp: return lp_distance(f, g, metric.p, grid);
    case MetricDescriptor::Kind::linf_grid: return linf_grid_distance(f, g, grid);
    case MetricDescriptor::Kind::hausdorff_epigraph:
      return hausdorff_epigraph(f, g, metric.bound, metric.n_directions, grid);
  }
  throw ParameterError("distance: unknown metric");
}

std::vector<std::size_t> greedy_packing(const std::vector<ConvexFunction>& family, double eps,
                                        const MetricDescriptor& metric, GridSpec grid) {
  if (!(eps > 0.0)) throw ParameterError("greedy_packing: eps must be > 0");
  std::vector<std::size_t> admitted;
  for (std::size_t i = 0; i < family.size(); ++i) {
    bool ok = true;
    for (std::size_t j : admitted) {
      if (distance(family[i], family[j], metric, grid).value < eps) {
        ok = false;
        break;
      }
    }
    if (ok) admitted.push_back(i);
  }
  return admitted;
}

}  // namespace metent
