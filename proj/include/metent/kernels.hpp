#pragma once

// Grid reductions and the epigraph support kernel, in two flavours:
//   serial::   straightforward reference loops, kept for testing;
//   parallel:: OpenMP versions used by the library.
// Parallel sums reduce fixed-size chunks and then add the chunk partials in
// index order, so results do not depend on the thread count.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "metent/grid.hpp"

namespace metent::kernels {

// Neumaier-compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      carry += (sum - t) + v;
    else
      carry += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

inline constexpr std::size_t kChunk = 4096;

namespace serial {

/// sum_k w_k * term(x_k) over the grid.
template <class Term>
double weighted_sum(const TensorGrid& grid, Term&& term) {
  const std::size_t d = grid.dim();
  std::array<std::size_t, kMaxDim> idx{};
  std::array<double, kMaxDim> x{};
  CompensatedSum acc;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    grid.fill(idx.data(), x.data());
    acc.add(grid.weight_of(idx.data()) * term(x.data()));
    TensorGrid::advance(idx.data(), d, grid.n());
  }
  return acc.value();
}

/// max_k term(x_k) over the grid (-inf for an empty grid).
template <class Term>
double max(const TensorGrid& grid, Term&& term) {
  const std::size_t d = grid.dim();
  std::array<std::size_t, kMaxDim> idx{};
  std::array<double, kMaxDim> x{};
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    grid.fill(idx.data(), x.data());
    best = std::max(best, term(x.data()));
    TensorGrid::advance(idx.data(), d, grid.n());
  }
  return best;
}

/// Support function of the epigraph {(x, t) : f(x) <= t <= B} sampled at the
/// given nodes. points is N x d, values holds f at the points, directions is
/// M x (d + 1). Returns M support values.
inline std::vector<double> epigraph_support(std::span<const double> points, std::span<const double> values,
                                            double bound, std::span<const double> directions, std::size_t d) {
  const std::size_t npts = values.size();
  const std::size_t ndir = directions.size() / (d + 1);
  std::vector<double> out(ndir);
  for (std::size_t m = 0; m < ndir; ++m) {
    const double* u = directions.data() + m * (d + 1);
    const double s = u[d];
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < npts; ++j) {
      double v = s >= 0.0 ? s * bound : s * values[j];
      for (std::size_t i = 0; i < d; ++i) v += u[i] * points[j * d + i];
      best = std::max(best, v);
    }
    out[m] = best;
  }
  return out;
}

}  // namespace serial

namespace parallel {

template <class Term>
double weighted_sum(const TensorGrid& grid, Term&& term) {
  const std::size_t d = grid.dim();
  const std::size_t total = grid.size();
  const std::size_t nchunks = (total + kChunk - 1) / kChunk;
  std::vector<double> partial(nchunks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(nchunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
    const std::size_t end = std::min(total, begin + kChunk);
    std::array<std::size_t, kMaxDim> idx{};
    std::array<double, kMaxDim> x{};
    grid.decode(begin, idx.data());
    CompensatedSum acc;
    for (std::size_t k = begin; k < end; ++k) {
      grid.fill(idx.data(), x.data());
      acc.add(grid.weight_of(idx.data()) * term(x.data()));
      TensorGrid::advance(idx.data(), d, grid.n());
    }
    partial[static_cast<std::size_t>(c)] = acc.value();
  }
  CompensatedSum acc;
  for (double p : partial) acc.add(p);
  return acc.value();
}

template <class Term>
double max(const TensorGrid& grid, Term&& term) {
  const std::size_t d = grid.dim();
  const std::size_t total = grid.size();
  const std::size_t nchunks = (total + kChunk - 1) / kChunk;
  double best = -std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(max : best)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(nchunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
    const std::size_t end = std::min(total, begin + kChunk);
    std::array<std::size_t, kMaxDim> idx{};
    std::array<double, kMaxDim> x{};
    grid.decode(begin, idx.data());
    for (std::size_t k = begin; k < end; ++k) {
      grid.fill(idx.data(), x.data());
      best = std::max(best, term(x.data()));
      TensorGrid::advance(idx.data(), d, grid.n());
    }
  }
  return best;
}

inline std::vector<double> epigraph_support(std::span<const double> points, std::span<const double> values,
                                            double bound, std::span<const double> directions, std::size_t d) {
  const std::size_t npts = values.size();
  const std::size_t ndir = directions.size() / (d + 1);
  std::vector<double> out(ndir);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t m = 0; m < static_cast<std::ptrdiff_t>(ndir); ++m) {
    const double* u = directions.data() + static_cast<std::size_t>(m) * (d + 1);
    const double s = u[d];
    double best = -std::numeric_limits<double>::infinity();
    if (s >= 0.0) {
      // Linear in x: the top face's support is attained at the best node.
      for (std::size_t j = 0; j < npts; ++j) {
        double v = s * bound;
        for (std::size_t i = 0; i < d; ++i) v += u[i] * points[j * d + i];
        best = std::max(best, v);
      }
    } else {
      for (std::size_t j = 0; j < npts; ++j) {
        double v = s * values[j];
        for (std::size_t i = 0; i < d; ++i) v += u[i] * points[j * d + i];
        best = std::max(best, v);
      }
    }
    out[static_cast<std::size_t>(m)] = best;
  }
  return out;
}

}  // namespace parallel

}  // namespace metent::kernels
