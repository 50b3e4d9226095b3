#include "metent/grid.hpp"

#include "metent/errors.hpp"

namespace metent {

std::string to_string(QuadratureRule r) { return r == QuadratureRule::midpoint ? "midpoint" : "trapezoid"; }

QuadratureRule quadrature_rule_from_string(const std::string& s) {
  if (s == "midpoint") return QuadratureRule::midpoint;
  if (s == "trapezoid") return QuadratureRule::trapezoid;
  throw ParameterError("unknown quadrature rule '" + s + "'");
}

std::size_t checked_node_count(std::size_t n, std::size_t d) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) {
    if (n != 0 && total > kMaxGridNodes / n) throw ParameterError("grid exceeds 10^7 nodes");
    total *= n;
  }
  if (total > kMaxGridNodes) throw ParameterError("grid exceeds 10^7 nodes");
  return total;
}

TensorGrid::TensorGrid(const Rect& domain, GridSpec spec) : dim_(domain.dim()), spec_(spec) {
  if (spec.n < 2) throw ParameterError("grid needs n >= 2 points per axis");
  size_ = checked_node_count(spec.n, dim_);
  coords_.resize(dim_);
  weights_.resize(dim_);
  const std::size_t n = spec.n;
  for (std::size_t a = 0; a < dim_; ++a) {
    const double lo = domain.lo()[a];
    const double w = domain.width(a);
    auto& c = coords_[a];
    auto& wt = weights_[a];
    c.resize(n);
    wt.resize(n);
    if (spec.rule == QuadratureRule::midpoint) {
      for (std::size_t i = 0; i < n; ++i) {
        c[i] = lo + w * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        wt[i] = w / static_cast<double>(n);
      }
    } else {
      const double h = w / static_cast<double>(n - 1);
      for (std::size_t i = 0; i < n; ++i) {
        c[i] = i + 1 == n ? domain.hi()[a] : lo + w * static_cast<double>(i) / static_cast<double>(n - 1);
        wt[i] = (i == 0 || i + 1 == n) ? 0.5 * h : h;
      }
    }
  }
}

void TensorGrid::decode(std::size_t k, std::size_t* idx) const {
  for (std::size_t a = 0; a < dim_; ++a) {
    idx[a] = k % spec_.n;
    k /= spec_.n;
  }
}

void TensorGrid::fill(const std::size_t* idx, double* x) const {
  for (std::size_t a = 0; a < dim_; ++a) x[a] = coords_[a][idx[a]];
}

double TensorGrid::weight_of(const std::size_t* idx) const {
  double w = 1.0;
  for (std::size_t a = 0; a < dim_; ++a) w *= weights_[a][idx[a]];
  return w;
}

void TensorGrid::advance(std::size_t* idx, std::size_t d, std::size_t n) {
  for (std::size_t a = 0; a < d; ++a) {
    if (++idx[a] < n) return;
    idx[a] = 0;
  }
}

double TensorGrid::node(std::size_t k, double* x) const {
  std::array<std::size_t, kMaxDim> idx{};
  decode(k, idx.data());
  fill(idx.data(), x);
  return weight_of(idx.data());
}

std::vector<double> vertex_nodes(const Rect& domain, std::size_t n) {
  TensorGrid g(domain, GridSpec{n, QuadratureRule::trapezoid});
  const std::size_t d = domain.dim();
  std::vector<double> out(g.size() * d);
  std::array<std::size_t, kMaxDim> idx{};
  for (std::size_t k = 0; k < g.size(); ++k) {
    g.fill(idx.data(), out.data() + k * d);
    TensorGrid::advance(idx.data(), d, n);
  }
  return out;
}

}  // namespace metent
