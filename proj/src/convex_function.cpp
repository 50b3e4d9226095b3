#include "metent/convex_function.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <type_traits>

#include "metent/errors.hpp"
#include "metent/random.hpp"

namespace metent {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double dot_affine(const form::Affine& a, const double* x) {
  double s = a.intercept;
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) s += a.coeffs[i] * x[i];
  return s;
}

void check_affine(const form::Affine& a, std::size_t d) {
  if (a.coeffs.size() != d) throw ParameterError("affine piece has wrong dimension");
  for (double c : a.coeffs)
    if (!std::isfinite(c)) throw ParameterError("affine coefficient is not finite");
  if (!std::isfinite(a.intercept)) throw ParameterError("affine intercept is not finite");
}

// Maps a point of the outer (target) domain onto the base domain.
void to_base(const Rect& target, const Rect& base, const double* x, double* y) {
  for (std::size_t i = 0; i < target.dim(); ++i) {
    const double t = (x[i] - target.lo()[i]) / target.width(i);
    y[i] = base.lo()[i] + base.width(i) * t;
    // Keep rounding from pushing boundary points outside the base domain.
    y[i] = std::clamp(y[i], base.lo()[i], base.hi()[i]);
  }
}

}  // namespace

bool LipschitzVector::all_finite() const {
  return std::all_of(gamma.begin(), gamma.end(), [](double g) { return std::isfinite(g); });
}

double LipschitzVector::sum_finite() const {
  double s = 0.0;
  for (double g : gamma)
    if (std::isfinite(g)) s += g;
  return s;
}

double LipschitzVector::sum_squares() const {
  double s = 0.0;
  for (double g : gamma) s += g * g;
  return s;
}

ConvexFunction::ConvexFunction(Rect domain, std::shared_ptr<const Form> f)
    : domain_(std::move(domain)), form_(std::move(f)) {}

ConvexFunction ConvexFunction::affine(Rect domain, std::vector<double> coeffs, double intercept) {
  form::Affine a{std::move(coeffs), intercept};
  check_affine(a, domain.dim());
  return ConvexFunction(std::move(domain), std::make_shared<const Form>(std::move(a)));
}

ConvexFunction ConvexFunction::max_affine(Rect domain, std::vector<form::Affine> pieces) {
  if (pieces.empty()) throw ParameterError("max_affine needs at least one piece");
  for (const auto& p : pieces) check_affine(p, domain.dim());
  return ConvexFunction(std::move(domain),
                        std::make_shared<const Form>(form::MaxAffine{std::move(pieces)}));
}

ConvexFunction ConvexFunction::separable_quadratic(Rect domain) {
  return ConvexFunction(std::move(domain), std::make_shared<const Form>(form::SeparableQuadratic{}));
}

ConvexFunction ConvexFunction::hinge(Rect domain, double alpha, std::size_t axis) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("hinge needs alpha > 0");
  if (axis >= domain.dim()) throw ParameterError("hinge axis out of range");
  return ConvexFunction(std::move(domain), std::make_shared<const Form>(form::Hinge{alpha, axis}));
}

ConvexFunction ConvexFunction::max_with(std::vector<ConvexFunction> parts) {
  if (parts.empty()) throw ParameterError("max_with needs at least one part");
  Rect domain = parts.front().domain();
  for (const auto& p : parts)
    if (!(p.domain() == domain)) throw ParameterError("max_with parts must share a domain");
  return ConvexFunction(std::move(domain),
                        std::make_shared<const Form>(form::MaxWith{std::move(parts)}));
}

ConvexFunction ConvexFunction::rescaled(ConvexFunction base, Rect target, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ParameterError("rescale bound must be > 0");
  if (target.dim() != base.dim()) throw ParameterError("rescale target has wrong dimension");
  auto b = std::make_shared<const ConvexFunction>(std::move(base));
  return ConvexFunction(std::move(target),
                        std::make_shared<const Form>(form::Rescaled{std::move(b), scale}));
}

std::string ConvexFunction::kind() const {
  return std::visit(overloaded{
                        [](const form::Affine&) { return std::string("affine"); },
                        [](const form::MaxAffine&) { return std::string("max_affine"); },
                        [](const form::SeparableQuadratic&) { return std::string("separable_quadratic"); },
                        [](const form::Hinge&) { return std::string("hinge"); },
                        [](const form::MaxWith&) { return std::string("max_with"); },
                        [](const form::Rescaled&) { return std::string("rescaled"); },
                    },
                    *form_);
}

double ConvexFunction::eval(std::span<const double> x) const {
  if (!domain_.contains(x)) throw DomainError("eval: point outside the function's domain");
  return eval_unchecked(x.data());
}

double ConvexFunction::eval_unchecked(const double* x) const {
  const std::size_t d = dim();
  return std::visit(
      overloaded{
          [&](const form::Affine& a) { return dot_affine(a, x); },
          [&](const form::MaxAffine& m) {
            double best = dot_affine(m.pieces.front(), x);
            for (std::size_t j = 1; j < m.pieces.size(); ++j) best = std::max(best, dot_affine(m.pieces[j], x));
            return best;
          },
          [&](const form::SeparableQuadratic&) {
            double s = 0.0;
            for (std::size_t i = 0; i < d; ++i) s += x[i] * x[i];
            return s / static_cast<double>(d);
          },
          [&](const form::Hinge& h) { return std::max(0.0, 1.0 - x[h.axis] / h.alpha); },
          [&](const form::MaxWith& m) {
            double best = m.parts.front().eval_unchecked(x);
            for (std::size_t j = 1; j < m.parts.size(); ++j) best = std::max(best, m.parts[j].eval_unchecked(x));
            return best;
          },
          [&](const form::Rescaled& r) {
            std::array<double, kMaxDim> y{};
            to_base(domain_, r.base->domain(), x, y.data());
            return r.base->eval_unchecked(y.data()) / r.scale;
          },
      },
      *form_);
}

std::vector<double> ConvexFunction::subgradient(std::span<const double> x) const {
  if (!domain_.interior(x)) throw DomainError("subgradient: point is not interior to the domain");
  std::vector<double> g(dim());
  subgradient_unchecked(x.data(), g.data());
  return g;
}

void ConvexFunction::subgradient_unchecked(const double* x, double* out) const {
  const std::size_t d = dim();
  std::visit(overloaded{
                 [&](const form::Affine& a) { std::copy(a.coeffs.begin(), a.coeffs.end(), out); },
                 [&](const form::MaxAffine& m) {
                   std::size_t arg = 0;
                   double best = dot_affine(m.pieces[0], x);
                   for (std::size_t j = 1; j < m.pieces.size(); ++j) {
                     const double v = dot_affine(m.pieces[j], x);
                     if (v > best) {
                       best = v;
                       arg = j;
                     }
                   }
                   std::copy(m.pieces[arg].coeffs.begin(), m.pieces[arg].coeffs.end(), out);
                 },
                 [&](const form::SeparableQuadratic&) {
                   for (std::size_t i = 0; i < d; ++i) out[i] = 2.0 * x[i] / static_cast<double>(d);
                 },
                 [&](const form::Hinge& h) {
                   std::fill(out, out + d, 0.0);
                   // Piece order is (1 - x/alpha, 0); at the kink the sloped piece wins.
                   if (1.0 - x[h.axis] / h.alpha >= 0.0) out[h.axis] = -1.0 / h.alpha;
                 },
                 [&](const form::MaxWith& m) {
                   std::size_t arg = 0;
                   double best = m.parts[0].eval_unchecked(x);
                   for (std::size_t j = 1; j < m.parts.size(); ++j) {
                     const double v = m.parts[j].eval_unchecked(x);
                     if (v > best) {
                       best = v;
                       arg = j;
                     }
                   }
                   m.parts[arg].subgradient_unchecked(x, out);
                 },
                 [&](const form::Rescaled& r) {
                   std::array<double, kMaxDim> y{};
                   to_base(domain_, r.base->domain(), x, y.data());
                   r.base->subgradient_unchecked(y.data(), out);
                   for (std::size_t i = 0; i < d; ++i)
                     out[i] *= r.base->domain().width(i) / domain_.width(i) / r.scale;
                 },
             },
             *form_);
}

ConvexFunction rescale_to_unit(const ConvexFunction& f, double bound) {
  if (!(bound > 0.0) || !std::isfinite(bound)) throw ParameterError("rescale_to_unit: bound must be > 0");
  if (f.domain().is_unit() && bound == 1.0) return f;
  return ConvexFunction::rescaled(f, Rect::unit(f.dim()), bound);
}

namespace {

// Calls fn(point) for every node of the n^d vertex grid on `r`.
template <class Fn>
void for_each_vertex_node(const Rect& r, std::size_t n, Fn&& fn) {
  const std::size_t d = r.dim();
  std::array<std::size_t, kMaxDim> idx{};
  std::array<double, kMaxDim> x{};
  while (true) {
    for (std::size_t i = 0; i < d; ++i)
      x[i] = idx[i] + 1 == n ? r.hi()[i] : r.lo()[i] + r.width(i) * static_cast<double>(idx[i]) / static_cast<double>(n - 1);
    fn(std::span<const double>(x.data(), d), std::span<const std::size_t>(idx.data(), d));
    std::size_t ax = 0;
    while (ax < d && ++idx[ax] == n) idx[ax++] = 0;
    if (ax == d) break;
  }
}

std::size_t checked_grid_size(std::size_t n, std::size_t d) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) {
    total *= n;
    if (total > 10'000'000) throw ParameterError("grid exceeds 10^7 nodes");
  }
  return total;
}

}  // namespace

RandomConvex make_random_convex(std::size_t d, double bound, std::size_t pieces, std::uint64_t seed) {
  return make_random_convex(Rect::unit(d), bound, pieces, seed);
}

RandomConvex make_random_convex(const Rect& domain, double bound, std::size_t pieces, std::uint64_t seed) {
  if (pieces == 0) throw ParameterError("make_random_convex: need at least one piece");
  if (!(bound > 0.0) || !std::isfinite(bound)) throw ParameterError("make_random_convex: bound must be > 0");
  const std::size_t d = domain.dim();
  checked_grid_size(17, d);
  Rng rng(seed);

  for (int attempt = 1; attempt <= 1000; ++attempt) {
    std::vector<form::Affine> ps(pieces);
    for (auto& p : ps) {
      p.coeffs.resize(d);
      double at_anchor = rng.uniform(-bound, bound);
      double intercept = at_anchor;
      for (std::size_t i = 0; i < d; ++i) {
        p.coeffs[i] = rng.uniform(-2.0, 2.0) * bound / domain.width(i);
        intercept -= p.coeffs[i] * rng.uniform(domain.lo()[i], domain.hi()[i]);
      }
      p.intercept = intercept;
    }

    // The max over the box sits at a vertex; every piece's own minimum is a
    // lower bound for the max-of-pieces.
    double sup = -std::numeric_limits<double>::infinity();
    double inf_lb = -std::numeric_limits<double>::infinity();
    for (const auto& p : ps) {
      double pmin = p.intercept;
      double pmax = p.intercept;
      for (std::size_t i = 0; i < d; ++i) {
        const double a = p.coeffs[i] * domain.lo()[i];
        const double b = p.coeffs[i] * domain.hi()[i];
        pmin += std::min(a, b);
        pmax += std::max(a, b);
      }
      sup = std::max(sup, pmax);
      inf_lb = std::max(inf_lb, pmin);
    }
    const double range = std::max(sup, -inf_lb);
    if (range > bound) {
      const double s = bound / range * (1.0 - 1e-12);
      for (auto& p : ps) {
        for (double& c : p.coeffs) c *= s;
        p.intercept *= s;
      }
    }

    auto f = ConvexFunction::max_affine(domain, std::move(ps));
    double grid_sup = 0.0;
    for_each_vertex_node(domain, 17, [&](std::span<const double> x, auto) {
      grid_sup = std::max(grid_sup, std::abs(f.eval_unchecked(x.data())));
    });
    if (grid_sup <= bound) return RandomConvex{std::move(f), grid_sup, attempt};
  }
  throw ParameterError("make_random_convex: no bounded sample within 1000 attempts");
}

LipschitzVector coordinate_lipschitz_estimate(const ConvexFunction& f, std::size_t n) {
  if (n < 2) throw ParameterError("coordinate_lipschitz_estimate: need n >= 2");
  const Rect& r = f.domain();
  const std::size_t d = r.dim();
  checked_grid_size(n, d);
  LipschitzVector out{std::vector<double>(d, 0.0)};
  std::array<double, kMaxDim> y{};
  for_each_vertex_node(r, n, [&](std::span<const double> x, std::span<const std::size_t> idx) {
    const double fx = f.eval_unchecked(x.data());
    for (std::size_t i = 0; i < d; ++i) {
      if (idx[i] + 1 == n) continue;
      std::copy(x.begin(), x.end(), y.begin());
      y[i] = idx[i] + 2 == n ? r.hi()[i]
                             : r.lo()[i] + r.width(i) * static_cast<double>(idx[i] + 1) / static_cast<double>(n - 1);
      const double h = y[i] - x[i];
      out.gamma[i] = std::max(out.gamma[i], std::abs(f.eval_unchecked(y.data()) - fx) / h);
    }
  });
  return out;
}

LipschitzVector coordinate_lipschitz_bound(const ConvexFunction& f) {
  const std::size_t d = f.dim();
  const Rect& r = f.domain();
  std::vector<double> g(d, 0.0);
  std::visit(overloaded{
                 [&](const form::Affine& a) {
                   for (std::size_t i = 0; i < d; ++i) g[i] = std::abs(a.coeffs[i]);
                 },
                 [&](const form::MaxAffine& m) {
                   for (const auto& p : m.pieces)
                     for (std::size_t i = 0; i < d; ++i) g[i] = std::max(g[i], std::abs(p.coeffs[i]));
                 },
                 [&](const form::SeparableQuadratic&) {
                   for (std::size_t i = 0; i < d; ++i)
                     g[i] = 2.0 * std::max(std::abs(r.lo()[i]), std::abs(r.hi()[i])) / static_cast<double>(d);
                 },
                 [&](const form::Hinge& h) { g[h.axis] = 1.0 / h.alpha; },
                 [&](const form::MaxWith& m) {
                   for (const auto& p : m.parts) {
                     const auto pg = coordinate_lipschitz_bound(p);
                     for (std::size_t i = 0; i < d; ++i) g[i] = std::max(g[i], pg.gamma[i]);
                   }
                 },
                 [&](const form::Rescaled& s) {
                   const auto bg = coordinate_lipschitz_bound(*s.base);
                   for (std::size_t i = 0; i < d; ++i)
                     g[i] = bg.gamma[i] * s.base->domain().width(i) / r.width(i) / s.scale;
                 },
             },
             f.form());
  return LipschitzVector{std::move(g)};
}

}  // namespace metent
