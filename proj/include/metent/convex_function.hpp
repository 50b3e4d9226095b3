#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "metent/rect.hpp"

namespace metent {

class ConvexFunction;

namespace form {

// x -> <coeffs, x> + intercept
struct Affine {
  std::vector<double> coeffs;
  double intercept = 0.0;
};

// Pointwise max of at least one affine piece.
struct MaxAffine {
  std::vector<Affine> pieces;
};

// f0(x) = (1/d) * sum_j x_j^2
struct SeparableQuadratic {};

// max(0, 1 - x_axis / alpha), alpha > 0.
struct Hinge {
  double alpha = 1.0;
  std::size_t axis = 0;
};

// Pointwise max of convex functions that share the outer domain.
struct MaxWith {
  std::vector<ConvexFunction> parts;
};

// Lazy affine view: x in the outer domain is mapped affinely onto base's
// domain, and the result is divided by `scale`.
struct Rescaled {
  std::shared_ptr<const ConvexFunction> base;
  double scale = 1.0;
};

}  // namespace form

using Form = std::variant<form::Affine, form::MaxAffine, form::SeparableQuadratic, form::Hinge,
                          form::MaxWith, form::Rescaled>;

/// Per-axis Lipschitz constants; +inf means the axis is unconstrained.
struct LipschitzVector {
  std::vector<double> gamma;

  std::size_t dim() const { return gamma.size(); }
  bool all_finite() const;
  double sum_finite() const;  // sum over the finite entries
  double sum_squares() const;
};

/// A convex function on a rectangle. Every constructor produces a function
/// that is convex by construction; instances are immutable and cheap to copy.
class ConvexFunction {
 public:
  static ConvexFunction affine(Rect domain, std::vector<double> coeffs, double intercept);
  static ConvexFunction max_affine(Rect domain, std::vector<form::Affine> pieces);
  static ConvexFunction separable_quadratic(Rect domain);
  static ConvexFunction hinge(Rect domain, double alpha, std::size_t axis = 0);
  static ConvexFunction max_with(std::vector<ConvexFunction> parts);
  static ConvexFunction rescaled(ConvexFunction base, Rect target, double scale);

  const Rect& domain() const { return domain_; }
  std::size_t dim() const { return domain_.dim(); }
  const Form& form() const { return *form_; }
  std::string kind() const;

  /// Throws DomainError when x lies outside the closed domain.
  double eval(std::span<const double> x) const;

  /// Subgradient at an interior point. At ties between pieces the gradient of
  /// the lowest-index active piece is returned.
  std::vector<double> subgradient(std::span<const double> x) const;

  // Unchecked variants used by the grid kernels; x must lie in the domain.
  double eval_unchecked(const double* x) const;
  void subgradient_unchecked(const double* x, double* out) const;

 private:
  ConvexFunction(Rect domain, std::shared_ptr<const Form> f);

  Rect domain_;
  std::shared_ptr<const Form> form_;
};

/// f~(x) = f(lo + (hi - lo) x) / bound on [0,1]^d. Returns f itself when f is
/// already on the unit cube and bound == 1.
ConvexFunction rescale_to_unit(const ConvexFunction& f, double bound);

/// Random max-of-affine function whose values lie in [-bound, bound].
struct RandomConvex {
  ConvexFunction function;
  double grid_sup = 0.0;  // max |f| over the 17^d check grid
  int attempts = 0;
};

RandomConvex make_random_convex(std::size_t d, double bound, std::size_t pieces, std::uint64_t seed);
RandomConvex make_random_convex(const Rect& domain, double bound, std::size_t pieces,
                                std::uint64_t seed);

/// Per-axis max of |f(x + h e_i) - f(x)| / h over the n^d vertex grid.
/// This is a lower estimate of the true constants.
LipschitzVector coordinate_lipschitz_estimate(const ConvexFunction& f, std::size_t n);

/// Valid (upper) per-axis Lipschitz constants derived from the form.
LipschitzVector coordinate_lipschitz_bound(const ConvexFunction& f);

}  // namespace metent
