#pragma once

// Checkers for the standalone inequalities, identities and counterexamples:
// sup-norm vs Hausdorff, L1 vs Hausdorff, the pointwise subgradient bound,
// the subgradient-integral bound, the hinge family, the f_j family and the
// rescaling identity. Every check returns a self-describing report.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "metent/convex_function.hpp"
#include "metent/grid.hpp"
#include "metent/metrics.hpp"

namespace metent::verify {

using Json = nlohmann::ordered_json;

/// pass == (lhs <= rhs + tolerance); slack == rhs - lhs.
struct InequalityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  Json inputs = Json::object();

  bool recomputed_pass() const { return lhs <= rhs + tolerance; }
};

InequalityReport make_report(std::string name, double lhs, double rhs, double tolerance, Json inputs = Json::object());

/// One resolution level of a refinable check.
struct Level {
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  Json detail = Json::object();
};

/// Resolution for refinement level L: n_L = (n - 1) 2^L + 1 nodes per axis
/// and directions 2^L times the base count.
struct Resolution {
  GridSpec grid;
  std::size_t n_directions = 0;
};

inline constexpr std::size_t kMaxRefinements = 3;

/// Evaluates levels 0 and 1, then keeps refining while the verdict changes
/// between consecutive levels (up to kMaxRefinements or the node cap). The
/// last level is reported; all levels are listed under inputs["levels"].
InequalityReport refine_until_stable(std::string name, Json inputs, std::size_t d, Resolution base,
                                     const std::function<Level(const Resolution&)>& eval);

/// ||f - g||_inf <= l_H(V_f(B), V_g(B)) sqrt(1 + sum Gamma_i^2).
/// lhs is the vertex-grid sup, rhs the refined Hausdorff estimate times the
/// Lipschitz factor.
InequalityReport check_sup_hausdorff(const ConvexFunction& f, const ConvexFunction& g, double bound,
                             const LipschitzVector& gammas, GridSpec grid, std::size_t n_directions);

/// ||f - g||_1 <= (1 + 20 d) l_H(V_f(1), V_g(1)) on [0,1]^d. inputs["ratio"]
/// holds ||f - g||_1 / l_H.
InequalityReport check_l1_hausdorff(const ConvexFunction& f, const ConvexFunction& g, GridSpec grid,
                            std::size_t n_directions);

/// |f(x) - g(x)| <= rho (1 + |m_f(x)| + |m_g(x)|) with rho a Hausdorff
/// estimate; rho's error estimate enters the tolerance.
InequalityReport check_pointwise_subgradient_bound(const ConvexFunction& f, const ConvexFunction& g,
                                                   std::span<const double> x, double bound,
                                                   const DistanceReport& hausdorff);

/// Integral of |m_f| over [rho, 1 - rho]^d against 8 d (midpoint rule).
InequalityReport check_subgradient_integral(const ConvexFunction& f, double rho, GridSpec grid);

/// Largest integral of |d f / d x_i| along axis-parallel lines through
/// [rho, 1 - rho]^d, against 4. `lines` positions per transverse axis.
InequalityReport check_slice_variation(const ConvexFunction& f, double rho, std::size_t lines, std::size_t n);

struct HingeCase {
  double alpha = 1.0;
  double p = 1.0;
  double lp_closed = 0.0;         // alpha^{1/p} / (1 + p)^{1/p}
  double hausdorff_closed = 0.0;  // alpha / sqrt(1 + alpha^2)
  double lp_numeric = 0.0;
  double hausdorff_numeric = 0.0;
};

struct HingeResult {
  HingeCase values;
  InequalityReport lp;         // |numeric - closed| <= lp_accuracy
  InequalityReport hausdorff;  // |numeric - closed| <= hausdorff_accuracy
};

/// f_alpha(x) = max(0, 1 - x / alpha) against g = 0 on [0,1].
HingeResult hinge_case(double alpha, double p, GridSpec grid = GridSpec{4001, QuadratureRule::midpoint},
                       std::size_t n_directions = 256, double lp_accuracy = 1e-4,
                       double hausdorff_accuracy = 1e-3);

struct RatioRow {
  double alpha = 0.0;
  double lp = 0.0;
  double hausdorff = 0.0;
  double ratio = 0.0;
};

struct RatioTable {
  double p = 1.0;
  std::vector<RatioRow> rows;
  bool monotone_increasing = false;  // along the given alpha order
};

RatioTable hinge_ratio_table(double p, const std::vector<double>& alphas,
                             GridSpec grid = GridSpec{4001, QuadratureRule::midpoint}, std::size_t n_directions = 256);

/// f_j(t) = max(0, 1 - 2^j t). lhs = 1/2, rhs = |f_j(2^-k) - f_k(2^-k)|,
/// which is 1 - 2^{j-k} exactly. inputs["grid_linf"] is the sup over the
/// vertex grid plus the dyadic points 2^-m, m = 0..60.
InequalityReport non_total_bounded_family(int j, int k, GridSpec grid = GridSpec{1025, QuadratureRule::trapezoid});

/// f~ = f(a + (b-a) x) / B on [0,1]^d. lhs = |L_p(f~ - g~) - vol^{-1/p} L_p(f - g) / B|,
/// rhs = combined quadrature error estimate; both sides under inputs.
InequalityReport check_scaling_identity(const ConvexFunction& f, const ConvexFunction& g, double bound, double p,
                                        GridSpec grid);

// Seeded corpora ------------------------------------------------------------

struct RandomPair {
  ConvexFunction f;
  ConvexFunction g;
};

/// f from seed 2s, g from seed 2s + 1, with 2 + s mod 7 pieces; both in
/// C([0,1]^d, 1).
RandomPair random_pair(std::size_t d, std::uint64_t seed);

struct BatchSettings {
  std::size_t d = 1;
  std::vector<std::uint64_t> seeds;  // defaults to 0..49 when empty
  GridSpec grid;
  std::size_t n_directions = 0;
};

/// Resolutions used by the batch runners when the caller does not choose.
BatchSettings default_batch(std::size_t d);

std::vector<InequalityReport> sup_hausdorff_batch(const BatchSettings& s);
std::vector<InequalityReport> l1_hausdorff_batch(const BatchSettings& s);
/// One report per pair: the worst of 100 seeded interior points.
std::vector<InequalityReport> pointwise_batch(const BatchSettings& s);
/// Integral and slice reports for f of every pair, with rho = 0.1.
std::vector<InequalityReport> subgradient_batch(const BatchSettings& s);
/// Twenty random rectangles, bounds and exponents.
std::vector<InequalityReport> scaling_batch(std::uint64_t seed, GridSpec grid);

struct BatchSummary {
  std::size_t total = 0;
  std::size_t passed = 0;
  double max_ratio = 0.0;  // largest inputs["ratio"], when present
  std::vector<std::string> failures;
};

BatchSummary summarize(const std::vector<InequalityReport>& reports);

}  // namespace metent::verify
