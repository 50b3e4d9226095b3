#pragma once

// Explicit L1 packing of C([0,1]^d, 1): cubes on a regular interval system,
// affine bumps h_S that touch the quadratic f0 on their own cube, and a binary
// code selecting which bumps are raised in each packing member.

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "metent/convex_function.hpp"
#include "metent/exact.hpp"
#include "metent/grid.hpp"

namespace metent::packing {

inline constexpr std::size_t kMaxCells = 64;

/// k intervals [u_i, v_i] of length sqrt(eta) separated by gaps of
/// sqrt(eta (d-1)) / 2, starting at u_1 = 0. Indices are 0-based.
struct IntervalSystem {
  Rational eta_exact;
  double eta = 0.0;
  std::size_t d = 1;
  std::size_t k = 1;
  std::vector<std::pair<double, double>> intervals;

  double side() const { return intervals.front().second - intervals.front().first; }
  std::size_t cell_count() const;
};

/// Largest eta for which the system has at least one interval: 4 (2 + sqrt(d-1))^-2.
double eta_upper_limit(std::size_t d);

/// k <= 2 eta^{-1/2} / (2 + sqrt(d-1)) < k + 1 decided in exact arithmetic.
/// Returns 0 when eta is above the admissible range.
std::size_t interval_count(const Rational& eta, std::size_t d);

IntervalSystem build_interval_system(const Rational& eta, std::size_t d);
IntervalSystem build_interval_system(double eta, std::size_t d);

struct CellIndex {
  std::vector<std::size_t> idx;  // one interval index per axis, each in [0, k)
};

/// Flat cell numbering: axis 0 is the most significant digit in base k.
CellIndex cell_from_flat(const IntervalSystem& sys, std::size_t flat);
std::size_t flat_from_cell(const IntervalSystem& sys, const CellIndex& cell);
bool cell_contains(const IntervalSystem& sys, const CellIndex& cell, const double* x);

/// f0(x) = (1/d) sum x_j^2 on [0,1]^d.
ConvexFunction base_quadratic(std::size_t d);

/// h_S(x) = (1/d) sum_j [(u_j + v_j) x_j - u_j v_j], which equals
/// f0(x) + (1/d) sum_j (x_j - u_j)(v_j - x_j).
ConvexFunction perturbation_hS(const IntervalSystem& sys, const CellIndex& cell);

/// Sampled check of the four bump properties: affine, h_S <= h_S(1..1) <= 1,
/// h_S >= f0 on S, h_S <= f0 on every other cube. A floating-point evaluation
/// allowance of `allowance` is granted to each comparison.
struct BumpPropertyReport {
  std::size_t samples = 0;
  std::size_t affinity_violations = 0;
  std::size_t bound_violations = 0;
  std::size_t own_cell_violations = 0;
  std::size_t other_cell_violations = 0;
  double allowance = 0.0;

  std::size_t total_violations() const {
    return affinity_violations + bound_violations + own_cell_violations + other_cell_violations;
  }
};

BumpPropertyReport check_bump_properties(const IntervalSystem& sys, std::size_t samples, std::uint64_t seed);

/// gamma_d = integral over [0,1]^d of (1/d) sum y_j (1 - y_j) = 1/6 for every d.
inline constexpr double kGamma = 1.0 / 6.0;

/// Integral of |h_S - f0| over its own cube: eta^{d/2 + 1} / 6.
double zeta_exact(double eta, std::size_t d);

/// c1 = (gamma_d / 4) (2 + sqrt(d-1))^{-d}.
double packing_constant(std::size_t d);

class BinaryWord {
 public:
  explicit BinaryWord(std::size_t n = 0) : n_(n), blocks_((n + 63) / 64, 0) {}

  std::size_t size() const { return n_; }
  bool bit(std::size_t i) const { return (blocks_[i / 64] >> (i % 64)) & 1U; }
  void set(std::size_t i, bool v);
  std::size_t popcount() const;
  std::size_t hamming(const BinaryWord& other) const;
  const std::vector<std::uint64_t>& blocks() const { return blocks_; }
  std::vector<std::uint64_t>& blocks() { return blocks_; }

  /// Hex digits, most significant first; bit i of the word is bit i of the
  /// underlying integer.
  std::string to_hex() const;
  static BinaryWord from_hex(const std::string& hex, std::size_t n);

  friend bool operator==(const BinaryWord&, const BinaryWord&) = default;

 private:
  std::size_t n_;
  std::vector<std::uint64_t> blocks_;
};

struct BinaryCode {
  std::size_t n = 0;
  std::vector<BinaryWord> words;
  std::size_t min_distance = 0;  // required pairwise distance
};

/// Smallest pairwise Hamming distance over all pairs (n + 1 when fewer than
/// two words, which makes every requirement vacuous).
std::size_t exhaustive_min_distance(const BinaryCode& code);

struct VgResult {
  BinaryCode code;
  std::size_t target = 0;
  std::size_t attempts = 0;
  std::uint64_t seed = 0;
  std::size_t budget = 0;
  bool shortfall = false;
  std::size_t observed_min_distance = 0;
};

/// Randomised greedy Varshamov-Gilbert search. Shortfall is reported in the
/// result, not thrown.
VgResult vg_code(std::size_t n, std::size_t min_dist, std::size_t target, std::uint64_t seed,
                 std::size_t budget);

/// ceil(exp(n / 8)) and ceil(n / 4).
std::size_t vg_target(std::size_t n);
std::size_t vg_min_distance(std::size_t n);

struct PackingFamily {
  IntervalSystem system;
  BinaryCode code;
  std::vector<ConvexFunction> functions;  // g_theta, one per code word
  double zeta = 0.0;
  double guaranteed_sep = 0.0;  // zeta * code.min_distance
  double c1 = 0.0;
  double epsilon = 0.0;  // c1 * eta
  std::uint64_t seed = 0;
  std::size_t code_target = 0;
  bool code_shortfall = false;
};

/// g_theta(x) = max(max_{theta(S) = 1} h_S(x), f0(x)).
ConvexFunction packing_member(const IntervalSystem& sys, const BinaryWord& theta);

/// Family from an explicit system and code; no cell cap.
PackingFamily assemble_packing_family(IntervalSystem sys, BinaryCode code);

/// Full construction with the Varshamov-Gilbert code at n = k^d,
/// min distance ceil(n/4), target ceil(exp(n/8)). Requires k^d <= 64.
PackingFamily build_packing_family(const Rational& eta, std::size_t d, std::uint64_t seed,
                                   std::size_t vg_budget = 1'000'000);

struct CertificateRow {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t hamming = 0;
  double l1 = 0.0;
  double bound = 0.0;  // zeta * hamming
  double margin = 0.0;
  bool pass = false;
};

struct PackingCertificate {
  std::vector<CertificateRow> rows;
  GridSpec grid;
  double min_observed = 0.0;
  double guaranteed_sep = 0.0;
  double quadrature_error = 0.0;
  bool all_pass = true;
  std::size_t member_bound_violations = 0;  // grid nodes where |g_theta| > 1
};

/// Smallest midpoint resolution >= min_n whose cell boundaries fall on the
/// 1/n lattice (up to max_n); min_n when none does.
std::size_t aligned_resolution(const IntervalSystem& sys, std::size_t min_n, std::size_t max_n = 20000);

/// Resolution used when the caller does not pick one.
GridSpec default_certificate_grid(const IntervalSystem& sys);

/// Pairwise L1 distances by midpoint quadrature; each pair must satisfy
/// l1 >= zeta * hamming - quadrature_error.
PackingCertificate packing_certificate(const PackingFamily& family, GridSpec grid);

struct CurvePoint {
  Rational eta;
  std::size_t k = 0;
  double epsilon = 0.0;
  double log_m = 0.0;  // k^d / 8
};

std::vector<CurvePoint> lower_bound_curve(std::size_t d, const std::vector<Rational>& etas);

/// Least-squares slope of log(log M) against log(1/epsilon).
double loglog_slope(const std::vector<CurvePoint>& curve);

/// (max - min) / max of log M * epsilon^{d/2} along the curve.
double scaled_spread(const std::vector<CurvePoint>& curve, std::size_t d);

}  // namespace metent::packing
