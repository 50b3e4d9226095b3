#pragma once

// Strip schedule behind the L_p upper bound: the cut points u and v = 1 - u,
// the geometric-type subdivision delta_1 < ... < delta_A < u <= delta_{A+1} of
// [0, u], the per-strip cover radii alpha_m, and the zeta_m sequence that
// controls both the coverage S1 and the cardinality exponent S2.
//
// Everything is carried as natural logs: for p = 1 a non-empty schedule needs
// eta < 2^-24, and delta_1 = eta^p leaves double range quickly as p grows.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "metent/convex_function.hpp"

namespace metent::schedule {

struct Breakpoints {
  double p = 1.0;
  double log_u = 0.0;             // -2 (p+1)^2 (p+2) log 2
  double log_v_complement = 0.0;  // log(1 - v) == log u

  double u() const;
  double v() const;
};

Breakpoints breakpoints(double p);

struct StripSchedule {
  double p = 1.0;
  double log_eta = 0.0;
  double log_u = 0.0;
  std::size_t A = 0;
  std::vector<double> log_delta;  // m = 1 .. A+1 (empty when A == 0)
  std::vector<double> log_alpha;  // m = 1 .. A

  bool empty() const { return A == 0; }
};

/// Log-space distance from log u below which a delta_m is considered tied
/// with u; such eta are rejected.
inline constexpr double kTieGuard = 1e-9;

/// Builds the schedule for eta = exp(log_eta). eta >= u^{1/p} gives an empty
/// schedule (A = 0), which is a value, not an error.
StripSchedule strip_schedule(double log_eta, double p);

struct ZetaSequence {
  std::vector<double> log_definition;  // log sqrt(eta delta_{m+1} / (delta_m alpha_m))
  std::vector<double> log_closed;      // (p / (2 (p+1)^2)) ((p+1)/(p+2))^m log eta
  double max_discrepancy = 0.0;        // in log space
  bool agree = false;                  // max_discrepancy <= 1e-12
};

ZetaSequence zeta_sequence(const StripSchedule& sched);

struct ScheduleRow {
  std::size_t m = 0;
  double log_delta = 0.0;
  double log_alpha = 0.0;
  double log_zeta = 0.0;
  double ratio = 0.0;  // zeta_m / zeta_{m-1}; 0 for m == 1
  bool ratio_pass = true;
  bool zeta_le_one = true;
};

struct ScheduleReport {
  double p = 1.0;
  double log_eta = 0.0;
  std::size_t d = 1;
  std::size_t A = 0;
  double log_u = 0.0;
  std::vector<ScheduleRow> rows;
  std::vector<double> zeta;  // plain values, may underflow to 0

  double log_S1 = 0.0;        // log(delta_1 + sum alpha_m^p (delta_{m+1} - delta_m))
  double log_S1_bound = 0.0;  // log((7/3) eta^p)
  double log_S1_via_zeta = 0.0;  // log(eta^p (1 + sum zeta_m^2)), the intermediate bound
  bool S1_pass = false;

  double sum_zeta_sq = 0.0;
  double sum_zeta_sq_bound = 4.0 / 3.0;
  bool sum_zeta_sq_pass = false;

  double sum_zeta_d = 0.0;
  double sum_zeta_d_bound = 0.0;  // 2^d / (2^d - 1)
  bool sum_zeta_d_pass = false;

  bool ratios_pass = false;
  double closed_form_discrepancy = 0.0;
  bool closed_form_pass = false;
  bool all_pass = false;
};

/// Evaluates every inequality of the upper-bound accounting on the schedule
/// for (eta, p), with the Sum zeta^d check at dimension d. Requires A >= 1.
ScheduleReport verify_schedule(double log_eta, double p, std::size_t d);

/// Natural-log of sum_i exp(terms[i]) without overflow.
double log_sum_exp(const std::vector<double>& terms);

struct CoverAccounting {
  double log_coverage = 0.0;  // log((17/3)^{1/p} eta)
  double coverage = 0.0;
  double prefactor = 0.0;       // 2^{d+1}/(2^d - 1) + (2/u)^{d/2}
  double log_bound = 0.0;       // natural log of the log-cardinality bound
  double bound = 0.0;           // may be +inf when out of double range
};

/// Coverage and cardinality bookkeeping for one induction step; gammas'
/// finite entries are summed into the Sum_{i>k} Gamma_i aggregate.
CoverAccounting cover_size_accounting(double log_eta, double p, std::size_t d, const LipschitzVector& gammas,
                                      double c_base);

struct BoundInputs {
  double eps = 0.0;
  std::size_t d = 1;
  double p = 1.0;
  double B = 1.0;
  double a = 0.0;
  double b = 1.0;
  LipschitzVector gammas;  // may be empty when the Lipschitz bound is not wanted
  double c_up = 1.0;
  double c_low = 1.0;
  double eps0 = 1.0;
};

/// nullopt marks "out of range": the formula is not asserted there.
struct TheoremBounds {
  std::optional<double> upper;            // c_up (eps / (B (b-a)^{d/p}))^{-d/2}
  std::optional<double> lower;            // c_low (same)^{-d/2}
  std::optional<double> lipschitz_upper;  // c_up ((B + Sum Gamma_i (b-a)) / eps)^{d/2}
  double normalized_eps = 0.0;            // (b-a)^{-d/p} eps / B
};

TheoremBounds theorem_bounds(const BoundInputs& in);

}  // namespace metent::schedule
