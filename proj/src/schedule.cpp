#include "metent/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "metent/errors.hpp"

namespace metent::schedule {

// The base-2 exponent is exact, so exp2 gives u without the rounding of exp(log u).
double Breakpoints::u() const { return std::exp2(-2.0 * (p + 1.0) * (p + 1.0) * (p + 2.0)); }
double Breakpoints::v() const { return 1.0 - u(); }

Breakpoints breakpoints(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ParameterError("breakpoints: need p >= 1");
  Breakpoints b;
  b.p = p;
  b.log_u = -2.0 * (p + 1.0) * (p + 1.0) * (p + 2.0) * std::numbers::ln2;
  b.log_v_complement = b.log_u;
  return b;
}

double log_sum_exp(const std::vector<double>& terms) {
  if (terms.empty()) return -std::numeric_limits<double>::infinity();
  const double mx = *std::max_element(terms.begin(), terms.end());
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - mx);
  return mx + std::log(s);
}

namespace {

double log_delta_at(double log_eta, double p, std::size_t m) {
  return p * std::pow((p + 1.0) / (p + 2.0), static_cast<double>(m) - 1.0) * log_eta;
}

double log_alpha_at(double log_eta, double p, std::size_t m) {
  const double e = std::pow(p + 1.0, static_cast<double>(m) - 2.0) / std::pow(p + 2.0, static_cast<double>(m) - 1.0);
  return log_eta - p * e * log_eta;
}

// log(exp(hi) - exp(lo)) for lo < hi.
double log_diff(double hi, double lo) { return hi + std::log1p(-std::exp(lo - hi)); }

}  // namespace

StripSchedule strip_schedule(double log_eta, double p) {
  const Breakpoints bp = breakpoints(p);
  if (!(log_eta < 0.0) || !std::isfinite(log_eta)) throw ParameterError("strip_schedule: need 0 < eta < 1");
  StripSchedule s;
  s.p = p;
  s.log_eta = log_eta;
  s.log_u = bp.log_u;

  std::size_t m = 1;
  while (true) {
    const double ld = log_delta_at(log_eta, p, m);
    if (std::abs(ld - bp.log_u) < kTieGuard)
      throw ParameterError("strip_schedule: delta_" + std::to_string(m) +
                           " ties with u in floating point; perturb eta");
    if (!(ld < bp.log_u)) break;
    ++m;
  }
  s.A = m - 1;
  if (s.A == 0) return s;
  for (std::size_t j = 1; j <= s.A + 1; ++j) s.log_delta.push_back(log_delta_at(log_eta, p, j));
  for (std::size_t j = 1; j <= s.A; ++j) s.log_alpha.push_back(log_alpha_at(log_eta, p, j));
  return s;
}

ZetaSequence zeta_sequence(const StripSchedule& sched) {
  if (sched.empty()) throw ParameterError("zeta_sequence: schedule is empty (A = 0)");
  const double p = sched.p;
  ZetaSequence z;
  for (std::size_t m = 1; m <= sched.A; ++m) {
    const double def =
        0.5 * (sched.log_eta + sched.log_delta[m] - sched.log_delta[m - 1] - sched.log_alpha[m - 1]);
    const double closed = p / (2.0 * (p + 1.0) * (p + 1.0)) *
                          std::pow((p + 1.0) / (p + 2.0), static_cast<double>(m)) * sched.log_eta;
    z.log_definition.push_back(def);
    z.log_closed.push_back(closed);
    z.max_discrepancy = std::max(z.max_discrepancy, std::abs(def - closed));
  }
  z.agree = z.max_discrepancy <= 1e-12;
  return z;
}

ScheduleReport verify_schedule(double log_eta, double p, std::size_t d) {
  if (d == 0 || d > kMaxDim) throw ParameterError("verify_schedule: dimension must be in [1, 8]");
  const StripSchedule s = strip_schedule(log_eta, p);
  if (s.empty()) throw ParameterError("verify_schedule: schedule is empty (A = 0)");
  const ZetaSequence z = zeta_sequence(s);

  ScheduleReport r;
  r.p = p;
  r.log_eta = log_eta;
  r.d = d;
  r.A = s.A;
  r.log_u = s.log_u;
  r.closed_form_discrepancy = z.max_discrepancy;
  r.closed_form_pass = z.agree;

  r.ratios_pass = true;
  for (std::size_t m = 1; m <= s.A; ++m) {
    ScheduleRow row;
    row.m = m;
    row.log_delta = s.log_delta[m - 1];
    row.log_alpha = s.log_alpha[m - 1];
    row.log_zeta = z.log_closed[m - 1];
    row.zeta_le_one = row.log_zeta <= 0.0;
    if (m >= 2) {
      const double log_ratio = z.log_closed[m - 1] - z.log_closed[m - 2];
      row.ratio = std::exp(log_ratio);
      row.ratio_pass = log_ratio >= std::numbers::ln2;
    }
    r.ratios_pass = r.ratios_pass && row.ratio_pass && row.zeta_le_one;
    r.rows.push_back(row);
    r.zeta.push_back(std::exp(row.log_zeta));
  }

  // S1 = delta_1 + sum alpha_m^p (delta_{m+1} - delta_m)
  std::vector<double> terms{s.log_delta[0]};
  for (std::size_t m = 1; m <= s.A; ++m)
    terms.push_back(p * s.log_alpha[m - 1] + log_diff(s.log_delta[m], s.log_delta[m - 1]));
  r.log_S1 = log_sum_exp(terms);
  r.log_S1_bound = std::log(7.0 / 3.0) + p * log_eta;

  std::vector<double> sq, dpow;
  for (double lz : z.log_closed) {
    sq.push_back(2.0 * lz);
    dpow.push_back(static_cast<double>(d) * lz);
  }
  const double log_sum_sq = log_sum_exp(sq);
  r.log_S1_via_zeta = p * log_eta + std::log1p(std::exp(log_sum_sq));
  r.S1_pass = r.log_S1 <= r.log_S1_via_zeta && r.log_S1 <= r.log_S1_bound;

  r.sum_zeta_sq = std::exp(log_sum_sq);
  r.sum_zeta_sq_pass = r.sum_zeta_sq <= r.sum_zeta_sq_bound;
  const double two_d = std::ldexp(1.0, static_cast<int>(d));
  r.sum_zeta_d = std::exp(log_sum_exp(dpow));
  r.sum_zeta_d_bound = two_d / (two_d - 1.0);
  r.sum_zeta_d_pass = r.sum_zeta_d <= r.sum_zeta_d_bound;

  r.all_pass = r.ratios_pass && r.S1_pass && r.sum_zeta_sq_pass && r.sum_zeta_d_pass && r.closed_form_pass;
  return r;
}

CoverAccounting cover_size_accounting(double log_eta, double p, std::size_t d, const LipschitzVector& gammas,
                                      double c_base) {
  if (!(c_base > 0.0)) throw ParameterError("cover_size_accounting: c_base must be > 0");
  if (d == 0 || d > kMaxDim) throw ParameterError("cover_size_accounting: dimension must be in [1, 8]");
  const StripSchedule s = strip_schedule(log_eta, p);
  if (s.empty()) throw ParameterError("cover_size_accounting: schedule is empty (A = 0)");
  for (double g : gammas.gamma)
    if (!(g > 0.0)) throw ParameterError("cover_size_accounting: Lipschitz constants must be > 0");

  CoverAccounting c;
  c.log_coverage = std::log(17.0 / 3.0) / p + log_eta;
  c.coverage = std::exp(c.log_coverage);
  const double half_d = static_cast<double>(d) / 2.0;
  const double two_d = std::ldexp(1.0, static_cast<int>(d));
  const double log_first = std::log(2.0 * two_d / (two_d - 1.0));
  const double log_second = half_d * (std::numbers::ln2 - s.log_u);
  const double log_prefactor = log_sum_exp({log_first, log_second});
  c.prefactor = std::exp(log_prefactor);
  c.log_bound = std::log(c_base) + log_prefactor + half_d * (std::log(gammas.sum_finite() + 2.0) - log_eta);
  c.bound = std::exp(c.log_bound);
  return c;
}

TheoremBounds theorem_bounds(const BoundInputs& in) {
  if (!(in.eps > 0.0) || !(in.B > 0.0) || !(in.b > in.a) || !(in.p >= 1.0) || !(in.c_up > 0.0) ||
      !(in.c_low > 0.0) || !(in.eps0 > 0.0) || in.d == 0)
    throw ParameterError("theorem_bounds: scales and constants must be positive, p >= 1, b > a");
  const double d = static_cast<double>(in.d);
  const double scale = in.B * std::pow(in.b - in.a, d / in.p);
  TheoremBounds t;
  t.normalized_eps = in.eps / scale;
  if (in.eps <= in.eps0 * scale) {
    const double core = std::pow(t.normalized_eps, -d / 2.0);
    t.upper = in.c_up * core;
    t.lower = in.c_low * core;
  }
  if (!in.gammas.gamma.empty()) {
    if (in.gammas.dim() != in.d) throw ParameterError("theorem_bounds: gammas must have d entries");
    for (double g : in.gammas.gamma)
      if (!(g > 0.0)) throw ParameterError("theorem_bounds: Lipschitz constants must be > 0");
    if (in.gammas.all_finite()) {
      const double agg = in.B + in.gammas.sum_finite() * (in.b - in.a);
      if (in.eps <= in.eps0 * agg) t.lipschitz_upper = in.c_up * std::pow(agg / in.eps, d / 2.0);
    }
  }
  return t;
}

}  // namespace metent::schedule
