#include "metent/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <limits>

#include "metent/errors.hpp"
#include "metent/kernels.hpp"
#include "metent/random.hpp"

namespace metent::verify {

InequalityReport make_report(std::string name, double lhs, double rhs, double tolerance, Json inputs) {
  InequalityReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.tolerance = tolerance;
  r.pass = lhs <= rhs + tolerance;
  r.inputs = std::move(inputs);
  return r;
}

InequalityReport refine_until_stable(std::string name, Json inputs, std::size_t d, Resolution base,
                                     const std::function<Level(const Resolution&)>& eval) {
  Json levels = Json::array();
  Level last;
  bool prev_verdict = false;
  for (std::size_t L = 0; L <= kMaxRefinements; ++L) {
    Resolution r{GridSpec{(base.grid.n - 1) * (std::size_t{1} << L) + 1, base.grid.rule},
                 base.n_directions << L};
    if (L > 0) {
      try {
        checked_node_count(2 * r.grid.n - 1, d);
      } catch (const ParameterError&) {
        break;
      }
    }
    last = eval(r);
    const bool verdict = last.lhs <= last.rhs + last.tolerance;
    levels.push_back(Json{{"n", r.grid.n},
                          {"directions", r.n_directions},
                          {"lhs", last.lhs},
                          {"rhs", last.rhs},
                          {"tolerance", last.tolerance},
                          {"pass", verdict},
                          {"detail", last.detail}});
    if (L >= 1 && verdict == prev_verdict) break;
    prev_verdict = verdict;
  }
  inputs["levels"] = std::move(levels);
  return make_report(std::move(name), last.lhs, last.rhs, last.tolerance, std::move(inputs));
}

namespace {

double euclid(const std::vector<double>& v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

void require_unit(const ConvexFunction& f, const char* who) {
  if (!f.domain().is_unit()) throw ParameterError(std::string(who) + ": function must live on [0,1]^d");
}

template <class Fn>
std::vector<InequalityReport> parallel_map(std::size_t count, Fn&& fn) {
  std::vector<InequalityReport> out(count);
  std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<std::uint64_t> seeds_or_default(const BatchSettings& s) {
  if (!s.seeds.empty()) return s.seeds;
  std::vector<std::uint64_t> out(50);
  for (std::uint64_t i = 0; i < 50; ++i) out[i] = i;
  return out;
}

constexpr double kRoundoff = 1e-12;

}  // namespace

InequalityReport check_sup_hausdorff(const ConvexFunction& f, const ConvexFunction& g, double bound,
                             const LipschitzVector& gammas, GridSpec grid, std::size_t n_directions) {
  require_unit(f, "check_sup_hausdorff");
  if (gammas.dim() != f.dim()) throw ParameterError("check_sup_hausdorff: gammas must have d entries");
  const double factor = std::sqrt(1.0 + gammas.sum_squares());
  Json inputs{{"d", f.dim()}, {"bound", bound}, {"gammas", gammas.gamma}, {"lipschitz_factor", factor}};
  return refine_until_stable("sup_hausdorff", std::move(inputs), f.dim(), {grid, n_directions},
                             [&](const Resolution& r) {
                               const auto sup = linf_grid_distance(f, g, GridSpec{r.grid.n, QuadratureRule::trapezoid});
                               const auto h = hausdorff_epigraph(f, g, bound, r.n_directions, r.grid);
                               return Level{sup.value, h.value * factor, h.error_estimate * factor + kRoundoff,
                                            Json{{"linf", sup.value},
                                                 {"hausdorff", h.value},
                                                 {"hausdorff_error", h.error_estimate}}};
                             });
}

InequalityReport check_l1_hausdorff(const ConvexFunction& f, const ConvexFunction& g, GridSpec grid,
                            std::size_t n_directions) {
  require_unit(f, "check_l1_hausdorff");
  const double c = 1.0 + 20.0 * static_cast<double>(f.dim());
  double ratio = 0.0;
  Json inputs{{"d", f.dim()}, {"constant", c}};
  auto rep = refine_until_stable("l1_hausdorff", std::move(inputs), f.dim(), {grid, n_directions},
                                 [&](const Resolution& r) {
                                   const auto l1 = lp_distance(f, g, 1.0, r.grid);
                                   const auto h = hausdorff_epigraph(f, g, 1.0, r.n_directions, r.grid);
                                   ratio = h.value > 0.0 ? l1.value / h.value : 0.0;
                                   return Level{l1.value, c * h.value,
                                                l1.error_estimate + c * h.error_estimate + kRoundoff,
                                                Json{{"l1", l1.value},
                                                     {"l1_error", l1.error_estimate},
                                                     {"hausdorff", h.value},
                                                     {"hausdorff_error", h.error_estimate}}};
                                 });
  rep.inputs["ratio"] = ratio;
  return rep;
}

InequalityReport check_pointwise_subgradient_bound(const ConvexFunction& f, const ConvexFunction& g,
                                                   std::span<const double> x, double bound,
                                                   const DistanceReport& hausdorff) {
  const double lhs = std::abs(f.eval(x) - g.eval(x));
  const double mf = euclid(f.subgradient(x));
  const double mg = euclid(g.subgradient(x));
  const double factor = 1.0 + mf + mg;
  Json inputs{{"x", std::vector<double>(x.begin(), x.end())},
              {"bound", bound},
              {"rho", hausdorff.value},
              {"rho_error", hausdorff.error_estimate},
              {"norm_mf", mf},
              {"norm_mg", mg}};
  return make_report("pointwise_subgradient", lhs, hausdorff.value * factor,
                     hausdorff.error_estimate * factor + kRoundoff, std::move(inputs));
}

namespace {

double subgradient_norm_integral(const ConvexFunction& f, const Rect& inner, GridSpec grid) {
  const TensorGrid tg(inner, grid);
  return kernels::parallel::weighted_sum(tg, [&](const double* x) {
    std::array<double, kMaxDim> m{};
    f.subgradient_unchecked(x, m.data());
    double s = 0.0;
    for (std::size_t i = 0; i < f.dim(); ++i) s += m[i] * m[i];
    return std::sqrt(s);
  });
}

}  // namespace

InequalityReport check_subgradient_integral(const ConvexFunction& f, double rho, GridSpec grid) {
  require_unit(f, "check_subgradient_integral");
  if (!(rho > 0.0 && rho < 0.5)) throw ParameterError("check_subgradient_integral: need 0 < rho < 1/2");
  if (grid.rule != QuadratureRule::midpoint)
    throw ParameterError("check_subgradient_integral: subgradients need interior (midpoint) nodes");
  const std::size_t d = f.dim();
  checked_node_count(grid.n, d);
  const Rect inner = Rect::cube(d, rho, 1.0 - rho);
  const double v = subgradient_norm_integral(f, inner, grid);
  GridSpec fine{2 * grid.n - 1, grid.rule};
  try {
    checked_node_count(fine.n, d);
  } catch (const ParameterError&) {
    fine.n = std::max<std::size_t>(2, (grid.n + 1) / 2);
  }
  const double w = subgradient_norm_integral(f, inner, fine);
  return make_report("subgradient_integral", v, 8.0 * static_cast<double>(d), std::abs(v - w) + kRoundoff,
                     Json{{"d", d}, {"rho", rho}, {"n", grid.n}, {"comparison", w}});
}

namespace {

// Largest midpoint integral of |partial_i f| over axis lines of the inner cube.
double max_slice_integral(const ConvexFunction& f, double rho, std::size_t lines, std::size_t n) {
  const std::size_t d = f.dim();
  const double len = 1.0 - 2.0 * rho;
  double best = 0.0;
  std::size_t transverse = 1;
  for (std::size_t i = 1; i < d; ++i) transverse *= lines;
  std::array<double, kMaxDim> x{};
  std::array<double, kMaxDim> m{};
  for (std::size_t axis = 0; axis < d; ++axis) {
    for (std::size_t t = 0; t < transverse; ++t) {
      std::size_t rem = t;
      for (std::size_t i = 0; i < d; ++i) {
        if (i == axis) continue;
        x[i] = rho + len * (static_cast<double>(rem % lines) + 0.5) / static_cast<double>(lines);
        rem /= lines;
      }
      kernels::CompensatedSum acc;
      const double h = len / static_cast<double>(n);
      for (std::size_t j = 0; j < n; ++j) {
        x[axis] = rho + h * (static_cast<double>(j) + 0.5);
        f.subgradient_unchecked(x.data(), m.data());
        acc.add(h * std::abs(m[axis]));
      }
      best = std::max(best, acc.value());
    }
  }
  return best;
}

}  // namespace

InequalityReport check_slice_variation(const ConvexFunction& f, double rho, std::size_t lines, std::size_t n) {
  require_unit(f, "check_slice_variation");
  if (!(rho > 0.0 && rho < 0.5)) throw ParameterError("check_slice_variation: need 0 < rho < 1/2");
  if (lines == 0 || n < 2) throw ParameterError("check_slice_variation: need lines >= 1 and n >= 2");
  const double v = max_slice_integral(f, rho, lines, n);
  const double w = max_slice_integral(f, rho, lines, 2 * n - 1);
  return make_report("slice_variation", v, 4.0, std::abs(v - w) + kRoundoff,
                     Json{{"d", f.dim()}, {"rho", rho}, {"lines", lines}, {"n", n}, {"comparison", w}});
}

HingeResult hinge_case(double alpha, double p, GridSpec grid, std::size_t n_directions, double lp_accuracy,
                       double hausdorff_accuracy) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("hinge_case: need 0 < alpha <= 1");
  if (!(p >= 1.0) || !std::isfinite(p)) throw ParameterError("hinge_case: need 1 <= p < inf");
  const Rect unit = Rect::unit(1);
  const auto f = ConvexFunction::hinge(unit, alpha);
  const auto g = ConvexFunction::affine(unit, {0.0}, 0.0);

  HingeResult out;
  HingeCase& c = out.values;
  c.alpha = alpha;
  c.p = p;
  c.lp_closed = std::pow(alpha, 1.0 / p) / std::pow(1.0 + p, 1.0 / p);
  c.hausdorff_closed = alpha / std::sqrt(1.0 + alpha * alpha);
  const auto lp = lp_distance(f, g, p, grid);
  const auto h = hausdorff_epigraph(f, g, 1.0, n_directions, GridSpec{grid.n, QuadratureRule::trapezoid});
  c.lp_numeric = lp.value;
  c.hausdorff_numeric = h.value;

  const Json common{{"alpha", alpha}, {"p", p}, {"n", grid.n}, {"directions", n_directions}};
  Json lp_in = common;
  lp_in["numeric"] = lp.value;
  lp_in["closed"] = c.lp_closed;
  lp_in["error_estimate"] = lp.error_estimate;
  out.lp = make_report("hinge_lp", std::abs(lp.value - c.lp_closed), lp_accuracy, 0.0, std::move(lp_in));
  Json h_in = common;
  h_in["numeric"] = h.value;
  h_in["closed"] = c.hausdorff_closed;
  h_in["error_estimate"] = h.error_estimate;
  out.hausdorff = make_report("hinge_hausdorff", std::abs(h.value - c.hausdorff_closed), hausdorff_accuracy, 0.0,
                              std::move(h_in));
  return out;
}

RatioTable hinge_ratio_table(double p, const std::vector<double>& alphas, GridSpec grid, std::size_t n_directions) {
  RatioTable t;
  t.p = p;
  t.monotone_increasing = true;
  for (double a : alphas) {
    const auto r = hinge_case(a, p, grid, n_directions);
    RatioRow row{a, r.values.lp_numeric, r.values.hausdorff_numeric, r.values.lp_numeric / r.values.hausdorff_numeric};
    if (!t.rows.empty() && !(row.ratio > t.rows.back().ratio)) t.monotone_increasing = false;
    t.rows.push_back(row);
  }
  return t;
}

InequalityReport non_total_bounded_family(int j, int k, GridSpec grid) {
  if (!(1 <= j && j < k && k <= 40)) throw ParameterError("non_total_bounded_family: need 1 <= j < k <= 40");
  const Rect unit = Rect::unit(1);
  const auto fj = ConvexFunction::hinge(unit, std::ldexp(1.0, -j));
  const auto fk = ConvexFunction::hinge(unit, std::ldexp(1.0, -k));
  const double t = std::ldexp(1.0, -k);
  const double witness = std::abs(fj.eval_unchecked(&t) - fk.eval_unchecked(&t));
  // 1 - 2^{j-k} is a dyadic rational with at most 40 bits, so it is exact.
  const double exact = 1.0 - std::ldexp(1.0, j - k);
  if (witness != exact) throw InvariantViolation("non_total_bounded_family: witness is not 1 - 2^(j-k)");

  double grid_sup = 0.0;
  for (double x : vertex_nodes(unit, grid.n)) grid_sup = std::max(grid_sup, std::abs(fj.eval_unchecked(&x) - fk.eval_unchecked(&x)));
  for (int m = 0; m <= 60; ++m) {
    const double x = std::ldexp(1.0, -m);
    grid_sup = std::max(grid_sup, std::abs(fj.eval_unchecked(&x) - fk.eval_unchecked(&x)));
  }
  if (grid_sup < witness) throw InvariantViolation("non_total_bounded_family: grid sup below the witness");
  return make_report("fj_family", 0.5, witness, 0.0,
                     Json{{"j", j}, {"k", k}, {"point", t}, {"witness", witness}, {"grid_linf", grid_sup}});
}

InequalityReport check_scaling_identity(const ConvexFunction& f, const ConvexFunction& g, double bound, double p,
                                        GridSpec grid) {
  if (!(f.domain() == g.domain())) throw ParameterError("check_scaling_identity: domains differ");
  if (!(bound > 0.0)) throw ParameterError("check_scaling_identity: bound must be > 0");
  const double vol = f.domain().volume();
  const auto scaled = lp_distance(rescale_to_unit(f, bound), rescale_to_unit(g, bound), p, grid);
  const auto raw = lp_distance(f, g, p, grid);
  const double factor = std::pow(vol, -1.0 / p) / bound;
  const double rhs_value = factor * raw.value;
  const double tol = scaled.error_estimate + factor * raw.error_estimate +
                     kRoundoff * std::max(1.0, std::abs(scaled.value));
  return make_report("scaling_identity", std::abs(scaled.value - rhs_value), tol, 0.0,
                     Json{{"d", f.dim()},
                          {"p", p},
                          {"bound", bound},
                          {"lo", f.domain().lo()},
                          {"hi", f.domain().hi()},
                          {"unit_side", scaled.value},
                          {"original_side", rhs_value}});
}

RandomPair random_pair(std::size_t d, std::uint64_t seed) {
  const std::size_t pieces = 2 + static_cast<std::size_t>(seed % 7);
  return RandomPair{make_random_convex(d, 1.0, pieces, 2 * seed).function,
                    make_random_convex(d, 1.0, pieces, 2 * seed + 1).function};
}

BatchSettings default_batch(std::size_t d) {
  BatchSettings s;
  s.d = d;
  if (d == 1) {
    s.grid = GridSpec{1025, QuadratureRule::midpoint};
    s.n_directions = 256;
  } else if (d == 2) {
    s.grid = GridSpec{65, QuadratureRule::midpoint};
    s.n_directions = 512;
  } else {
    s.grid = GridSpec{17, QuadratureRule::midpoint};
    s.n_directions = 1024;
  }
  return s;
}

std::vector<InequalityReport> sup_hausdorff_batch(const BatchSettings& s) {
  const auto seeds = seeds_or_default(s);
  return parallel_map(seeds.size(), [&](std::size_t i) {
    const auto pair = random_pair(s.d, seeds[i]);
    const auto gf = coordinate_lipschitz_bound(pair.f);
    const auto gg = coordinate_lipschitz_bound(pair.g);
    LipschitzVector gamma;
    for (std::size_t a = 0; a < s.d; ++a) gamma.gamma.push_back(std::max(gf.gamma[a], gg.gamma[a]));
    auto rep = check_sup_hausdorff(pair.f, pair.g, 1.0, gamma, s.grid, s.n_directions);
    rep.inputs["seed"] = seeds[i];
    return rep;
  });
}

std::vector<InequalityReport> l1_hausdorff_batch(const BatchSettings& s) {
  const auto seeds = seeds_or_default(s);
  return parallel_map(seeds.size(), [&](std::size_t i) {
    const auto pair = random_pair(s.d, seeds[i]);
    auto rep = check_l1_hausdorff(pair.f, pair.g, s.grid, s.n_directions);
    rep.inputs["seed"] = seeds[i];
    return rep;
  });
}

std::vector<InequalityReport> pointwise_batch(const BatchSettings& s) {
  const auto seeds = seeds_or_default(s);
  return parallel_map(seeds.size(), [&](std::size_t i) {
    const auto pair = random_pair(s.d, seeds[i]);
    const auto h = hausdorff_epigraph(pair.f, pair.g, 1.0, s.n_directions, s.grid);
    Rng rng(0x9e3779b97f4a7c15ULL ^ seeds[i]);
    std::vector<double> x(s.d);
    InequalityReport worst;
    bool first = true;
    for (int k = 0; k < 100; ++k) {
      for (double& c : x) c = rng.open01();
      auto rep = check_pointwise_subgradient_bound(pair.f, pair.g, x, 1.0, h);
      if (first || rep.rhs + rep.tolerance - rep.lhs < worst.rhs + worst.tolerance - worst.lhs) worst = rep;
      first = false;
    }
    worst.inputs["seed"] = seeds[i];
    worst.inputs["points"] = 100;
    return worst;
  });
}

std::vector<InequalityReport> subgradient_batch(const BatchSettings& s) {
  const auto seeds = seeds_or_default(s);
  auto reports = parallel_map(2 * seeds.size(), [&](std::size_t i) {
    const auto pair = random_pair(s.d, seeds[i / 2]);
    auto rep = i % 2 == 0 ? check_subgradient_integral(pair.f, 0.1, s.grid)
                          : check_slice_variation(pair.f, 0.1, 5, 2001);
    rep.inputs["seed"] = seeds[i / 2];
    return rep;
  });
  return reports;
}

std::vector<InequalityReport> scaling_batch(std::uint64_t seed, GridSpec grid) {
  constexpr std::size_t kCases = 20;
  struct Case {
    std::size_t d;
    double p, a, w, B;
    std::size_t pieces;
  };
  Rng rng(seed);
  std::vector<Case> cases;
  for (std::size_t c = 0; c < kCases; ++c) {
    const double ps[] = {1.0, 2.0, 3.0};
    Case k{1 + c % 2, ps[c % 3], 0.0, 0.0, 0.0, 2 + c % 5};
    k.a = rng.uniform(-2.0, 2.0);
    k.w = rng.uniform(0.5, 3.0);
    k.B = rng.uniform(0.5, 4.0);
    cases.push_back(k);
  }
  return parallel_map(kCases, [&](std::size_t c) {
    const Case& k = cases[c];
    const Rect rect = Rect::cube(k.d, k.a, k.a + k.w);
    const auto f = make_random_convex(rect, k.B, k.pieces, seed * 1000 + 2 * c).function;
    const auto g = make_random_convex(rect, k.B, k.pieces, seed * 1000 + 2 * c + 1).function;
    auto rep = check_scaling_identity(f, g, k.B, k.p, grid);
    rep.inputs["case"] = c;
    return rep;
  });
}

BatchSummary summarize(const std::vector<InequalityReport>& reports) {
  BatchSummary s;
  s.total = reports.size();
  for (const auto& r : reports) {
    if (r.pass)
      ++s.passed;
    else
      s.failures.push_back(r.name + (r.inputs.contains("seed") ? " seed " + r.inputs["seed"].dump() : ""));
    if (r.inputs.contains("ratio")) s.max_ratio = std::max(s.max_ratio, r.inputs["ratio"].get<double>());
  }
  return s;
}

}  // namespace metent::verify
