// metent: packing constructions, schedule checks, inequality batches and
// scaling sweeps from the command line.
//
// Exit codes: 0 success, 1 a verification failed, 2 invalid configuration.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "metent/errors.hpp"
#include "metent/exact.hpp"
#include "metent/io.hpp"
#include "metent/packing.hpp"
#include "metent/schedule.hpp"
#include "metent/verify.hpp"

namespace {

using namespace metent;
using io::Json;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kInvalid = 2;

struct Globals {
  std::string out = ".";
  std::uint64_t seed = 0;
  std::size_t grid = 0;        // 0: command default
  std::size_t directions = 0;  // 0: command default
  bool json = false;
};

std::string out_path(const Globals& g, const std::string& name) {
  return (std::filesystem::path(g.out) / name).string();
}

void emit_json(const Globals& g, const Json& summary) {
  if (g.json) std::cout << summary.dump(2) << '\n';
}

// pack ----------------------------------------------------------------------

struct PackOptions {
  std::size_t d = 1;
  std::string eta;
  std::size_t vg_budget = 1'000'000;
  std::size_t curve_points = 5;
};

int cmd_pack(const Globals& g, const PackOptions& o) {
  const ExactNumber eta = parse_exact(o.eta);
  const auto fam = packing::build_packing_family(eta.value, o.d, g.seed, o.vg_budget);
  GridSpec grid = packing::default_certificate_grid(fam.system);
  if (g.grid != 0) grid.n = g.grid;
  const auto cert = packing::packing_certificate(fam, grid);

  std::vector<Rational> etas;
  Rational e = eta.value;
  for (std::size_t m = 0; m < o.curve_points; ++m, e /= 4) etas.push_back(e);
  const auto curve = packing::lower_bound_curve(o.d, etas);

  io::write_file(out_path(g, "packing_family.json"), io::to_json(fam).dump(1) + "\n");
  std::ostringstream cs, vs;
  io::write_certificate_csv(cs, cert);
  io::write_curve_csv(vs, curve, o.d);
  io::write_file(out_path(g, "certificate.csv"), cs.str());
  io::write_file(out_path(g, "lower_bound_curve.csv"), vs.str());

  const bool pass = cert.all_pass && cert.member_bound_violations == 0;
  std::printf("pack d=%zu eta=%s: k=%zu cells=%zu words=%zu (target %zu%s) min distance %zu\n", o.d,
              to_string(eta.value).c_str(), fam.system.k, fam.system.cell_count(), fam.code.words.size(),
              fam.code_target, fam.code_shortfall ? ", shortfall" : "", fam.code.min_distance);
  std::printf("certificate: %zu pairs, grid n=%zu, min l1 %s vs guaranteed %s, quadrature error %s: %s\n",
              cert.rows.size(), cert.grid.n, io::short_decimal(cert.min_observed).c_str(),
              io::short_decimal(cert.guaranteed_sep).c_str(), io::short_decimal(cert.quadrature_error).c_str(),
              pass ? "PASS" : "FAIL");
  emit_json(g, Json{{"command", "pack"},
                    {"d", o.d},
                    {"eta", to_string(eta.value)},
                    {"k", fam.system.k},
                    {"words", fam.code.words.size()},
                    {"min_observed", cert.min_observed},
                    {"guaranteed_separation", cert.guaranteed_sep},
                    {"quadrature_error", cert.quadrature_error},
                    {"pass", pass}});
  return pass ? kOk : kFailed;
}

// schedule ------------------------------------------------------------------

struct ScheduleOptions {
  double p = 1.0;
  std::string eta;
  std::size_t d = 1;
};

int cmd_schedule(const Globals& g, const ScheduleOptions& o) {
  const ExactNumber eta = parse_exact(o.eta);
  if (!(eta.value > 0)) throw ParameterError("schedule: eta must be positive");
  const double log_eta = eta.log();
  const auto sched = schedule::strip_schedule(log_eta, o.p);
  if (sched.empty()) {
    const Json j = io::empty_schedule_json(log_eta, o.p, sched.log_u);
    io::write_file(out_path(g, "report.json"), j.dump(1) + "\n");
    io::write_file(out_path(g, "schedule.csv"), "m,log_delta,log_alpha,log_zeta,ratio,ratio_pass,zeta_le_one\n");
    std::printf("schedule p=%s eta=%s: empty schedule (A = 0), eta^p >= u\n", io::short_decimal(o.p).c_str(),
                eta.text.c_str());
    emit_json(g, Json{{"command", "schedule"}, {"A", 0}, {"empty", true}, {"pass", true}});
    return kOk;
  }
  const auto r = schedule::verify_schedule(log_eta, o.p, o.d);
  Json j = io::to_json(r);
  j["eta"] = eta.text;
  io::write_file(out_path(g, "report.json"), j.dump(1) + "\n");
  std::ostringstream cs;
  io::write_schedule_csv(cs, r);
  io::write_file(out_path(g, "schedule.csv"), cs.str());
  std::printf("schedule p=%s eta=%s d=%zu: A=%zu\n", io::short_decimal(o.p).c_str(), eta.text.c_str(), o.d, r.A);
  std::printf("  zeta ratios >= 2: %s\n", r.ratios_pass ? "pass" : "FAIL");
  std::printf("  log S1 %s <= log(7/3 eta^p) %s: %s\n", io::short_decimal(r.log_S1).c_str(),
              io::short_decimal(r.log_S1_bound).c_str(), r.S1_pass ? "pass" : "FAIL");
  std::printf("  sum zeta^2 %s <= 4/3: %s\n", io::short_decimal(r.sum_zeta_sq).c_str(),
              r.sum_zeta_sq_pass ? "pass" : "FAIL");
  std::printf("  sum zeta^d %s <= %s: %s\n", io::short_decimal(r.sum_zeta_d).c_str(),
              io::short_decimal(r.sum_zeta_d_bound).c_str(), r.sum_zeta_d_pass ? "pass" : "FAIL");
  std::printf("  closed form vs definition %s: %s\n", io::short_decimal(r.closed_form_discrepancy).c_str(),
              r.closed_form_pass ? "pass" : "FAIL");
  emit_json(g, Json{{"command", "schedule"}, {"A", r.A}, {"empty", false}, {"pass", r.all_pass}});
  return r.all_pass ? kOk : kFailed;
}

// verify --------------------------------------------------------------------

struct VerifyOptions {
  std::string only = "all";
  double alpha = 1.0;
  double p = 1.0;
  int j = 1;
  int k = 3;
  std::vector<std::size_t> dims{1, 2};
};

verify::BatchSettings batch_for(const Globals& g, std::size_t d) {
  auto s = verify::default_batch(d);
  if (g.grid != 0) s.grid.n = g.grid;
  if (g.directions != 0) s.n_directions = g.directions;
  return s;
}

void append(std::vector<verify::InequalityReport>& all, std::vector<verify::InequalityReport> more) {
  for (auto& r : more) all.push_back(std::move(r));
}

void print_batch(const std::string& label, const std::vector<verify::InequalityReport>& reports) {
  const auto s = verify::summarize(reports);
  std::printf("%-28s %zu/%zu pass", label.c_str(), s.passed, s.total);
  if (s.max_ratio > 0.0) std::printf("  (max l1/l_H %s)", io::short_decimal(s.max_ratio).c_str());
  std::printf("\n");
  for (const auto& f : s.failures) std::printf("    failed: %s\n", f.c_str());
}

int cmd_verify(const Globals& g, const VerifyOptions& o) {
  static const std::vector<std::string> kinds{"all",          "hinge",     "ratio",       "fjfamily", "sup-hausdorff",
                                              "l1-hausdorff", "pointwise", "subgradient", "scaling"};
  if (std::find(kinds.begin(), kinds.end(), o.only) == kinds.end())
    throw ParameterError("verify: unknown --only value '" + o.only + "'");
  for (std::size_t d : o.dims)
    if (d == 0 || d > kMaxDim) throw ParameterError("verify: --d values must be in [1, 8]");
  const bool all = o.only == "all";
  std::vector<verify::InequalityReport> reports;
  GridSpec hinge_grid{4001, QuadratureRule::midpoint};
  if (g.grid != 0) hinge_grid.n = g.grid;
  const std::size_t hinge_dirs = g.directions != 0 ? g.directions : 256;

  if (o.only == "hinge") {
    const auto h = verify::hinge_case(o.alpha, o.p, hinge_grid, hinge_dirs);
    std::printf("hinge alpha=%s p=%s\n", io::short_decimal(o.alpha).c_str(), io::short_decimal(o.p).c_str());
    std::printf("  L_p  %s  closed form %s\n", io::short_decimal(h.values.lp_numeric).c_str(),
                io::short_decimal(h.values.lp_closed).c_str());
    std::printf("  l_H  %s  closed form %s\n", io::short_decimal(h.values.hausdorff_numeric).c_str(),
                io::short_decimal(h.values.hausdorff_closed).c_str());
    reports.push_back(h.lp);
    reports.push_back(h.hausdorff);
  }
  if (all) {
    std::vector<verify::InequalityReport> hinge;
    for (double a : {1.0, 0.25, 0.01})
      for (double p : {1.0, 2.0}) {
        const auto h = verify::hinge_case(a, p, hinge_grid, hinge_dirs);
        hinge.push_back(h.lp);
        hinge.push_back(h.hausdorff);
      }
    print_batch("hinge closed forms", hinge);
    append(reports, std::move(hinge));
  }
  if (all || o.only == "ratio") {
    for (double p : {1.0, 2.0}) {
      const auto t = verify::hinge_ratio_table(p, {1.0, 0.25, 0.01}, hinge_grid, hinge_dirs);
      std::printf("ratio table p=%s:", io::short_decimal(p).c_str());
      for (const auto& row : t.rows)
        std::printf("  alpha=%s ratio=%s", io::short_decimal(row.alpha).c_str(), io::short_decimal(row.ratio).c_str());
      std::printf("%s\n", t.monotone_increasing ? "  (increasing)" : "");
      if (p > 1.0) {
        // Divergence as alpha -> 0 shows there is no L_p analogue for p > 1.
        std::size_t drops = 0;
        for (std::size_t i = 1; i < t.rows.size(); ++i) drops += t.rows[i].ratio > t.rows[i - 1].ratio ? 0 : 1;
        Json in{{"p", p}};
        for (const auto& row : t.rows) in["ratios"].push_back(row.ratio);
        reports.push_back(verify::make_report("hinge_ratio_divergence", static_cast<double>(drops), 0.0, 0.0, in));
      }
    }
  }
  if (o.only == "fjfamily") {
    const auto r = verify::non_total_bounded_family(o.j, o.k);
    std::printf("f_j family j=%d k=%d: |f_j - f_k| at 2^-%d = %s >= 0.5: %s\n", o.j, o.k, o.k,
                io::short_decimal(r.rhs).c_str(), r.pass ? "pass" : "FAIL");
    reports.push_back(r);
  }
  if (all) {
    std::vector<verify::InequalityReport> fj;
    for (int j = 1; j <= 10; ++j)
      for (int k = j + 1; k <= 10; ++k) fj.push_back(verify::non_total_bounded_family(j, k));
    print_batch("f_j family (j<k<=10)", fj);
    append(reports, std::move(fj));
  }
  for (std::size_t d : o.dims) {
    const auto s = batch_for(g, d);
    const std::string tag = " d=" + std::to_string(d);
    if (all || o.only == "sup-hausdorff") {
      auto r = verify::sup_hausdorff_batch(s);
      print_batch("sup vs Hausdorff" + tag, r);
      append(reports, std::move(r));
    }
    if (all || o.only == "l1-hausdorff") {
      auto r = verify::l1_hausdorff_batch(s);
      print_batch("L1 vs Hausdorff" + tag, r);
      append(reports, std::move(r));
    }
    if (all || o.only == "pointwise") {
      auto r = verify::pointwise_batch(s);
      print_batch("pointwise subgradient" + tag, r);
      append(reports, std::move(r));
    }
    if (all || o.only == "subgradient") {
      auto r = verify::subgradient_batch(s);
      print_batch("subgradient integral" + tag, r);
      append(reports, std::move(r));
    }
  }
  if (all || o.only == "scaling") {
    const Rect r02 = Rect::cube(1, 0.0, 2.0);
    std::vector<verify::InequalityReport> sc{verify::check_scaling_identity(
        ConvexFunction::affine(r02, {1.0}, 0.0), ConvexFunction::affine(r02, {0.0}, 0.0), 3.0, 1.0,
        GridSpec{g.grid != 0 ? g.grid : 1001, QuadratureRule::midpoint})};
    append(sc, verify::scaling_batch(g.seed, GridSpec{g.grid != 0 ? g.grid : 257, QuadratureRule::midpoint}));
    print_batch("scaling identity", sc);
    append(reports, std::move(sc));
  }

  std::ostringstream js, cs;
  io::write_jsonl(js, reports);
  io::write_summary_csv(cs, reports);
  io::write_file(out_path(g, "reports.jsonl"), js.str());
  io::write_file(out_path(g, "verify_summary.csv"), cs.str());
  const auto s = verify::summarize(reports);
  std::printf("verify: %zu/%zu reports pass\n", s.passed, s.total);
  emit_json(g, Json{{"command", "verify"}, {"only", o.only}, {"total", s.total}, {"passed", s.passed},
                    {"pass", s.passed == s.total}});
  return s.passed == s.total ? kOk : kFailed;
}

// scaling -------------------------------------------------------------------

struct ScalingOptions {
  std::size_t d = 1;
  std::vector<std::string> etas;
};

std::vector<std::string> default_sweep(std::size_t d) {
  if (d == 1) return {"1/25", "1/100", "1/400", "1/1600", "1/6400"};
  // k = 2, 4, ..., 32 exactly for d = 2: eta = 4 / (9 k^2).
  if (d == 2) return {"1/9", "1/36", "1/144", "1/576", "1/2304"};
  return {"1/100", "1/400", "1/1600", "1/6400"};
}

int cmd_scaling(const Globals& g, const ScalingOptions& o) {
  const auto texts = o.etas.empty() ? default_sweep(o.d) : o.etas;
  std::vector<Rational> etas;
  for (const auto& t : texts) etas.push_back(parse_exact(t).value);
  if (etas.empty()) throw ParameterError("scaling: empty sweep");
  const auto curve = packing::lower_bound_curve(o.d, etas);

  std::ostringstream cs;
  io::write_curve_csv(cs, curve, o.d);
  io::write_file(out_path(g, "scaling.csv"), cs.str());
  io::PlotSeries pts;
  for (const auto& pt : curve) {
    pts.x.push_back(1.0 / pt.epsilon);
    pts.y.push_back(pt.log_m);
  }
  const double ref = static_cast<double>(o.d) / 2.0;
  io::write_file(out_path(g, "scaling.svg"),
                 io::loglog_svg(pts, ref, "log M vs 1/epsilon, d = " + std::to_string(o.d), "1/epsilon", "log M"));

  std::printf("%-14s %4s %-14s %-14s %-14s\n", "eta", "k", "epsilon", "log M", "log M eps^d/2");
  for (const auto& pt : curve)
    std::printf("%-14s %4zu %-14s %-14s %-14s\n", to_string(pt.eta).c_str(), pt.k,
                io::short_decimal(pt.epsilon).c_str(), io::short_decimal(pt.log_m).c_str(),
                io::short_decimal(pt.log_m * std::pow(pt.epsilon, ref)).c_str());
  Json summary{{"command", "scaling"}, {"d", o.d}, {"points", curve.size()}};
  if (curve.size() >= 2) {
    const double slope = packing::loglog_slope(curve);
    const double spread = packing::scaled_spread(curve, o.d);
    std::printf("fitted slope %s (reference %s), spread of log M eps^d/2: %s\n", io::short_decimal(slope).c_str(),
                io::short_decimal(ref).c_str(), io::short_decimal(spread).c_str());
    summary["slope"] = slope;
    summary["spread"] = spread;
  }
  emit_json(g, summary);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metric entropy of bounded convex function classes: constructions and checks"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may also follow the subcommand
  Globals g;
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--grid", g.grid, "Grid points per axis (0: command default)");
  app.add_option("--directions", g.directions, "Hausdorff direction count (0: command default)");
  app.add_flag("--json", g.json, "Print a JSON summary on stdout");

  PackOptions po;
  auto* pack = app.add_subcommand(
      "pack",
      "Build the L1 packing family and certify it.\n"
      "Writes packing_family.json, certificate.csv (i,j,hamming,l1_distance,bound,margin,pass)\n"
      "and lower_bound_curve.csv (eta,k,epsilon,log_m,log_m_eps_scaled).");
  pack->add_option("--d", po.d, "Dimension")->capture_default_str();
  pack->add_option("--eta", po.eta, "Cell scale, exact rational such as 1/25 or 2^-6")->required();
  pack->add_option("--vg-budget", po.vg_budget, "Random candidates for the code search")->capture_default_str();
  pack->add_option("--curve-points", po.curve_points, "Points eta, eta/4, ... on the lower-bound curve")
      ->capture_default_str()
      ->check(CLI::Range(1, 64));

  ScheduleOptions so;
  auto* sched = app.add_subcommand(
      "schedule",
      "Check the strip-schedule inequalities.\n"
      "Writes schedule.csv (m,log_delta,log_alpha,log_zeta,ratio,ratio_pass,zeta_le_one) and report.json.");
  sched->add_option("--p", so.p, "Exponent p >= 1")->capture_default_str();
  sched->add_option("--eta", so.eta, "eta in (0,1), exact, e.g. 2^-96")->required();
  sched->add_option("--d", so.d, "Dimension for the sum of zeta^d")->capture_default_str();

  VerifyOptions vo;
  auto* ver = app.add_subcommand(
      "verify",
      "Run the inequality, identity and counterexample checks.\n"
      "Writes reports.jsonl and verify_summary.csv (name,lhs,rhs,slack,tolerance,pass).");
  ver->add_option("--only", vo.only, "all|hinge|ratio|fjfamily|sup-hausdorff|l1-hausdorff|pointwise|subgradient|scaling")
      ->capture_default_str();
  ver->add_option("--alpha", vo.alpha, "Hinge parameter for --only hinge")->capture_default_str();
  ver->add_option("--p", vo.p, "Exponent for --only hinge")->capture_default_str();
  ver->add_option("--j", vo.j, "f_j index for --only fjfamily")->capture_default_str();
  ver->add_option("--k", vo.k, "f_k index for --only fjfamily")->capture_default_str();
  ver->add_option("--d", vo.dims, "Dimensions for the random batches")->capture_default_str();

  ScalingOptions sco;
  auto* scal = app.add_subcommand(
      "scaling",
      "Sweep eta along the packing lower bound.\n"
      "Writes scaling.csv (eta,k,epsilon,log_m,log_m_eps_scaled) and scaling.svg.");
  scal->add_option("--d", sco.d, "Dimension")->capture_default_str();
  scal->add_option("--etas", sco.etas, "Sweep values, exact rationals")->expected(0, -1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  try {
    if (*pack) return cmd_pack(g, po);
    if (*sched) return cmd_schedule(g, so);
    if (*ver) return cmd_verify(g, vo);
    if (*scal) {
      std::erase(sco.etas, std::string{});
      if (scal->count("--etas") > 0 && sco.etas.empty()) throw ParameterError("scaling: empty sweep list");
      return cmd_scaling(g, sco);
    }
  } catch (const ParameterError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInvalid;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInvalid;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kFailed;
  }
  return kInvalid;
}
