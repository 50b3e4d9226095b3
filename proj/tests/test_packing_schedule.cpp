#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "metent/errors.hpp"
#include "metent/exact.hpp"
#include "metent/packing.hpp"
#include "metent/random.hpp"
#include "metent/schedule.hpp"

using namespace metent;
using namespace metent::packing;

namespace {

constexpr double kLn2 = std::numbers::ln2;

// Gauss-Legendre nodes and weights on [-1, 1], three points (exact to degree 5).
constexpr double kGlNode[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr double kGlWeight[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

// Integral of |h_S - f0| over S, evaluated through the library functions.
double own_cell_gap(const IntervalSystem& sys, const CellIndex& cell) {
  const std::size_t d = sys.d;
  const auto h = perturbation_hS(sys, cell);
  const auto f0 = base_quadratic(d);
  std::size_t total = 1;
  for (std::size_t j = 0; j < d; ++j) total *= 3;
  double acc = 0.0;
  std::vector<double> x(d);
  for (std::size_t k = 0; k < total; ++k) {
    double w = 1.0;
    std::size_t r = k;
    for (std::size_t j = 0; j < d; ++j) {
      const auto [u, v] = sys.intervals[cell.idx[j]];
      const std::size_t q = r % 3;
      r /= 3;
      x[j] = (u + v) / 2 + (v - u) / 2 * kGlNode[q];
      w *= (v - u) / 2 * kGlWeight[q];
    }
    acc += w * std::abs(h.eval(x) - f0.eval(x));
  }
  return acc;
}

}  // namespace

TEST_SUITE("exact") {
  TEST_CASE("parsing keeps rationals exact") {
    CHECK(parse_exact("1/25").value == Rational(1, 25));
    CHECK(parse_exact("0.01").value == Rational(1, 100));
    CHECK(parse_exact("1e-3").value == Rational(1, 1000));
    CHECK(parse_exact("2.5E2").value == Rational(250));
    CHECK(parse_exact("4^-3/25").value == Rational(1, 1600));
    CHECK(parse_exact("-3").value == Rational(-3));
    const auto tiny = parse_exact("2^-200");
    CHECK(tiny.value == Rational(1) / (BigInt(1) << 200));
    CHECK(tiny.log() == doctest::Approx(-200 * kLn2).epsilon(1e-15));
    CHECK(parse_exact("1/3").to_double() == 1.0 / 3.0);
  }

  TEST_CASE("malformed numbers are rejected") {
    for (const char* s : {"", "abc", "1/0", "1//2", "2^", "0.1.2", "1e", "^3"})
      CHECK_THROWS_AS(parse_exact(s), ParameterError);
  }

  TEST_CASE("doubles convert exactly") {
    CHECK(exact_from_double(0.5) == Rational(1, 2));
    CHECK(exact_from_double(0.1) != Rational(1, 10));
    CHECK(static_cast<double>(exact_from_double(0.1)) == 0.1);
    CHECK(log_bigint(BigInt(1) << 3000) == doctest::Approx(3000 * kLn2).epsilon(1e-14));
  }
}

TEST_SUITE("packing") {
  TEST_CASE("interval system examples") {
    const auto s = build_interval_system(Rational(1, 25), 1);
    REQUIRE(s.k == 5);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(s.intervals[i].first == doctest::Approx(0.2 * i).epsilon(1e-15));
      CHECK(s.intervals[i].second == doctest::Approx(0.2 * (i + 1)).epsilon(1e-15));
    }
    const auto t = build_interval_system(Rational(4, 9), 1);
    CHECK(t.k == 1);
    CHECK(t.side() == doctest::Approx(2.0 / 3.0));
    const auto w = build_interval_system(Rational(1, 100), 2);
    REQUIRE(w.k == 6);
    CHECK(w.intervals[1].first - w.intervals[0].second == doctest::Approx(0.05));
    CHECK(w.intervals.back().second == doctest::Approx(0.85));
    CHECK(w.cell_count() == 36);
    CHECK(interval_count(Rational(1, 400), 2) == 13);
    CHECK_THROWS_AS(build_interval_system(Rational(3, 2), 1), ParameterError);
  }

  TEST_CASE("exact boundary of the interval count") {
    // 2 eta^{-1/2} / (2 + sqrt(d-1)) is an integer exactly at these eta.
    CHECK(interval_count(Rational(1, 25), 1) == 5);
    CHECK(interval_count(Rational(1, 9), 2) == 2);
    CHECK(interval_count(Rational(1, 2304), 2) == 32);
    CHECK(interval_count(Rational(1, 2304) + Rational(1, boost::multiprecision::pow(BigInt(10), 30)), 2) == 31);
    CHECK(interval_count(Rational(1), 1) == 1);
    CHECK(eta_upper_limit(1) == 1.0);
    CHECK(interval_count(Rational(4, 9), 2) == 1);
  }

  TEST_CASE("span never exceeds the unit interval") {
    for (std::size_t d = 1; d <= 4; ++d) {
      for (int m = 1; m <= 30; ++m) {
        const Rational eta = Rational(4, 9 * m * m);
        if (interval_count(eta, d) == 0) continue;
        const auto s = build_interval_system(eta, d);
        CHECK(s.intervals.back().second <= 1.0 + 1e-15);
        CHECK(s.intervals.front().first == 0.0);
      }
    }
  }

  TEST_CASE("cell numbering round-trips") {
    const auto s = build_interval_system(Rational(1, 100), 2);
    for (std::size_t f = 0; f < s.cell_count(); ++f) CHECK(flat_from_cell(s, cell_from_flat(s, f)) == f);
    const auto c = cell_from_flat(s, 7);
    CHECK(c.idx == std::vector<std::size_t>{1, 1});
  }

  TEST_CASE("bump examples") {
    const auto s = build_interval_system(Rational(1, 25), 1);
    const auto f0 = base_quadratic(1);
    const auto h0 = perturbation_hS(s, CellIndex{{0}});
    CHECK(h0.eval(std::vector<double>{0.1}) - f0.eval(std::vector<double>{0.1}) == doctest::Approx(0.01));
    const auto h1 = perturbation_hS(s, CellIndex{{1}});
    CHECK(h1.eval(std::vector<double>{0.3}) == doctest::Approx(0.10));
    CHECK(f0.eval(std::vector<double>{0.3}) == doctest::Approx(0.09));
  }

  TEST_CASE("bump properties hold on sampled points") {
    for (auto [eta, d] : std::vector<std::pair<Rational, std::size_t>>{
             {Rational(1, 25), 1}, {Rational(1, 100), 2}, {Rational(1, 16), 3}}) {
      const auto r = check_bump_properties(build_interval_system(eta, d), 2000, 11);
      CHECK(r.total_violations() == 0);
    }
  }

  TEST_CASE("zeta and c1 against independent formulas") {
    CHECK(zeta_exact(0.04, 1) == doctest::Approx(0.008 / 6.0).epsilon(1e-14));
    CHECK(packing_constant(1) == doctest::Approx(1.0 / 48.0).epsilon(1e-15));
    CHECK(packing_constant(2) == doctest::Approx(1.0 / 24.0 / 9.0).epsilon(1e-15));
    for (std::size_t d = 1; d <= 3; ++d) {
      const Rational eta = d == 1 ? Rational(1, 25) : d == 2 ? Rational(1, 100) : Rational(1, 36);
      const auto s = build_interval_system(eta, d);
      for (std::size_t f : {std::size_t{0}, s.cell_count() - 1}) {
        CHECK(std::abs(own_cell_gap(s, cell_from_flat(s, f)) - zeta_exact(s.eta, d)) < 1e-12);
      }
    }
  }

  TEST_CASE("binary words") {
    BinaryWord w(70);
    w.set(0, true);
    w.set(69, true);
    CHECK(w.popcount() == 2);
    CHECK(BinaryWord::from_hex(w.to_hex(), 70) == w);
    BinaryWord v(70);
    CHECK(w.hamming(v) == 2);
    w.set(0, false);
    CHECK(w.popcount() == 1);
  }

  TEST_CASE("Varshamov-Gilbert search examples") {
    const auto a = vg_code(8, 2, 3, 1, 1'000'000);
    CHECK_FALSE(a.shortfall);
    CHECK(a.code.words.size() >= 3);
    CHECK(exhaustive_min_distance(a.code) >= 2);
    const auto b = vg_code(1, 1, 2, 1, 1'000'000);
    CHECK(b.code.words.size() == 2);
    CHECK(vg_target(25) == 23);
    CHECK(vg_min_distance(25) == 7);
    const auto c = vg_code(25, 7, 23, 0, 1'000'000);
    CHECK_FALSE(c.shortfall);
    CHECK(exhaustive_min_distance(c.code) >= 7);
    // Impossible request: three words of length 2 pairwise 2 apart.
    const auto s = vg_code(2, 2, 3, 0, 1000);
    CHECK(s.shortfall);
    CHECK(s.code.words.size() == 2);
  }

  TEST_CASE("members: empty word gives f0, members stay in the class") {
    const auto s = build_interval_system(Rational(1, 25), 1);
    const auto g = packing_member(s, BinaryWord(5));
    const auto f0 = base_quadratic(1);
    Rng rng(1);
    BinaryWord all(5);
    for (std::size_t i = 0; i < 5; ++i) all.set(i, true);
    const auto top = packing_member(s, all);
    for (int i = 0; i < 200; ++i) {
      const std::vector<double> x{rng.uniform01()};
      CHECK(g.eval(x) == f0.eval(x));
      CHECK(top.eval(x) >= f0.eval(x));
      CHECK(top.eval(x) <= 1.0);
    }
  }

  TEST_CASE("certificate for a small family") {
    const auto fam = build_packing_family(Rational(1, 25), 1, 0);
    CHECK(fam.code.words.size() >= 2);
    CHECK(fam.epsilon == doctest::Approx(1.0 / 1200.0));
    const auto cert = packing_certificate(fam, default_certificate_grid(fam.system));
    CHECK(cert.all_pass);
    CHECK(cert.member_bound_violations == 0);
    for (const auto& r : cert.rows) CHECK(r.l1 >= fam.zeta * static_cast<double>(r.hamming) - 1e-6);
    CHECK_THROWS_AS(build_packing_family(Rational(1, 400), 2, 0), ParameterError);
  }

  TEST_CASE("curve arithmetic") {
    const auto c = lower_bound_curve(1, {Rational(1, 25), Rational(1)});
    CHECK(c[0].k == 5);
    CHECK(c[0].log_m == doctest::Approx(5.0 / 8.0));
    CHECK(c[0].epsilon == doctest::Approx(1.0 / 1200.0));
    CHECK(c[1].k == 1);
    CHECK(c[1].log_m == doctest::Approx(1.0 / 8.0));
    std::vector<Rational> etas;
    for (int m = 0; m < 5; ++m) etas.push_back(Rational(1, 25 * (1 << (2 * m))));
    const auto sweep = lower_bound_curve(1, etas);
    CHECK(loglog_slope(sweep) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(scaled_spread(sweep, 1) < 1e-12);
  }
}

TEST_SUITE("schedule") {
  TEST_CASE("breakpoints") {
    CHECK(schedule::breakpoints(1.0).log_u == -24.0 * kLn2);
    CHECK(schedule::breakpoints(2.0).log_u == doctest::Approx(-72.0 * kLn2).epsilon(1e-15));
    CHECK(schedule::breakpoints(1.0).u() == std::ldexp(1.0, -24));
    CHECK_THROWS_AS(schedule::breakpoints(0.5), ParameterError);
  }

  TEST_CASE("delta chain and A") {
    const auto s = schedule::strip_schedule(-96 * kLn2, 1.0);
    REQUIRE(s.A == 4);
    const double expect[] = {-96.0, -64.0, -128.0 / 3.0, -256.0 / 9.0, -512.0 / 27.0};
    for (std::size_t m = 0; m < 5; ++m) CHECK(s.log_delta[m] / kLn2 == doctest::Approx(expect[m]).epsilon(1e-14));
    for (std::size_t m = 1; m < s.log_delta.size(); ++m) CHECK(s.log_delta[m] > s.log_delta[m - 1]);
    CHECK(schedule::strip_schedule(std::log(1e-3), 1.0).empty());
    CHECK(schedule::strip_schedule(-96 * kLn2, 2.0).A == 4);
    CHECK(schedule::strip_schedule(-200 * kLn2, 1.0).A == 6);
    CHECK_THROWS_AS(schedule::strip_schedule(0.0, 1.0), ParameterError);
    CHECK_THROWS_AS(schedule::strip_schedule(0.5, 1.0), ParameterError);
  }

  TEST_CASE("zeta examples") {
    const auto z = schedule::zeta_sequence(schedule::strip_schedule(-96 * kLn2, 1.0));
    CHECK(z.agree);
    CHECK(std::exp(z.log_closed[0]) == doctest::Approx(0.00390625).epsilon(1e-13));
    CHECK(std::exp(z.log_closed[1]) == doctest::Approx(std::exp2(-16.0 / 3.0)).epsilon(1e-13));
    CHECK(std::exp(z.log_closed[1] - z.log_closed[0]) == doctest::Approx(std::exp2(8.0 / 3.0)).epsilon(1e-13));
  }

  TEST_CASE("zeta definition recomputed independently") {
    for (double p : {1.0, 2.0, 3.0}) {
      for (double e : {96.0, 200.0, 333.0}) {
        const double le = -e * kLn2;
        const auto s = schedule::strip_schedule(le, p);
        const auto z = schedule::zeta_sequence(s);
        const double r = (p + 1) / (p + 2);
        for (std::size_t i = 0; i < s.A; ++i) {
          const double m = static_cast<double>(i + 1);
          const double ld = p * std::pow(r, m - 1) * le;
          const double ld1 = p * std::pow(r, m) * le;
          const double la = le - p * std::pow(p + 1, m - 2) / std::pow(p + 2, m - 1) * le;
          const double lz = 0.5 * (le + ld1 - ld - la);
          CHECK(z.log_definition[i] == doctest::Approx(lz).epsilon(1e-12));
          CHECK(std::abs(z.log_closed[i] - lz) < 1e-12 * std::max(1.0, std::abs(lz)));
          CHECK(lz <= 0.0);
          if (i > 0) CHECK(lz - z.log_definition[i - 1] >= kLn2);
        }
      }
    }
  }

  TEST_CASE("verify_schedule passes on the reference grid") {
    for (double p : {1.0, 2.0, 3.0})
      for (double e : {96.0, 200.0})
        for (std::size_t d : {1u, 2u, 3u}) {
          const auto r = schedule::verify_schedule(-e * kLn2, p, d);
          CHECK(r.all_pass);
          CHECK(r.sum_zeta_d_bound == doctest::Approx(std::ldexp(1.0, int(d)) / (std::ldexp(1.0, int(d)) - 1)));
        }
    CHECK_THROWS(schedule::verify_schedule(std::log(1e-3), 1.0, 1));
  }

  TEST_CASE("log-sum-exp handles extreme magnitudes") {
    CHECK(schedule::log_sum_exp({-1000.0, -1000.0}) == doctest::Approx(-1000.0 + kLn2));
    CHECK(schedule::log_sum_exp({800.0, 0.0}) == doctest::Approx(800.0));
  }

  TEST_CASE("cover accounting examples") {
    LipschitzVector g{{0.5, 0.25}};
    const auto a = schedule::cover_size_accounting(-96 * kLn2, 1.0, 1, g, 1.0);
    CHECK(a.coverage == doctest::Approx(17.0 / 3.0 * std::exp2(-96.0)).epsilon(1e-13));
    CHECK(a.prefactor == doctest::Approx(4.0 + std::sqrt(2.0 * std::exp2(24.0))).epsilon(1e-13));
    for (std::size_t d : {1u, 2u, 3u}) {
      const auto x = schedule::cover_size_accounting(-96 * kLn2, 1.0, d, g, 1.0);
      const auto y = schedule::cover_size_accounting(-97 * kLn2, 1.0, d, g, 1.0);
      CHECK(y.log_bound - x.log_bound == doctest::Approx(static_cast<double>(d) / 2 * kLn2).epsilon(1e-12));
    }
  }

  TEST_CASE("theorem bound examples") {
    schedule::BoundInputs in;
    in.eps = 1e-4;
    const auto b = schedule::theorem_bounds(in);
    REQUIRE(b.upper.has_value());
    CHECK(*b.upper == doctest::Approx(100.0));

    schedule::BoundInputs s = in;
    s.d = 2;
    s.p = 2.0;
    s.eps = 0.03;
    s.B = 3.0;
    s.a = 1.0;
    s.b = 1.5;
    schedule::BoundInputs n = s;
    n.B = 1.0;
    n.a = 0.0;
    n.b = 1.0;
    n.eps = std::pow(0.5, -1.0) * 0.03 / 3.0;
    CHECK(*schedule::theorem_bounds(s).upper == doctest::Approx(*schedule::theorem_bounds(n).upper));
    CHECK(schedule::theorem_bounds(s).normalized_eps == doctest::Approx(n.eps));

    schedule::BoundInputs big = in;
    big.eps = 2.0;
    const auto o = schedule::theorem_bounds(big);
    CHECK_FALSE(o.upper.has_value());
    CHECK_FALSE(o.lower.has_value());

    schedule::BoundInputs bad = in;
    bad.B = 0.0;
    CHECK_THROWS_AS(schedule::theorem_bounds(bad), ParameterError);
  }
}
