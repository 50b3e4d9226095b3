#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "metent/convex_function.hpp"
#include "metent/errors.hpp"
#include "metent/metrics.hpp"
#include "metent/random.hpp"

using namespace metent;

namespace {

std::vector<double> pt(std::initializer_list<double> v) { return v; }

ConvexFunction zero(std::size_t d) { return ConvexFunction::affine(Rect::unit(d), std::vector<double>(d, 0.0), 0.0); }

// A sample of every constructor on [0,1]^2.
std::vector<ConvexFunction> zoo() {
  const Rect u = Rect::unit(2);
  auto q = ConvexFunction::separable_quadratic(u);
  auto ma = ConvexFunction::max_affine(u, {{{1.0, -0.5}, 0.1}, {{-0.7, 0.2}, 0.3}, {{0.0, 0.9}, -0.4}});
  auto h = ConvexFunction::hinge(u, 0.3, 1);
  return {
      ConvexFunction::affine(u, {0.4, -0.2}, 0.05),
      ma,
      q,
      h,
      ConvexFunction::max_with({q, h, ma}),
      ConvexFunction::rescaled(ConvexFunction::separable_quadratic(Rect({-1.0, 2.0}, {3.0, 5.0})), u, 2.5),
  };
}

}  // namespace

TEST_SUITE("convex_function") {
  TEST_CASE("evaluation examples") {
    CHECK(ConvexFunction::separable_quadratic(Rect::unit(2)).eval(pt({1.0, 1.0})) == 1.0);
    CHECK(ConvexFunction::separable_quadratic(Rect::unit(1)).eval(pt({0.5})) == 0.25);
    CHECK(ConvexFunction::hinge(Rect::unit(1), 1.0).eval(pt({0.5})) == 0.5);
    CHECK(ConvexFunction::hinge(Rect::unit(1), 0.25).eval(pt({0.75})) == 0.0);
  }

  TEST_CASE("out-of-domain evaluation and boundary subgradients are rejected") {
    const auto f = ConvexFunction::separable_quadratic(Rect::unit(1));
    CHECK_THROWS_AS(f.eval(pt({1.5})), DomainError);
    CHECK_THROWS_AS(f.eval(pt({0.5, 0.5})), DomainError);
    CHECK_THROWS_AS(f.subgradient(pt({0.0})), DomainError);
    CHECK_THROWS_AS(f.subgradient(pt({1.0})), DomainError);
  }

  TEST_CASE("subgradient examples") {
    CHECK(ConvexFunction::separable_quadratic(Rect::unit(1)).subgradient(pt({0.3}))[0] == doctest::Approx(0.6));
    CHECK(ConvexFunction::affine(Rect::unit(1), {0.2}, 0.0).subgradient(pt({0.77}))[0] == 0.2);
    CHECK(ConvexFunction::hinge(Rect::unit(1), 0.5).subgradient(pt({0.25}))[0] == -2.0);
    CHECK(ConvexFunction::hinge(Rect::unit(1), 0.5).subgradient(pt({0.75}))[0] == 0.0);
  }

  TEST_CASE("constructor validation") {
    CHECK_THROWS_AS(ConvexFunction::max_affine(Rect::unit(1), {}), ParameterError);
    CHECK_THROWS_AS(ConvexFunction::affine(Rect::unit(2), {1.0}, 0.0), ParameterError);
    CHECK_THROWS_AS(ConvexFunction::hinge(Rect::unit(1), 0.0), ParameterError);
    CHECK_THROWS_AS(ConvexFunction::hinge(Rect::unit(1), 1.0, 1), ParameterError);
    CHECK_THROWS_AS(ConvexFunction::max_with({zero(1), zero(2)}), ParameterError);
    CHECK_THROWS_AS(rescale_to_unit(zero(1), 0.0), ParameterError);
    CHECK_THROWS_AS(rescale_to_unit(zero(1), -1.0), ParameterError);
  }

  TEST_CASE("convexity along random chords for every kind") {
    Rng rng(5);
    for (const auto& f : zoo()) {
      for (int s = 0; s < 500; ++s) {
        const double x[2] = {rng.uniform01(), rng.uniform01()};
        const double y[2] = {rng.uniform01(), rng.uniform01()};
        const double t = rng.uniform01();
        const double z[2] = {t * x[0] + (1 - t) * y[0], t * x[1] + (1 - t) * y[1]};
        CHECK(f.eval_unchecked(z) <= t * f.eval_unchecked(x) + (1 - t) * f.eval_unchecked(y) + 1e-12);
      }
    }
  }

  TEST_CASE("subgradient inequality for every kind") {
    Rng rng(6);
    for (const auto& f : zoo()) {
      for (int s = 0; s < 300; ++s) {
        const std::vector<double> x{rng.open01(), rng.open01()};
        const double y[2] = {rng.uniform01(), rng.uniform01()};
        const auto m = f.subgradient(x);
        const double lin = f.eval(x) + m[0] * (y[0] - x[0]) + m[1] * (y[1] - x[1]);
        CHECK(f.eval_unchecked(y) >= lin - 1e-12);
      }
    }
  }

  TEST_CASE("rescaling examples") {
    const auto f = ConvexFunction::separable_quadratic(Rect({0.0}, {2.0}));
    CHECK(rescale_to_unit(f, 4.0).eval(pt({0.5})) == doctest::Approx(0.25));
    const auto g = ConvexFunction::affine(Rect({0.0}, {2.0}), {1.0}, 0.0);
    CHECK(rescale_to_unit(g, 2.0).eval(pt({0.5})) == doctest::Approx(0.5));
    // The view maps [0,2] onto the base's [0,1].
    const auto v = ConvexFunction::rescaled(ConvexFunction::separable_quadratic(Rect::unit(1)), Rect({0.0}, {2.0}), 2.0);
    CHECK(v.eval(pt({1.0})) == doctest::Approx(0.125));

    Rng rng(3);
    const auto r = make_random_convex(2, 1.0, 4, 9).function;
    const auto same = rescale_to_unit(r, 1.0);
    for (int s = 0; s < 10; ++s) {
      const std::vector<double> x{rng.uniform01(), rng.uniform01()};
      CHECK(same.eval(x) == r.eval(x));
    }
  }

  TEST_CASE("random convex functions are bounded, deterministic and convex") {
    const auto a = make_random_convex(1, 1.0, 1, 0);
    CHECK(a.grid_sup <= 1.0);
    const auto b = make_random_convex(1, 1.0, 1, 0);
    const auto& pa = std::get<form::MaxAffine>(a.function.form()).pieces;
    const auto& pb = std::get<form::MaxAffine>(b.function.form()).pieces;
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
      CHECK(pa[i].coeffs == pb[i].coeffs);
      CHECK(pa[i].intercept == pb[i].intercept);
    }
    const auto f = make_random_convex(2, 1.0, 5, 7).function;
    Rng rng(77);
    for (int s = 0; s < 100; ++s) {
      const double x[2] = {rng.uniform01(), rng.uniform01()};
      const double y[2] = {rng.uniform01(), rng.uniform01()};
      const double m[2] = {(x[0] + y[0]) / 2, (x[1] + y[1]) / 2};
      CHECK(f.eval_unchecked(m) <= (f.eval_unchecked(x) + f.eval_unchecked(y)) / 2 + 1e-15);
      CHECK(std::abs(f.eval_unchecked(x)) <= 1.0);
    }
  }

  TEST_CASE("coordinate Lipschitz estimates") {
    const auto a = coordinate_lipschitz_estimate(ConvexFunction::affine(Rect::unit(2), {0.2, -0.3}, 0.0), 5);
    CHECK(a.gamma[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(a.gamma[1] == doctest::Approx(0.3).epsilon(1e-12));
    const auto q = coordinate_lipschitz_estimate(ConvexFunction::separable_quadratic(Rect::unit(1)), 101);
    CHECK(q.gamma[0] == doctest::Approx(2.0).epsilon(0.025));
    const auto v = ConvexFunction::max_affine(Rect::unit(1), {{{1.0}, -0.5}, {{-1.0}, 0.5}});
    CHECK(coordinate_lipschitz_estimate(v, 3).gamma[0] == doctest::Approx(1.0));
    for (std::size_t s = 0; s < 10; ++s) {
      const auto f = make_random_convex(2, 1.0, 4, s).function;
      const auto lo = coordinate_lipschitz_estimate(f, 33);
      const auto hi = coordinate_lipschitz_bound(f);
      for (std::size_t i = 0; i < 2; ++i) CHECK(lo.gamma[i] <= hi.gamma[i] + 1e-12);
    }
  }
}

TEST_SUITE("metrics") {
  TEST_CASE("L_p examples") {
    const auto h1 = ConvexFunction::hinge(Rect::unit(1), 1.0);
    const auto z = zero(1);
    CHECK(lp_distance(h1, h1, 1.0, {2001, QuadratureRule::midpoint}).value == 0.0);
    CHECK(lp_distance(h1, z, 1.0, {2001, QuadratureRule::midpoint}).value == doctest::Approx(0.5).epsilon(1e-6));
    const auto hq = ConvexFunction::hinge(Rect::unit(1), 0.25);
    CHECK(std::abs(lp_distance(hq, z, 2.0, {4001, QuadratureRule::midpoint}).value - std::sqrt(0.25 / 3.0)) < 1e-4);
    CHECK_THROWS_AS(lp_distance(h1, zero(2), 1.0, {11, QuadratureRule::midpoint}), ParameterError);
  }

  TEST_CASE("sup-norm examples") {
    const auto z = zero(1);
    CHECK(linf_grid_distance(z, z, {11, QuadratureRule::trapezoid}).value == 0.0);
    const auto a = ConvexFunction::affine(Rect::unit(1), {0.2}, 0.0);
    CHECK(linf_grid_distance(a, z, {11, QuadratureRule::trapezoid}).value == 0.2);
    const auto f1 = ConvexFunction::hinge(Rect::unit(1), 0.5);
    const auto f3 = ConvexFunction::hinge(Rect::unit(1), 0.125);
    CHECK(linf_grid_distance(f1, f3, {9, QuadratureRule::trapezoid}).value >= 0.5);
  }

  TEST_CASE("epigraph support examples") {
    const auto z = zero(1);
    CHECK(epigraph_support(z, EpigraphSupportQuery({0.0, 1.0}, 1.0)) == 1.0);
    CHECK(epigraph_support(z, EpigraphSupportQuery({0.0, -1.0}, 1.0)) == 0.0);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(epigraph_support(z, EpigraphSupportQuery({r, r}, 1.0)) == doctest::Approx(std::sqrt(2.0)));
  }

  TEST_CASE("sphere directions are unit and start with the signed axes") {
    const auto dirs = sphere_directions(3, 50);
    REQUIRE(dirs.size() == 150);
    for (std::size_t m = 0; m < 50; ++m) {
      const double n = std::hypot(dirs[3 * m], dirs[3 * m + 1], dirs[3 * m + 2]);
      CHECK(n == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(std::abs(dirs[0]) == 1.0);
  }

  TEST_CASE("Hausdorff examples") {
    const auto z = zero(1);
    const GridSpec g{2001, QuadratureRule::trapezoid};
    CHECK(hausdorff_epigraph(z, z, 1.0, 64, g).value == 0.0);
    const auto h1 = ConvexFunction::hinge(Rect::unit(1), 1.0);
    CHECK(std::abs(hausdorff_epigraph(h1, z, 1.0, 10000, g).value - 1.0 / std::sqrt(2.0)) < 1e-3);
    const auto h01 = ConvexFunction::hinge(Rect::unit(1), 0.1);
    CHECK(std::abs(hausdorff_epigraph(h01, z, 1.0, 10000, g).value - 0.1 / std::sqrt(1.01)) < 1e-3);
    CHECK_THROWS_AS(hausdorff_epigraph(h1, z, 1.0, 3, g), ParameterError);
  }

  TEST_CASE("Hausdorff of polytopal pairs matches the analytic value") {
    // Constants 0 and c: the epigraphs [0,1] x [0,1] and [0,1] x [c,1] are c apart.
    const auto z = zero(1);
    const auto c = ConvexFunction::affine(Rect::unit(1), {0.0}, 0.3);
    const auto r = hausdorff_epigraph(z, c, 1.0, 256, {257, QuadratureRule::trapezoid});
    CHECK(r.value == doctest::Approx(0.3).epsilon(1e-9));
    // Slope-s line through the origin against 0 (s < B): the farthest point of
    // the lower set is (1, 0), at distance s / sqrt(1 + s^2) from the line.
    const double s = 0.5;
    const auto l = ConvexFunction::affine(Rect::unit(1), {s}, 0.0);
    const auto rl = hausdorff_epigraph(l, z, 1.0, 256, {257, QuadratureRule::trapezoid});
    CHECK(std::abs(rl.value - s / std::sqrt(1 + s * s)) <= rl.error_estimate + 1e-9);
  }

  TEST_CASE("metric axioms on random triples") {
    const GridSpec g{257, QuadratureRule::trapezoid};
    const GridSpec q{513, QuadratureRule::midpoint};
    for (std::uint64_t s = 0; s < 6; ++s) {
      const auto a = make_random_convex(1, 1.0, 3, 3 * s).function;
      const auto b = make_random_convex(1, 1.0, 4, 3 * s + 1).function;
      const auto c = make_random_convex(1, 1.0, 5, 3 * s + 2).function;
      for (const auto& m : {MetricDescriptor::lp(1.0), MetricDescriptor::lp(2.0), MetricDescriptor::linf_grid()}) {
        const GridSpec grid = m.kind == MetricDescriptor::Kind::lp ? q : g;
        const double ab = distance(a, b, m, grid).value, ba = distance(b, a, m, grid).value;
        const double bc = distance(b, c, m, grid).value, ac = distance(a, c, m, grid).value;
        CHECK(distance(a, a, m, grid).value == 0.0);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
        CHECK(ac <= ab + bc + 1e-12);
      }
      const auto hd = [&](const ConvexFunction& x, const ConvexFunction& y) {
        return hausdorff_epigraph(x, y, 1.0, 256, g);
      };
      const auto ab = hd(a, b), ba = hd(b, a), bc = hd(b, c), ac = hd(a, c);
      CHECK(hd(a, a).value == 0.0);
      CHECK(std::abs(ab.value - ba.value) <= ab.error_estimate + ba.error_estimate + 1e-12);
      CHECK(ac.value <= ab.value + bc.value + ab.error_estimate + bc.error_estimate + ac.error_estimate);
    }
  }

  TEST_CASE("quadrature error estimate shrinks with resolution") {
    const auto f = make_random_convex(2, 1.0, 5, 21).function;
    const auto g = make_random_convex(2, 1.0, 5, 22).function;
    const auto coarse = lp_distance(f, g, 1.0, {33, QuadratureRule::midpoint});
    const auto fine = lp_distance(f, g, 1.0, {129, QuadratureRule::midpoint});
    CHECK(fine.error_estimate < coarse.error_estimate);
  }

  TEST_CASE("greedy packing examples") {
    const auto z = zero(1);
    const auto h = ConvexFunction::hinge(Rect::unit(1), 1.0);
    const GridSpec g{2001, QuadratureRule::midpoint};
    CHECK(greedy_packing({h, h, h}, 0.1, MetricDescriptor::lp(1.0), g).size() == 1);
    CHECK(greedy_packing({z, h}, 0.4, MetricDescriptor::lp(1.0), g).size() == 2);
    CHECK(greedy_packing({z, h}, 0.6, MetricDescriptor::lp(1.0), g).size() == 1);

    std::vector<ConvexFunction> consts;
    for (int i = 0; i < 10; ++i) consts.push_back(ConvexFunction::affine(Rect::unit(1), {0.0}, 0.1 * i));
    const auto idx = greedy_packing(consts, 0.25, MetricDescriptor::linf_grid(), {5, QuadratureRule::trapezoid});
    CHECK(idx == std::vector<std::size_t>{0, 3, 6, 9});
  }
}
