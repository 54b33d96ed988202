#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bmlab/errors.hpp"
#include "bmlab/quadrature.hpp"
#include "support/oracles.hpp"

using namespace bmlab;

TEST_CASE("policy validation") {
  CHECK_NOTHROW(QuadraturePolicy{}.validate());
  CHECK_THROWS_AS((QuadraturePolicy{0.0, 1e-8, 40, 512}.validate()), DomainError);
  CHECK_THROWS_AS((QuadraturePolicy{1e-10, 1e-8, 9, 512}.validate()), DomainError);
  const auto t = QuadraturePolicy{}.tightened(10);
  CHECK(t.abs_tol == doctest::Approx(1e-11));
  CHECK(t.rel_tol == doctest::Approx(1e-9));
}

TEST_CASE("adaptive_simpson against Gauss-Legendre") {
  QuadraturePolicy p{1e-12, 1e-12, 40, 512};
  auto f = [](double x) { return std::exp(-std::abs(x)) * std::cos(x); };
  const double zero = 0.0;
  const double v = integrate(f, -2.0, 3.0, p, std::span<const double>(&zero, 1));
  const double ref = oracle::gauss_legendre(f, -2.0, 0.0) + oracle::gauss_legendre(f, 0.0, 3.0);
  CHECK(v == doctest::Approx(ref).epsilon(1e-11));
}

TEST_CASE("non-convergence is reported, not thrown, by adaptive_simpson") {
  QuadraturePolicy p{1e-15, 1e-15, 10, 512};
  const auto r = adaptive_simpson([](double x) { return std::sqrt(std::abs(std::sin(50 * x))); }, 0.0, 1.0, p);
  CHECK_FALSE(r.converged);
  CHECK_THROWS_AS(integrate([](double x) { return std::sqrt(std::abs(std::sin(50 * x))); }, 0.0, 1.0, p),
                  ConvergenceError);
}

TEST_CASE("measure_1d examples") {
  const MeasureEvaluator g(Density1D::gaussian(1.0));
  CHECK(measure_1d(g, IntervalUnion::single(-1, 1)) ==
        doctest::Approx(oracle::normal_cdf(1) - oracle::normal_cdf(-1)).epsilon(1e-9));
  CHECK(measure_1d(g, IntervalUnion::single(-1, 1)) == doctest::Approx(0.6826895).epsilon(1e-7));
  CHECK(measure_1d(g, IntervalUnion::full_line()) == 1.0);

  // gamma = 1 corresponds to s = 1/2: mass s a^{1/s} = 0.5 on [0, 1].
  const MeasureEvaluator pp(Density1D::power_plus(1.0));
  CHECK(measure_1d(pp, IntervalUnion::single(-1, 1)) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(measure_1d(pp, IntervalUnion::empty()) == 0.0);
  CHECK(measure_1d(g, IntervalUnion::empty()) == 0.0);
  CHECK_THROWS_AS(measure_1d(pp, IntervalUnion::full_line()), InfiniteMeasure);
  CHECK_THROWS_AS(measure_1d(MeasureEvaluator(Density1D::lebesgue()), IntervalUnion::full_line()), InfiniteMeasure);
}

TEST_CASE("measure_1d is additive and monotone") {
  oracle::Rng r(51);
  const MeasureEvaluator ev(Density1D::gaussian(1.3, 0.2));
  for (int k = 0; k < 50; ++k) {
    const double a = r.uniform(-3, 0), m = r.uniform(0, 1), b = r.uniform(1.5, 3);
    const double left = measure_1d(ev, IntervalUnion::single(a, m));
    const double right = measure_1d(ev, IntervalUnion::single(m + 0.25, b));
    const double both = measure_1d(ev, IntervalUnion{{a, m}, {m + 0.25, b}});
    CHECK(both == doctest::Approx(left + right).epsilon(1e-8));
    const auto u = oracle::random_union(r);
    const double inner = measure_1d(ev, u);
    const auto hull = u.hull();
    CHECK(measure_1d(ev, IntervalUnion::single(hull.lo, hull.hi)) >= inner - 1e-10);
  }
}

TEST_CASE("measure_product closed forms") {
  const MeasureEvaluator ev(DensityND::exponential_product(2, true));
  const double side = 0.5 * (1.0 - std::exp(-1.0));
  CHECK(measure_product(ev, ProductSet::box({{0, 1}, {0, 1}})) == doctest::Approx(side * side).epsilon(1e-9));
  const double mid = 1.0 - std::exp(-0.5);
  CHECK(measure_product(ev, ProductSet::box({{-0.5, 0.5}, {-0.5, 0.5}})) == doctest::Approx(mid * mid).epsilon(1e-9));
  CHECK(mid * mid == doctest::Approx(0.1548181).epsilon(1e-6));
  CHECK(measure_product(ev, ProductSet({IntervalUnion::empty(), IntervalUnion::single(0, 1)})) == 0.0);
  CHECK(measure_product(ev, ProductSet({IntervalUnion::single(0, 1), IntervalUnion::full_line()})) ==
        doctest::Approx(side).epsilon(1e-9));
}

TEST_CASE("measure_product equals measure_polygon on rectangles") {
  oracle::Rng r(53);
  for (const auto& d : {DensityND::gaussian_standard(2), DensityND::exponential_product(2, true),
                        DensityND::product({Density1D::gaussian(0.7, 0.3), Density1D::two_sided_exponential(2.0)})}) {
    const MeasureEvaluator ev(d);
    for (int k = 0; k < 10; ++k) {
      const double x0 = r.uniform(-2, 1), y0 = r.uniform(-2, 1);
      const double x1 = x0 + r.uniform(0.2, 2), y1 = y0 + r.uniform(0.2, 2);
      const double prod = measure_product(ev, ProductSet::box({{x0, x1}, {y0, y1}}));
      const double poly = measure_polygon(ev, ConvexPolygon::box(x0, x1, y0, y1)).value;
      CHECK(poly == doctest::Approx(prod).epsilon(1e-8));
    }
  }
}

TEST_CASE("measure_polygon examples") {
  const MeasureEvaluator leb(DensityND::lebesgue(2));
  CHECK(measure_polygon(leb, ConvexPolygon::box(0, 1, 0, 1)).value == doctest::Approx(1.0).epsilon(1e-12));

  const MeasureEvaluator g(DensityND::gaussian_standard(2));
  const double e = std::erf(1.0 / std::numbers::sqrt2);
  CHECK(measure_polygon(g, ConvexPolygon::box(-1, 1, -1, 1)).value == doctest::Approx(e * e).epsilon(1e-8));
  CHECK(e * e == doctest::Approx(0.4660649).epsilon(1e-6));

  const auto deg = measure_polygon(g, dilate(ConvexPolygon::box(-1, 1, -1, 1), 0.0));
  CHECK(deg.degenerate);
  CHECK(deg.value == 0.0);
}

TEST_CASE("gaussian triangle measure agrees with Monte Carlo") {
  const std::vector<Vec2> pts{{0, 0}, {3, 0}, {0, 3}};
  const auto tri = ConvexPolygon::hull(pts);
  const double v = measure_polygon(MeasureEvaluator(DensityND::gaussian_standard(2)), tri).value;
  std::mt19937_64 eng(2024);
  std::normal_distribution<double> n01;
  const long n = 10'000'000;
  long hits = 0;
  for (long i = 0; i < n; ++i) {
    const double x = n01(eng), y = n01(eng);
    hits += (x >= 0 && y >= 0 && x + y <= 3);
  }
  const double p = static_cast<double>(hits) / n;
  const double se = std::sqrt(p * (1 - p) / n);
  CHECK(std::abs(v - p) < 3 * se);
  // Deterministic cross-check by iterated Gauss-Legendre.
  CHECK(v == doctest::Approx(oracle::polygon_integral(
                                 [](double x, double y) {
                                   return std::exp(-0.5 * (x * x + y * y)) / (2 * std::numbers::pi);
                                 },
                                 tri))
                 .epsilon(1e-8));
}

TEST_CASE("lebesgue polygon measure scales quadratically") {
  oracle::Rng r(57);
  const MeasureEvaluator leb(DensityND::lebesgue(2));
  for (int k = 0; k < 30; ++k) {
    const auto p = oracle::random_polygon(r, {r.uniform(-1, 1), r.uniform(-1, 1)});
    const double t = r.uniform(0.1, 4);
    const double base = measure_polygon(leb, p).value;
    CHECK(measure_polygon(leb, dilate(p, t)).value == doctest::Approx(t * t * base).epsilon(1e-10));
    CHECK(base == doctest::Approx(oracle::shoelace(p.vertices())).epsilon(1e-10));
  }
}

TEST_CASE("section_measure examples") {
  const MeasureEvaluator leb(DensityND::lebesgue(2));
  const auto sq = ConvexPolygon::box(0, 1, 0, 1);
  CHECK(section_measure(leb, sq, DirectionUnit::e1(), 0.5) == doctest::Approx(1.0));
  CHECK(section_measure(leb, sq, DirectionUnit::e1(), 2.0) == 0.0);
  const MeasureEvaluator iq(DensityND::inverse_quadratic());
  CHECK(section_measure(iq, ConvexPolygon::box(-1, 1, -1, 1), DirectionUnit::e1(), 0.0) ==
        doctest::Approx(2.0 * std::atan(1.0)).epsilon(1e-9));
}

TEST_CASE("max_section examples") {
  const MeasureEvaluator leb(DensityND::lebesgue(2));
  const auto sq = ConvexPolygon::box(0, 1, 0, 1);
  const auto m = max_section(leb, sq, DirectionUnit::e1());
  CHECK(m.value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(m.t == doctest::Approx(0.0).epsilon(1e-9));

  const std::vector<Vec2> pts{{0, 0}, {1, 0}, {0, 1}};
  const auto tm = max_section(leb, ConvexPolygon::hull(pts), DirectionUnit::e1());
  CHECK(tm.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(tm.t == doctest::Approx(0.0).epsilon(1e-9));

  const MeasureEvaluator g(DensityND::gaussian_standard(2));
  const auto gm = max_section(g, ConvexPolygon::box(-1, 1, -1, 1), DirectionUnit::e1());
  const double ref = oracle::gauss_legendre(
      [](double y) { return std::exp(-0.5 * y * y) / (2 * std::numbers::pi); }, -1, 1);
  CHECK(gm.t == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(gm.value == doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("max_section dominates every grid sample") {
  oracle::Rng r(59);
  const MeasureEvaluator g(DensityND::gaussian_standard(2), QuadraturePolicy{1e-10, 1e-8, 40, 64});
  for (int k = 0; k < 10; ++k) {
    const auto p = oracle::random_polygon(r, {r.uniform(-1, 1), r.uniform(-1, 1)});
    for (const auto& u : {DirectionUnit::e1(), DirectionUnit::e2(), DirectionUnit::from_vector({1, 1})}) {
      const auto m = max_section(g, p, u);
      double lo = 1e300, hi = -1e300;
      for (const auto& v : p.vertices()) {
        lo = std::min(lo, v.dot(u.u()));
        hi = std::max(hi, v.dot(u.u()));
      }
      for (int i = 0; i <= 64; ++i) {
        const double t = lo + (hi - lo) * i / 64.0;
        CHECK(m.value >= section_measure(g, p, u, t) - 1e-12);
      }
    }
  }
}
