#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bmlab/errors.hpp"
#include "bmlab/parallel.hpp"
#include "support/oracles.hpp"

using namespace bmlab;

TEST_CASE("steiner formula for the unit triangle at t = 0.5") {
  const std::vector<Vec2> pts{{0, 0}, {1, 0}, {0, 1}};
  const auto tri = ConvexPolygon::hull(pts);
  const double formula = 0.5 + (2 + std::numbers::sqrt2) * 0.5 + std::numbers::pi * 0.25;
  CHECK(steiner_area(tri, 0.5) == doctest::Approx(formula).epsilon(1e-14));
  CHECK(formula == doctest::Approx(2.9925).epsilon(1e-4));

  // Monte Carlo over the bounding box: points within distance 0.5 of the triangle.
  auto dist_to_segment = [](Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 d = b - a;
    const double t = std::clamp((p - a).dot(d) / d.dot(d), 0.0, 1.0);
    const Vec2 q = a + d * t;
    return std::hypot(p.x - q.x, p.y - q.y);
  };
  std::mt19937_64 eng(7);
  std::uniform_real_distribution<double> ux(-0.5, 1.5);
  const long n = 2'000'000;
  long hits = 0;
  for (long i = 0; i < n; ++i) {
    const Vec2 p{ux(eng), ux(eng)};
    bool in = oracle::inside(tri, p);
    for (std::size_t k = 0; k < 3 && !in; ++k)
      in = dist_to_segment(p, tri.vertices()[k], tri.vertices()[(k + 1) % 3]) <= 0.5;
    hits += in;
  }
  const double frac = static_cast<double>(hits) / n;
  const double mc = 4.0 * frac;
  const double se = 4.0 * std::sqrt(frac * (1 - frac) / n);
  CHECK(std::abs(mc - formula) < 4 * se);
}

TEST_CASE("parallel curve of square and 64-gon matches steiner within 1%") {
  const auto sq = ConvexPolygon::box(0, 1, 0, 1);
  const MeasureEvaluator leb(DensityND::lebesgue(2));
  const auto ts = linspace(0, 2, 21);
  const auto c = parallel_curve(leb, sq, disk_polygon(64), ts);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    CHECK(c.values[i] == doctest::Approx(steiner_area(sq, ts[i])).epsilon(1e-2));
    CHECK(c.values[i] <= steiner_area(sq, ts[i]) + 1e-9);
  }
  CHECK(is_nondecreasing(c));
  CHECK(c.measure_id == leb.name());
}

TEST_CASE("parallel_set representations") {
  const auto a = IntervalUnion{{-1, 0}, {1, 2}};
  const auto b = IntervalUnion::single(-1, 1);
  CHECK(std::get<IntervalUnion>(parallel_set(a, b, 0.25)) == IntervalUnion{{-1.25, 0.25}, {0.75, 2.25}});
  CHECK(std::get<IntervalUnion>(parallel_set(a, b, 1.0)) == IntervalUnion::single(-2, 3));
  CHECK(std::get<IntervalUnion>(parallel_set(a, b, 0.0)) == a);
  CHECK_THROWS_AS(parallel_set(a, a, 0.5), DomainError);
  CHECK_THROWS_AS(parallel_set(a, b, -0.5), DomainError);

  const auto box = ProductSet::box({{-1, 1}, {0, 1}});
  const auto poly = std::get<ConvexPolygon>(parallel_set(box, disk_polygon(8), 1.0));
  CHECK(poly.area() == doctest::Approx(2.0 + 6.0 * 1.0 + disk_polygon(8).area()).epsilon(1e-2));
}

TEST_CASE("curves are non-decreasing when B contains 0") {
  oracle::Rng r(131);
  const MeasureEvaluator g(DensityND::gaussian_standard(2), QuadraturePolicy{1e-9, 1e-7, 40, 64});
  const auto ts = linspace(0, 2, 9);
  for (int k = 0; k < 10; ++k) {
    const auto a = oracle::random_polygon(r, {r.uniform(-1, 1), r.uniform(-1, 1)});
    const auto b = oracle::random_polygon(r, {}, 0.5);
    REQUIRE(b.contains({0, 0}));
    const auto c = parallel_curve(g, a, b, ts);
    CHECK(is_nondecreasing(c));
    for (double v : c.values) CHECK(v >= 0.0);
  }
}

TEST_CASE("the combination identity for parallel sets") {
  // mu(A + ((t1 + t2)/2) B) = mu((A + t1 B)/2 + (A + t2 B)/2) for convex A, B.
  oracle::Rng r(137);
  const MeasureEvaluator g(DensityND::gaussian_standard(2));
  for (int k = 0; k < 20; ++k) {
    const auto a = oracle::random_polygon(r, {r.uniform(-1, 1), r.uniform(-1, 1)});
    const auto b = oracle::random_polygon(r, {r.uniform(-0.3, 0.3), r.uniform(-0.3, 0.3)}, 0.7);
    const double t1 = r.uniform(0, 1.5), t2 = r.uniform(0, 1.5);
    const double lhs = g.measure(parallel_set(a, b, 0.5 * (t1 + t2)));
    const double rhs = g.measure(mink_combine(parallel_set(a, b, t1), parallel_set(a, b, t2), 0.5));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
  }
}

TEST_CASE("parallel curves of origin-containing boxes are 1/2-concave under the gaussian") {
  oracle::Rng r(139);
  const MeasureEvaluator g(DensityND::gaussian_standard(2));
  const auto ts = linspace(0, 2, 21);
  for (int k = 0; k < 10; ++k) {
    const auto a = ProductSet::box({{-r.uniform(0, 2), r.uniform(0.1, 2)}, {-r.uniform(0.1, 2), r.uniform(0, 2)}});
    const auto b = ProductSet::box({{-r.uniform(0.1, 1), r.uniform(0.1, 1)}, {-r.uniform(0.1, 1), r.uniform(0.1, 1)}});
    CHECK(check_parallel_concavity(parallel_curve(g, a, b, ts), 0.5).passed());
  }
}

TEST_CASE("non-convex interval A is admitted in one dimension") {
  // Lengths grow by 2 per component until neighbouring pieces merge at t = 2.
  const MeasureEvaluator leb(Density1D::lebesgue());
  const auto a = IntervalUnion{{-3, -2}, {2, 3}};
  const auto ts = linspace(0, 4, 41);
  const auto c = parallel_curve(leb, a, IntervalUnion::single(-1, 1), ts);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double t = ts[i];
    const double want = t <= 2 ? 2 + 4 * t : 6 + 2 * t;
    CHECK(c.values[i] == doctest::Approx(want).epsilon(1e-9));
  }
  CHECK(is_nondecreasing(c));
}
