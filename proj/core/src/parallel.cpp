#include "bmlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "bmlab/errors.hpp"
#include "bmlab/workers.hpp"

namespace bmlab {

namespace {

bool convex_factor(const IntervalUnion& u) { return u.is_full_line() || u.pieces().size() == 1; }

// A planar box with bounded single-interval factors, as a polygon.
std::optional<ConvexPolygon> box_polygon(const SetRep& s) {
  const auto* p = std::get_if<ProductSet>(&s);
  if (!p || p->dimension() != 2) return std::nullopt;
  const auto& fx = p->factor(0);
  const auto& fy = p->factor(1);
  if (fx.is_full_line() || fy.is_full_line() || fx.pieces().size() != 1 || fy.pieces().size() != 1)
    return std::nullopt;
  const auto x = fx.pieces()[0];
  const auto y = fy.pieces()[0];
  if (!(x.lo < x.hi) || !(y.lo < y.hi)) return std::nullopt;
  return ConvexPolygon::box(x.lo, x.hi, y.lo, y.hi);
}

}  // namespace

ConvexPolygon disk_polygon(std::size_t n, double radius) { return ConvexPolygon::regular(n, radius); }

IntervalUnion mink_sum_1d(const IntervalUnion& a, const IntervalUnion& b) {
  if (a.is_empty() || b.is_empty()) throw DomainError("Minkowski sum of an empty set");
  if (a.is_full_line() || b.is_full_line()) return IntervalUnion::full_line();
  std::vector<Interval> out;
  out.reserve(a.pieces().size() * b.pieces().size());
  for (const auto& p : a.pieces())
    for (const auto& q : b.pieces()) out.push_back({p.lo + q.lo, p.hi + q.hi});
  return IntervalUnion(std::move(out));
}

SetRep parallel_set(const SetRep& a, const SetRep& b, double t) {
  if (!(t >= 0.0)) throw DomainError("parallel set needs t >= 0");
  if (t == 0.0) return a;
  if (a.index() != b.index()) {
    // Mixed planar box and polygon: promote the box.
    const auto pa = std::holds_alternative<ConvexPolygon>(a) ? std::optional(std::get<ConvexPolygon>(a)) : box_polygon(a);
    const auto pb = std::holds_alternative<ConvexPolygon>(b) ? std::optional(std::get<ConvexPolygon>(b)) : box_polygon(b);
    if (!pa || !pb) throw DomainError("A and B use incompatible set representations");
    return mink_sum_polygon(*pa, dilate(*pb, t));
  }
  if (const auto* ia = std::get_if<IntervalUnion>(&a)) {
    const auto& ib = std::get<IntervalUnion>(b);
    if (!convex_factor(ib)) throw DomainError("B must be convex");
    return mink_sum_1d(*ia, dilate(ib, t));
  }
  if (const auto* pa = std::get_if<ProductSet>(&a)) {
    const auto& pb = std::get<ProductSet>(b);
    if (pa->dimension() != pb.dimension()) throw DomainError("dimension mismatch");
    std::vector<IntervalUnion> f;
    for (std::size_t i = 0; i < pa->dimension(); ++i) {
      if (!convex_factor(pb.factor(i))) throw DomainError("B must be convex");
      f.push_back(mink_sum_1d(pa->factor(i), dilate(pb.factor(i), t)));
    }
    return ProductSet(std::move(f));
  }
  return mink_sum_polygon(std::get<ConvexPolygon>(a), dilate(std::get<ConvexPolygon>(b), t));
}

ParallelCurve parallel_curve(const MeasureEvaluator& ev, const SetRep& a, const SetRep& b,
                             std::span<const double> ts) {
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(ts[i] >= 0.0)) throw DomainError("parallel grid must be nonnegative");
    if (i > 0 && !(ts[i] > ts[i - 1])) throw DomainError("parallel grid must be strictly increasing");
  }
  ParallelCurve c{{ts.begin(), ts.end()}, std::vector<double>(ts.size()), ev.name(), describe(a), describe(b)};
  parallel_for(ts.size(), [&](std::size_t i) {
    try {
      c.values[i] = ev.measure(parallel_set(a, b, ts[i]));
    } catch (const DomainError&) {
      throw;
    } catch (const std::exception& e) {
      throw EvaluationError(std::string(e.what()) + " (at t = " + std::to_string(ts[i]) + ")", ts[i]);
    }
  });
  return c;
}

ConcavityReport check_parallel_concavity(const ParallelCurve& curve, double s, const CheckTolerance& tol) {
  return check_curve_power_concavity(curve.ts, curve.values, s, tol);
}

bool is_nondecreasing(const ParallelCurve& curve, double abs_slack, double rel_slack) {
  for (std::size_t i = 1; i < curve.values.size(); ++i) {
    const double prev = curve.values[i - 1];
    if (curve.values[i] < prev - abs_slack - rel_slack * std::abs(prev)) return false;
  }
  return true;
}

double steiner_area(const ConvexPolygon& p, double t) {
  if (!(t >= 0.0)) throw DomainError("steiner_area needs t >= 0");
  return p.area() + p.perimeter() * t + std::numbers::pi * t * t;
}

}  // namespace bmlab
