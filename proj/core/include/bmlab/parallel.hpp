#pragma once

#include <span>
#include <string>
#include <vector>

#include "bmlab/concavity.hpp"

namespace bmlab {

/// Samples of t -> mu(A + tB) with the identifiers of what produced them.
struct ParallelCurve {
  std::vector<double> ts;
  std::vector<double> values;
  std::string measure_id;
  std::string a_id;
  std::string b_id;
};

/// Regular inscribed n-gon standing in for the Euclidean disk of the given
/// radius; one vertex lies on each coordinate axis when n is divisible by 4.
ConvexPolygon disk_polygon(std::size_t n = 64, double radius = 1.0);

/// Exact A + B for interval unions (pairwise interval sums, normalized).
IntervalUnion mink_sum_1d(const IntervalUnion& a, const IntervalUnion& b);

/// A + tB with exact set arithmetic; B must be convex (a single interval per
/// factor, or a polygon). A planar box mixed with a polygon is promoted to a
/// polygon. t = 0 returns A itself.
SetRep parallel_set(const SetRep& a, const SetRep& b, double t);

/// mu(A + tB) on a sorted nonnegative grid, evaluated in parallel.
ParallelCurve parallel_curve(const MeasureEvaluator& ev, const SetRep& a, const SetRep& b,
                             std::span<const double> ts);

/// s-concavity of the curve via the three-point test.
ConcavityReport check_parallel_concavity(const ParallelCurve& curve, double s, const CheckTolerance& tol = {});

/// Values non-decreasing in t up to abs + rel slack.
bool is_nondecreasing(const ParallelCurve& curve, double abs_slack = 1e-10, double rel_slack = 1e-8);

/// area(P) + perimeter(P) t + pi t^2.
double steiner_area(const ConvexPolygon& p, double t);

}  // namespace bmlab
