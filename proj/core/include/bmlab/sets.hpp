#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace bmlab {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Finite union of closed intervals, kept sorted with touching or
/// overlapping pieces merged. The full-line marker stands for R and carries
/// no finite pieces.
class IntervalUnion {
public:
  IntervalUnion() = default;
  explicit IntervalUnion(std::vector<Interval> pieces);
  IntervalUnion(std::initializer_list<Interval> pieces)
      : IntervalUnion(std::vector<Interval>(pieces)) {}

  static IntervalUnion empty() { return {}; }
  static IntervalUnion full_line();
  static IntervalUnion single(double lo, double hi) { return IntervalUnion({Interval{lo, hi}}); }

  bool is_full_line() const { return full_line_; }
  bool is_empty() const { return !full_line_ && pieces_.empty(); }
  /// A single closed interval (or the full line).
  bool is_convex() const { return full_line_ || pieces_.size() == 1; }
  bool contains(double x) const;
  /// Symmetric about the origin.
  bool is_symmetric(double tol = 1e-12) const;

  const std::vector<Interval>& pieces() const { return pieces_; }
  /// Convex hull; throws for the empty set or the full line.
  Interval hull() const;

  IntervalUnion scaled(double t) const;
  IntervalUnion translated(double d) const;

  friend bool operator==(const IntervalUnion&, const IntervalUnion&) = default;

private:
  std::vector<Interval> pieces_;
  bool full_line_ = false;
};

/// Coordinate product of one-dimensional sets.
class ProductSet {
public:
  explicit ProductSet(std::vector<IntervalUnion> factors);

  /// Product of closed intervals [lo_i, hi_i].
  static ProductSet box(std::span<const Interval> sides);
  static ProductSet box(std::initializer_list<Interval> sides) {
    return box(std::span<const Interval>(sides.begin(), sides.size()));
  }

  std::size_t dimension() const { return factors_.size(); }
  const std::vector<IntervalUnion>& factors() const { return factors_; }
  const IntervalUnion& factor(std::size_t i) const { return factors_.at(i); }
  bool contains_origin() const;
  bool is_empty() const;

  friend bool operator==(const ProductSet&, const ProductSet&) = default;

private:
  std::vector<IntervalUnion> factors_;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

/// Strictly convex polygon with counterclockwise vertices. A degenerate
/// polygon (a point or a segment) only arises from dilation by zero; it has
/// zero area and is rejected by the Minkowski operations.
class ConvexPolygon {
public:
  /// Validates >= 3 vertices with all consecutive edge cross products > 0.
  explicit ConvexPolygon(std::vector<Vec2> ccw_vertices);

  /// Convex hull of arbitrary points; collinear points are dropped.
  static ConvexPolygon hull(std::span<const Vec2> points);
  static ConvexPolygon box(double x0, double x1, double y0, double y1);
  /// Regular n-gon inscribed in the circle of given radius and center,
  /// first vertex at angle `phase`.
  static ConvexPolygon regular(std::size_t n, double radius = 1.0, Vec2 center = {},
                               double phase = 0.0);
  static ConvexPolygon degenerate(std::vector<Vec2> points);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  bool is_degenerate() const { return degenerate_; }

  double area() const;
  double perimeter() const;
  Vec2 centroid() const;
  bool contains(Vec2 p, double tol = 1e-12) const;

  ConvexPolygon scaled(double t) const;
  ConvexPolygon translated(Vec2 d) const;

private:
  ConvexPolygon() = default;
  std::vector<Vec2> vertices_;
  bool degenerate_ = false;
};

/// Unit direction in the plane.
class DirectionUnit {
public:
  DirectionUnit(double x, double y);
  static DirectionUnit e1() { return {1.0, 0.0}; }
  static DirectionUnit e2() { return {0.0, 1.0}; }
  /// Normalizes a nonzero vector.
  static DirectionUnit from_vector(Vec2 v);

  Vec2 u() const { return u_; }
  /// u rotated by +90 degrees.
  Vec2 perp() const { return {-u_.y, u_.x}; }

private:
  Vec2 u_;
};

enum class Axis { x = 0, y = 1 };

using SetRep = std::variant<IntervalUnion, ProductSet, ConvexPolygon>;

std::size_t set_dimension(const SetRep& s);
bool contains_origin(const SetRep& s);
std::string describe(const SetRep& s);

/// Exact {(1-l) a + l b}. lambda = 0 returns A and lambda = 1 returns B.
/// Throws DomainError for empty inputs or lambda outside [0, 1].
IntervalUnion mink_combine_1d(const IntervalUnion& a, const IntervalUnion& b, double lambda);

/// Coordinatewise combination. Throws DomainError on dimension mismatch.
ProductSet mink_combine_product(const ProductSet& a, const ProductSet& b, double lambda);

/// Edge-angle merge of (1-l) A and l B. Throws DomainError for degenerate inputs.
ConvexPolygon mink_combine_polygon(const ConvexPolygon& a, const ConvexPolygon& b, double lambda);

/// Plain Minkowski sum A + B for convex polygons.
ConvexPolygon mink_sum_polygon(const ConvexPolygon& a, const ConvexPolygon& b);

/// Dispatches on matching representations; mismatches are DomainError.
SetRep mink_combine(const SetRep& a, const SetRep& b, double lambda);

/// Scales every coordinate by t >= 0. t = 0 yields the origin singleton.
IntervalUnion dilate(const IntervalUnion& a, double t);
ProductSet dilate(const ProductSet& a, double t);
ConvexPolygon dilate(const ConvexPolygon& a, double t);
SetRep dilate(const SetRep& a, double t);

bool is_unconditional(const ProductSet& a);
/// Vertex set invariant under both axis reflections within tol.
bool is_unconditional(const ConvexPolygon& p, double tol = 1e-9);

/// [min, max] of one coordinate over the vertices.
Interval project_axis(const ConvexPolygon& p, Axis axis);

/// Chord P ∩ {x : x·u = t}, parametrized as t u + tau perp(u) for tau in
/// the returned interval. Empty optional when the line misses P.
std::optional<Interval> chord(const ConvexPolygon& p, const DirectionUnit& u, double t);

}  // namespace bmlab
