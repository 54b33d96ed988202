#include "bmlab/sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bmlab/errors.hpp"
#include "bmlab/means.hpp"

namespace bmlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("lambda must lie in [0, 1]");
}

void require_dilation(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("dilation factor must be finite and >= 0");
}

double scale_of(const std::vector<Vec2>& v) {
  double s = 0.0;
  for (const auto& p : v) s = std::max({s, std::abs(p.x), std::abs(p.y)});
  return std::max(s, 1e-300);
}

// Drops vertices whose incident edges are (numerically) parallel, and
// repeated points. Input is a closed CCW cycle without the repeated start.
std::vector<Vec2> drop_collinear(std::vector<Vec2> pts) {
  bool changed = true;
  while (changed && pts.size() >= 3) {
    changed = false;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 prev = pts[(i + n - 1) % n];
      const Vec2 cur = pts[i];
      const Vec2 next = pts[(i + 1) % n];
      const Vec2 e1 = cur - prev;
      const Vec2 e2 = next - cur;
      const double l1 = std::hypot(e1.x, e1.y);
      const double l2 = std::hypot(e2.x, e2.y);
      if (l1 == 0.0 || l2 == 0.0 || cross(e1, e2) <= 1e-12 * l1 * l2) {
        pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  return pts;
}

std::size_t bottom_left(const std::vector<Vec2>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i].y < v[best].y || (v[i].y == v[best].y && v[i].x < v[best].x)) best = i;
  }
  return best;
}

ConvexPolygon merge_edges(const ConvexPolygon& a, double wa, const ConvexPolygon& b, double wb) {
  if (a.is_degenerate() || b.is_degenerate())
    throw DomainError("degenerate (collinear-only) polygon in Minkowski combination");
  auto prep = [](const ConvexPolygon& p, double w) {
    std::vector<Vec2> v;
    v.reserve(p.size());
    for (const auto& q : p.vertices()) v.push_back(q * w);
    std::rotate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(bottom_left(v)), v.end());
    return v;
  };
  const auto pa = prep(a, wa);
  const auto pb = prep(b, wb);
  const std::size_t m = pa.size();
  const std::size_t n = pb.size();
  auto edge = [](const std::vector<Vec2>& v, std::size_t i) {
    return v[(i + 1) % v.size()] - v[i % v.size()];
  };

  std::vector<Vec2> out;
  out.reserve(m + n);
  Vec2 cur = pa[0] + pb[0];
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < m || j < n) {
    out.push_back(cur);
    if (i == m) {
      cur = cur + edge(pb, j++);
    } else if (j == n) {
      cur = cur + edge(pa, i++);
    } else {
      const Vec2 ea = edge(pa, i);
      const Vec2 eb = edge(pb, j);
      const double c = cross(ea, eb);
      if (c > 0.0) {
        cur = cur + ea;
        ++i;
      } else if (c < 0.0) {
        cur = cur + eb;
        ++j;
      } else {
        // Parallel edges (same direction, since both cycles are sorted by angle).
        cur = cur + ea + eb;
        ++i;
        ++j;
      }
    }
  }
  auto cleaned = drop_collinear(std::move(out));
  if (cleaned.size() < 3) throw DomainError("Minkowski combination collapsed to a degenerate set");
  return ConvexPolygon(std::move(cleaned));
}

}  // namespace

// ---------------------------------------------------------------------------
// IntervalUnion

IntervalUnion::IntervalUnion(std::vector<Interval> pieces) {
  for (const auto& p : pieces) {
    if (!std::isfinite(p.lo) || !std::isfinite(p.hi) || p.lo > p.hi)
      throw DomainError("interval endpoints must be finite with lo <= hi");
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const Interval& l, const Interval& r) { return l.lo < r.lo || (l.lo == r.lo && l.hi < r.hi); });
  for (const auto& p : pieces) {
    if (!pieces_.empty() && p.lo <= pieces_.back().hi) {
      pieces_.back().hi = std::max(pieces_.back().hi, p.hi);
    } else {
      pieces_.push_back(p);
    }
  }
}

IntervalUnion IntervalUnion::full_line() {
  IntervalUnion u;
  u.full_line_ = true;
  return u;
}

bool IntervalUnion::contains(double x) const {
  if (full_line_) return true;
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](double v, const Interval& p) { return v < p.lo; });
  if (it == pieces_.begin()) return false;
  return std::prev(it)->contains(x);
}

bool IntervalUnion::is_symmetric(double tol) const {
  if (full_line_) return true;
  const std::size_t n = pieces_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = pieces_[i];
    const auto& q = pieces_[n - 1 - i];
    if (std::abs(p.lo + q.hi) > tol || std::abs(p.hi + q.lo) > tol) return false;
  }
  return true;
}

Interval IntervalUnion::hull() const {
  if (full_line_) throw DomainError("hull of the full line is unbounded");
  if (pieces_.empty()) throw DomainError("hull of the empty set");
  return {pieces_.front().lo, pieces_.back().hi};
}

IntervalUnion IntervalUnion::scaled(double t) const { return dilate(*this, t); }

IntervalUnion IntervalUnion::translated(double d) const {
  if (full_line_) return *this;
  std::vector<Interval> out;
  for (const auto& p : pieces_) out.push_back({p.lo + d, p.hi + d});
  return IntervalUnion(std::move(out));
}

// ---------------------------------------------------------------------------
// ProductSet

ProductSet::ProductSet(std::vector<IntervalUnion> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw DomainError("product set needs at least one factor");
}

ProductSet ProductSet::box(std::span<const Interval> sides) {
  std::vector<IntervalUnion> f;
  for (const auto& s : sides) f.push_back(IntervalUnion::single(s.lo, s.hi));
  return ProductSet(std::move(f));
}

bool ProductSet::contains_origin() const {
  return std::all_of(factors_.begin(), factors_.end(), [](const auto& f) { return f.contains(0.0); });
}

bool ProductSet::is_empty() const {
  return std::any_of(factors_.begin(), factors_.end(), [](const auto& f) { return f.is_empty(); });
}

// ---------------------------------------------------------------------------
// ConvexPolygon

ConvexPolygon::ConvexPolygon(std::vector<Vec2> ccw_vertices) : vertices_(std::move(ccw_vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw DomainError("convex polygon needs at least 3 vertices");
  for (const auto& v : vertices_)
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) throw DomainError("polygon vertex is not finite");
  double turning = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e1 = vertices_[(i + 1) % n] - vertices_[i];
    const Vec2 e2 = vertices_[(i + 2) % n] - vertices_[(i + 1) % n];
    if (!(cross(e1, e2) > 0.0))
      throw DomainError("polygon vertices are not strictly convex counterclockwise");
    turning += std::atan2(cross(e1, e2), e1.dot(e2));
  }
  // Left turns only, but a vertex cycle winding twice would also pass that test.
  if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-6)
    throw DomainError("polygon vertex cycle is not simple");
}

ConvexPolygon ConvexPolygon::hull(std::span<const Vec2> points) {
  std::vector<Vec2> p(points.begin(), points.end());
  std::sort(p.begin(), p.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3) throw DomainError("degenerate (collinear-only) polygon");
  const double eps = 1e-12 * scale_of(p) * scale_of(p);
  std::vector<Vec2> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= eps) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= eps) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  h = drop_collinear(std::move(h));
  if (h.size() < 3) throw DomainError("degenerate (collinear-only) polygon");
  return ConvexPolygon(std::move(h));
}

ConvexPolygon ConvexPolygon::box(double x0, double x1, double y0, double y1) {
  return ConvexPolygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

ConvexPolygon ConvexPolygon::regular(std::size_t n, double radius, Vec2 center, double phase) {
  if (n < 3 || !(radius > 0.0)) throw DomainError("regular polygon needs n >= 3 and radius > 0");
  std::vector<Vec2> v;
  v.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = phase + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    v.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
  }
  return ConvexPolygon(std::move(v));
}

ConvexPolygon ConvexPolygon::degenerate(std::vector<Vec2> points) {
  if (points.empty()) throw DomainError("degenerate polygon needs at least one point");
  ConvexPolygon p;
  p.vertices_ = std::move(points);
  p.degenerate_ = true;
  return p;
}

double ConvexPolygon::area() const {
  if (degenerate_) return 0.0;
  double a = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) a += cross(vertices_[i], vertices_[(i + 1) % n]);
  return 0.5 * a;
}

double ConvexPolygon::perimeter() const {
  double p = 0.0;
  const std::size_t n = vertices_.size();
  if (n < 2) return 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e = vertices_[(i + 1) % n] - vertices_[i];
    p += std::hypot(e.x, e.y);
  }
  return p;
}

Vec2 ConvexPolygon::centroid() const {
  if (degenerate_) {
    Vec2 c;
    for (const auto& v : vertices_) c = c + v;
    return c * (1.0 / static_cast<double>(vertices_.size()));
  }
  double cx = 0.0;
  double cy = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = vertices_[i];
    const Vec2 b = vertices_[(i + 1) % n];
    const double c = cross(a, b);
    cx += (a.x + b.x) * c;
    cy += (a.y + b.y) * c;
  }
  const double a6 = 6.0 * area();
  return {cx / a6, cy / a6};
}

bool ConvexPolygon::contains(Vec2 p, double tol) const {
  const double s = scale_of(vertices_);
  if (degenerate_) {
    if (vertices_.size() == 1) {
      const Vec2 d = p - vertices_[0];
      return std::abs(d.x) <= tol * s && std::abs(d.y) <= tol * s;
    }
    // Segment from first to last point.
    const Vec2 a = vertices_.front();
    const Vec2 b = vertices_.back();
    const Vec2 ab = b - a;
    const double len2 = ab.dot(ab);
    if (len2 == 0.0) return std::hypot(p.x - a.x, p.y - a.y) <= tol * s;
    const double w = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    const Vec2 q = a + ab * w;
    return std::hypot(p.x - q.x, p.y - q.y) <= tol * s;
  }
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e = vertices_[(i + 1) % n] - vertices_[i];
    const double len = std::hypot(e.x, e.y);
    if (cross(e, p - vertices_[i]) < -tol * s * len) return false;
  }
  return true;
}

ConvexPolygon ConvexPolygon::scaled(double t) const { return dilate(*this, t); }

ConvexPolygon ConvexPolygon::translated(Vec2 d) const {
  std::vector<Vec2> v;
  v.reserve(vertices_.size());
  for (const auto& p : vertices_) v.push_back(p + d);
  if (degenerate_) return degenerate(std::move(v));
  return ConvexPolygon(std::move(v));
}

// ---------------------------------------------------------------------------
// DirectionUnit

DirectionUnit::DirectionUnit(double x, double y) : u_{x, y} {
  if (std::abs(std::hypot(x, y) - 1.0) > 1e-12) throw DomainError("direction must be a unit vector");
}

DirectionUnit DirectionUnit::from_vector(Vec2 v) {
  const double n = std::hypot(v.x, v.y);
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("cannot normalize a zero direction");
  return {v.x / n, v.y / n};
}

// ---------------------------------------------------------------------------
// Free operations

std::size_t set_dimension(const SetRep& s) {
  return std::visit(overloaded{
                        [](const IntervalUnion&) { return std::size_t{1}; },
                        [](const ProductSet& p) { return p.dimension(); },
                        [](const ConvexPolygon&) { return std::size_t{2}; },
                    },
                    s);
}

bool contains_origin(const SetRep& s) {
  return std::visit(overloaded{
                        [](const IntervalUnion& u) { return u.contains(0.0); },
                        [](const ProductSet& p) { return p.contains_origin(); },
                        [](const ConvexPolygon& p) { return p.contains({0.0, 0.0}); },
                    },
                    s);
}

std::string describe(const SetRep& s) {
  std::ostringstream os;
  os.precision(6);
  auto iu = [&os](const IntervalUnion& u) {
    if (u.is_full_line()) {
      os << "R";
      return;
    }
    if (u.is_empty()) {
      os << "{}";
      return;
    }
    for (std::size_t i = 0; i < u.pieces().size(); ++i)
      os << (i ? "u" : "") << "[" << u.pieces()[i].lo << "," << u.pieces()[i].hi << "]";
  };
  std::visit(overloaded{
                 [&](const IntervalUnion& u) { iu(u); },
                 [&](const ProductSet& p) {
                   for (std::size_t i = 0; i < p.dimension(); ++i) {
                     if (i) os << "x";
                     iu(p.factor(i));
                   }
                 },
                 [&](const ConvexPolygon& p) {
                   os << "polygon(";
                   for (std::size_t i = 0; i < p.size(); ++i)
                     os << (i ? ";" : "") << p.vertices()[i].x << "," << p.vertices()[i].y;
                   os << ")";
                 },
             },
             s);
  return os.str();
}

IntervalUnion mink_combine_1d(const IntervalUnion& a, const IntervalUnion& b, double lambda) {
  require_lambda(lambda);
  if (a.is_empty() || b.is_empty()) throw DomainError("Minkowski combination of an empty set");
  if (lambda == 0.0) return a;
  if (lambda == 1.0) return b;
  if (a.is_full_line() || b.is_full_line()) return IntervalUnion::full_line();
  std::vector<Interval> out;
  out.reserve(a.pieces().size() * b.pieces().size());
  const double wa = 1.0 - lambda;
  for (const auto& p : a.pieces())
    for (const auto& q : b.pieces())
      out.push_back({wa * p.lo + lambda * q.lo, wa * p.hi + lambda * q.hi});
  return IntervalUnion(std::move(out));
}

ProductSet mink_combine_product(const ProductSet& a, const ProductSet& b, double lambda) {
  if (a.dimension() != b.dimension()) throw DomainError("product sets differ in dimension");
  require_lambda(lambda);
  std::vector<IntervalUnion> f;
  f.reserve(a.dimension());
  for (std::size_t i = 0; i < a.dimension(); ++i) f.push_back(mink_combine_1d(a.factor(i), b.factor(i), lambda));
  return ProductSet(std::move(f));
}

ConvexPolygon mink_combine_polygon(const ConvexPolygon& a, const ConvexPolygon& b, double lambda) {
  require_lambda(lambda);
  if (a.is_degenerate() || b.is_degenerate())
    throw DomainError("degenerate (collinear-only) polygon in Minkowski combination");
  if (lambda == 0.0) return a;
  if (lambda == 1.0) return b;
  return merge_edges(a, 1.0 - lambda, b, lambda);
}

ConvexPolygon mink_sum_polygon(const ConvexPolygon& a, const ConvexPolygon& b) {
  return merge_edges(a, 1.0, b, 1.0);
}

SetRep mink_combine(const SetRep& a, const SetRep& b, double lambda) {
  if (a.index() != b.index()) throw DomainError("Minkowski combination of different set representations");
  return std::visit(overloaded{
                        [&](const IntervalUnion& x) -> SetRep {
                          return mink_combine_1d(x, std::get<IntervalUnion>(b), lambda);
                        },
                        [&](const ProductSet& x) -> SetRep {
                          return mink_combine_product(x, std::get<ProductSet>(b), lambda);
                        },
                        [&](const ConvexPolygon& x) -> SetRep {
                          return mink_combine_polygon(x, std::get<ConvexPolygon>(b), lambda);
                        },
                    },
                    a);
}

IntervalUnion dilate(const IntervalUnion& a, double t) {
  require_dilation(t);
  if (a.is_empty()) return a;
  if (t == 0.0) return IntervalUnion::single(0.0, 0.0);
  if (a.is_full_line()) return a;
  std::vector<Interval> out;
  out.reserve(a.pieces().size());
  for (const auto& p : a.pieces()) out.push_back({t * p.lo, t * p.hi});
  return IntervalUnion(std::move(out));
}

ProductSet dilate(const ProductSet& a, double t) {
  std::vector<IntervalUnion> f;
  f.reserve(a.dimension());
  for (const auto& x : a.factors()) f.push_back(dilate(x, t));
  return ProductSet(std::move(f));
}

ConvexPolygon dilate(const ConvexPolygon& a, double t) {
  require_dilation(t);
  if (t == 0.0) return ConvexPolygon::degenerate({{0.0, 0.0}});
  if (t == 1.0) return a;
  std::vector<Vec2> v;
  v.reserve(a.size());
  for (const auto& p : a.vertices()) v.push_back(p * t);
  if (a.is_degenerate()) return ConvexPolygon::degenerate(std::move(v));
  return ConvexPolygon(std::move(v));
}

SetRep dilate(const SetRep& a, double t) {
  return std::visit([t](const auto& x) -> SetRep { return dilate(x, t); }, a);
}

bool is_unconditional(const ProductSet& a) {
  return std::all_of(a.factors().begin(), a.factors().end(),
                     [](const IntervalUnion& f) { return !f.is_empty() && f.is_symmetric(); });
}

bool is_unconditional(const ConvexPolygon& p, double tol) {
  const auto& v = p.vertices();
  auto has = [&](Vec2 q) {
    return std::any_of(v.begin(), v.end(), [&](Vec2 w) {
      return std::abs(w.x - q.x) <= tol && std::abs(w.y - q.y) <= tol;
    });
  };
  for (const auto& q : v) {
    if (!has({-q.x, q.y}) || !has({q.x, -q.y})) return false;
  }
  return true;
}

Interval project_axis(const ConvexPolygon& p, Axis axis) {
  Interval r{kInf, -kInf};
  for (const auto& v : p.vertices()) {
    const double c = (axis == Axis::x) ? v.x : v.y;
    r.lo = std::min(r.lo, c);
    r.hi = std::max(r.hi, c);
  }
  return r;
}

std::optional<Interval> chord(const ConvexPolygon& p, const DirectionUnit& dir, double t) {
  const Vec2 u = dir.u();
  const Vec2 w = dir.perp();
  const Vec2 base = u * t;
  const auto& v = p.vertices();
  const double s = scale_of(v);

  if (p.is_degenerate()) {
    // Points or a segment: intersect via the parametrization of each vertex.
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& q : v) {
      if (std::abs(q.dot(u) - t) <= 1e-12 * s) {
        lo = std::min(lo, q.dot(w));
        hi = std::max(hi, q.dot(w));
      }
    }
    if (lo > hi) return std::nullopt;
    return Interval{lo, hi};
  }

  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e = v[(i + 1) % n] - v[i];
    const Vec2 normal{e.y, -e.x};  // outward for CCW order
    const double nn = std::hypot(normal.x, normal.y);
    const double c = normal.dot(v[i]) - normal.dot(base);  // need tau * normal.w <= c
    const double a = normal.dot(w);
    if (std::abs(a) <= 1e-15 * nn) {
      if (c < -1e-12 * nn * s) return std::nullopt;
      continue;
    }
    const double bound = c / a;
    if (a > 0.0) hi = std::min(hi, bound);
    else lo = std::max(lo, bound);
  }
  if (lo > hi) {
    // Tangent lines can produce lo slightly above hi from rounding.
    if (lo - hi <= 1e-12 * s) return Interval{hi, hi};
    return std::nullopt;
  }
  return Interval{lo, hi};
}

}  // namespace bmlab
