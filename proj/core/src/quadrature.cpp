#include "bmlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "bmlab/errors.hpp"
#include "bmlab/means.hpp"

namespace bmlab {

namespace {

constexpr std::size_t kMaxPanels = 1u << 16;
// Nested integrals run this much tighter than the outer one so that inner
// noise does not drive outer refinement.
constexpr double kInnerTightening = 1e-2;
constexpr double kGolden = 0.6180339887498949;

struct Panel {
  double a, b;
  double fa, fl, fm, fr, fb;  // at a, a+h/4, a+h/2, a+3h/4, b
  double estimate;            // Richardson-corrected
  double error;
  int depth;
};

Panel make_panel(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                 double fb, int depth, std::size_t& evals) {
  Panel p{a, b, fa, 0.0, fm, 0.0, fb, 0.0, 0.0, depth};
  const double h = b - a;
  p.fl = f(a + 0.25 * h);
  p.fr = f(a + 0.75 * h);
  evals += 2;
  const double whole = h / 6.0 * (fa + 4.0 * fm + fb);
  const double halves = h / 12.0 * (fa + 4.0 * p.fl + 2.0 * fm + 4.0 * p.fr + fb);
  p.estimate = halves + (halves - whole) / 15.0;
  p.error = std::abs(halves - whole) / 15.0;
  return p;
}

// Neumaier-compensated sum.
class CompensatedSum {
public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) comp_ += (sum_ - t) + v;
    else comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

std::vector<double> split_points(double a, double b, std::span<const double> breakpoints) {
  std::vector<double> pts{a};
  for (double x : breakpoints)
    if (x > a && x < b) pts.push_back(x);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

QuadraturePolicy inner_policy(const QuadraturePolicy& p) {
  QuadraturePolicy q = p;
  q.abs_tol *= kInnerTightening;
  q.rel_tol *= kInnerTightening;
  return q;
}

}  // namespace

void QuadraturePolicy::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw DomainError("quadrature tolerances must be positive");
  if (max_depth < 10) throw DomainError("quadrature max_depth must be >= 10");
  if (section_grid < 3) throw DomainError("section_grid must be >= 3");
}

QuadraturePolicy QuadraturePolicy::tightened(double factor) const {
  QuadraturePolicy q = *this;
  q.abs_tol /= factor;
  q.rel_tol /= factor;
  return q;
}

QuadResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                            const QuadraturePolicy& policy, std::span<const double> breakpoints) {
  QuadResult out;
  if (a == b) return out;
  if (a > b) {
    out = adaptive_simpson(f, b, a, policy, breakpoints);
    out.value = -out.value;
    return out;
  }

  std::vector<Panel> panels;
  const auto pts = split_points(a, b, breakpoints);
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    // Two starting panels per smooth piece.
    const double x0 = pts[k];
    const double x2 = pts[k + 1];
    const double x1 = 0.5 * (x0 + x2);
    const double f0 = f(x0);
    const double f1 = f(x1);
    const double f2 = f(x2);
    const double fq1 = f(0.5 * (x0 + x1));
    const double fq3 = f(0.5 * (x1 + x2));
    out.evaluations += 5;
    panels.push_back(make_panel(f, x0, x1, f0, fq1, f1, 1, out.evaluations));
    panels.push_back(make_panel(f, x1, x2, f1, fq3, f2, 1, out.evaluations));
  }

  auto cmp = [&panels](std::size_t l, std::size_t r) { return panels[l].error < panels[r].error; };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> open(cmp);
  double total = 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i < panels.size(); ++i) {
    total += panels[i].estimate;
    err += panels[i].error;
    if (panels[i].depth < policy.max_depth) open.push(i);
  }

  auto target = [&] { return std::max(policy.abs_tol, policy.rel_tol * std::abs(total)); };
  while (err > target() && !open.empty() && panels.size() < kMaxPanels) {
    const std::size_t i = open.top();
    open.pop();
    const Panel p = panels[i];
    const double m = 0.5 * (p.a + p.b);
    Panel left = make_panel(f, p.a, m, p.fa, p.fl, p.fm, p.depth + 1, out.evaluations);
    Panel right = make_panel(f, m, p.b, p.fm, p.fr, p.fb, p.depth + 1, out.evaluations);
    total += left.estimate + right.estimate - p.estimate;
    err += left.error + right.error - p.error;
    panels[i] = left;
    panels.push_back(right);
    if (left.depth < policy.max_depth) {
      open.push(i);
      open.push(panels.size() - 1);
    }
  }

  CompensatedSum sum;
  double err_sum = 0.0;
  for (const auto& p : panels) {
    sum.add(p.estimate);
    err_sum += p.error;
  }
  out.value = sum.value();
  out.error = err_sum;
  out.converged = std::isfinite(out.value) &&
                  err_sum <= std::max(policy.abs_tol, policy.rel_tol * std::abs(out.value)) * (1.0 + 1e-9);
  return out;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadraturePolicy& policy, std::span<const double> breakpoints) {
  const QuadResult r = adaptive_simpson(f, a, b, policy, breakpoints);
  if (!r.converged) {
    std::ostringstream os;
    os << "adaptive Simpson did not converge on [" << a << ", " << b << "]: estimate " << r.value
       << ", error " << r.error;
    throw ConvergenceError(os.str());
  }
  return r.value;
}

// ---------------------------------------------------------------------------

MeasureEvaluator::MeasureEvaluator(Density1D d, QuadraturePolicy p)
    : density_(std::move(d)), policy_(p) {
  policy_.validate();
}

MeasureEvaluator::MeasureEvaluator(DensityND d, QuadraturePolicy p)
    : density_(std::move(d)), policy_(p) {
  policy_.validate();
}

MeasureEvaluator::MeasureEvaluator(Density d, QuadraturePolicy p) : density_(std::move(d)), policy_(p) {
  policy_.validate();
}

std::size_t MeasureEvaluator::dimension() const {
  return std::visit(overloaded{
                        [](const Density1D&) { return std::size_t{1}; },
                        [](const DensityND& d) { return d.dimension(); },
                    },
                    density_);
}

MeasureEvaluator MeasureEvaluator::with_policy(QuadraturePolicy p) const {
  return MeasureEvaluator(density_, p);
}

std::string MeasureEvaluator::name() const {
  return std::visit([](const auto& d) { return d.name(); }, density_);
}

double MeasureEvaluator::density_at(std::span<const double> x) const {
  return std::visit(overloaded{
                        [&](const Density1D& d) {
                          if (x.size() != 1) throw DomainError("point dimension does not match density");
                          return d(x[0]);
                        },
                        [&](const DensityND& d) { return d(x); },
                    },
                    density_);
}

std::optional<Density1D> MeasureEvaluator::factor(std::size_t i) const {
  return std::visit(overloaded{
                        [&](const Density1D& d) -> std::optional<Density1D> {
                          if (i != 0) return std::nullopt;
                          return d;
                        },
                        [&](const DensityND& d) -> std::optional<Density1D> {
                          auto f = d.factors();
                          if (!f || i >= f->size()) return std::nullopt;
                          return (*f)[i];
                        },
                    },
                    density_);
}

DensityND MeasureEvaluator::as_nd() const {
  return std::visit(overloaded{
                        [](const Density1D& d) { return DensityND::product({d}); },
                        [](const DensityND& d) { return d; },
                    },
                    density_);
}

double MeasureEvaluator::measure(const SetRep& s) const {
  return std::visit(overloaded{
                        [&](const IntervalUnion& u) { return measure_1d(*this, u); },
                        [&](const ProductSet& p) { return measure_product(*this, p); },
                        [&](const ConvexPolygon& p) { return measure_polygon(*this, p).value; },
                    },
                    s);
}

// ---------------------------------------------------------------------------

double measure_1d(const Density1D& d, const IntervalUnion& a, const QuadraturePolicy& policy) {
  if (a.is_empty()) return 0.0;
  if (a.is_full_line()) {
    const auto m = d.total_mass();
    if (!m) throw InfiniteMeasure("full line has infinite measure under " + d.name());
    return *m;
  }
  const auto bps = d.breakpoints();
  CompensatedSum sum;
  for (const auto& piece : a.pieces()) {
    if (piece.lo == piece.hi) continue;
    // Skip the part outside the support (tabulated densities are undefined there).
    const auto [slo, shi] = d.support();
    const double lo = std::max(piece.lo, slo);
    const double hi = std::min(piece.hi, shi);
    if (!(lo < hi)) continue;
    sum.add(integrate([&d](double x) { return d(x); }, lo, hi, policy, bps));
  }
  return std::max(0.0, sum.value());
}

double measure_1d(const MeasureEvaluator& ev, const IntervalUnion& a) {
  if (ev.dimension() != 1) throw DomainError("measure_1d needs a one-dimensional density");
  return measure_1d(*ev.factor(0), a, ev.policy());
}

double measure_product(const MeasureEvaluator& ev, const ProductSet& a) {
  if (ev.dimension() != a.dimension()) throw DomainError("density and set dimensions differ");
  if (a.is_empty()) return 0.0;
  double m = 1.0;
  for (std::size_t i = 0; i < a.dimension(); ++i) {
    const auto f = ev.factor(i);
    if (!f) throw DomainError("measure_product needs a separable density");
    m *= measure_1d(*f, a.factor(i), ev.policy());
  }
  return m;
}

PolygonMeasure measure_polygon(const MeasureEvaluator& ev, const ConvexPolygon& p) {
  if (ev.dimension() != 2) throw DomainError("measure_polygon needs a two-dimensional density");
  if (p.is_degenerate()) return {0.0, true};
  const DensityND d = ev.as_nd();
  const auto xr = project_axis(p, Axis::x);

  std::vector<double> outer_breaks;
  for (const auto& v : p.vertices()) outer_breaks.push_back(v.x);
  for (double b : d.breakpoints(0)) outer_breaks.push_back(b);
  const auto y_breaks = d.breakpoints(1);
  const QuadraturePolicy inner = inner_policy(ev.policy());

  const auto& verts = p.vertices();
  const std::size_t n = verts.size();
  auto vertical_chord = [&](double x) -> std::optional<Interval> {
    double lo = kInf;
    double hi = -kInf;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 a = verts[i];
      const Vec2 b = verts[(i + 1) % n];
      const double x0 = std::min(a.x, b.x);
      const double x1 = std::max(a.x, b.x);
      if (x < x0 || x > x1) continue;
      if (a.x == b.x) {
        lo = std::min({lo, a.y, b.y});
        hi = std::max({hi, a.y, b.y});
        continue;
      }
      const double w = (x - a.x) / (b.x - a.x);
      const double y = a.y + w * (b.y - a.y);
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
    if (lo > hi) return std::nullopt;
    return Interval{lo, hi};
  };

  auto section = [&](double x) {
    const auto c = vertical_chord(x);
    if (!c || c->lo >= c->hi) return 0.0;
    return integrate([&](double y) { return d(x, y); }, c->lo, c->hi, inner, y_breaks);
  };
  return {std::max(0.0, integrate(section, xr.lo, xr.hi, ev.policy(), outer_breaks)), false};
}

double section_measure(const MeasureEvaluator& ev, const ConvexPolygon& p, const DirectionUnit& dir,
                       double t) {
  if (ev.dimension() != 2) throw DomainError("section_measure needs a two-dimensional density");
  const auto c = chord(p, dir, t);
  if (!c || c->lo >= c->hi) return 0.0;
  const DensityND d = ev.as_nd();
  const Vec2 u = dir.u();
  const Vec2 w = dir.perp();
  std::vector<double> breaks;
  for (std::size_t axis = 0; axis < 2; ++axis) {
    const double uk = axis == 0 ? u.x : u.y;
    const double wk = axis == 0 ? w.x : w.y;
    if (wk == 0.0) continue;
    for (double b : d.breakpoints(axis)) breaks.push_back((b - t * uk) / wk);
  }
  return std::max(0.0, integrate(
                           [&](double tau) {
                             return d(t * u.x + tau * w.x, t * u.y + tau * w.y);
                           },
                           c->lo, c->hi, ev.policy(), breaks));
}

SectionMax max_section(const MeasureEvaluator& ev, const ConvexPolygon& p, const DirectionUnit& dir) {
  if (ev.dimension() != 2) throw DomainError("max_section needs a two-dimensional density");
  const Vec2 u = dir.u();
  double lo = kInf;
  double hi = -kInf;
  for (const auto& v : p.vertices()) {
    lo = std::min(lo, v.dot(u));
    hi = std::max(hi, v.dot(u));
  }
  if (lo == hi) return {lo, section_measure(ev, p, dir, lo)};

  const int n = ev.policy().section_grid;
  const double step = (hi - lo) / static_cast<double>(n - 1);
  auto at = [&](int i) { return i == n - 1 ? hi : lo + step * static_cast<double>(i); };
  auto value = [&](double t) { return section_measure(ev, p, dir, t); };

  int best_i = 0;
  double best = value(at(0));
  for (int i = 1; i < n; ++i) {
    const double v = value(at(i));
    // Strict improvement beyond round-off keeps the smallest offset among ties.
    if (v > best * (1.0 + 1e-12) + 1e-300) {
      best = v;
      best_i = i;
    }
  }

  // Golden-section search for the maximum on the bracketing cells.
  double a = at(std::max(best_i - 1, 0));
  double b = at(std::min(best_i + 1, n - 1));
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = value(x1);
  double f2 = value(x2);
  for (int it = 0; it < 80 && (b - a) > 1e-12 * std::max(1.0, hi - lo); ++it) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = value(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = value(x2);
    }
  }
  const double t_ref = f1 >= f2 ? x1 : x2;
  const double v_ref = std::max(f1, f2);
  SectionMax out{at(best_i), best};
  if (v_ref > best * (1.0 + 1e-12) + 1e-300) out = {t_ref, v_ref};
  return out;
}

}  // namespace bmlab
