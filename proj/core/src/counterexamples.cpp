#include "bmlab/counterexamples.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "bmlab/errors.hpp"
#include "bmlab/means.hpp"
#include "bmlab/workers.hpp"

namespace bmlab {

namespace {

constexpr double kGolden = 0.6180339887498949;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double lerp(double lo, double hi, double u) { return lo + (hi - lo) * u; }

// Sutherland-Hodgman clip of a convex polygon against {p : p·n <= h}.
std::vector<Vec2> clip(const std::vector<Vec2>& poly, Vec2 n, double h) {
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 p = poly[i];
    const Vec2 q = poly[(i + 1) % poly.size()];
    const double dp = p.dot(n) - h;
    const double dq = q.dot(n) - h;
    if (dp <= 0.0) out.push_back(p);
    if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) out.push_back(p + (q - p) * (dp / (dp - dq)));
  }
  return out;
}

std::vector<Vec2> box_vertices(double l) { return {{-l, -l}, {l, -l}, {l, l}, {-l, l}}; }

Vec2 polar(double r, double angle) { return {r * std::cos(angle), r * std::sin(angle)}; }

}  // namespace

void PowerFamilyInstance::validate() const {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("power family needs 0 < s < 1");
  if (!(r > s)) throw DomainError("power family needs r > s");
  if (!(a > 0.0 && a < b)) throw DomainError("power family needs 0 < a < b");
}

double power_mass(double s, double a) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("power_mass needs 0 < s < 1");
  if (!(a >= 0.0)) throw DomainError("power_mass needs a >= 0");
  return s * std::pow(a, 1.0 / s);
}

double power_family_deficit(const PowerFamilyInstance& inst, double lambda) {
  inst.validate();
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("lambda must lie in [0, 1]");
  const double mid = power_mass(inst.s, (1.0 - lambda) * inst.a + lambda * inst.b);
  return mid - s_mean(power_mass(inst.s, inst.a), power_mass(inst.s, inst.b), {inst.r, lambda});
}

double power_family_limit(double s, double b) { return power_mass(s, b) / std::pow(2.0, 1.0 / s); }

PowerSearchResult power_family_search(double s, double r, double b) {
  if (!(b > 0.0)) throw DomainError("power_family_search needs b > 0");
  auto deficit = [&](double a) { return power_family_deficit({s, r, a, b}, 0.5); };

  // Scan in u = log(a / b) over [log 1e-9, log(1 - 1e-9)].
  const double u_lo = std::log(1e-9);
  const double u_hi = std::log1p(-1e-9);
  const std::size_t n = 400;
  std::vector<double> us = linspace(u_lo, u_hi, n);
  std::size_t best = 0;
  double best_d = kInf;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = deficit(b * std::exp(us[i]));
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  double lo = us[best == 0 ? 0 : best - 1];
  double hi = us[std::min(best + 1, n - 1)];
  double x1 = hi - kGolden * (hi - lo);
  double x2 = lo + kGolden * (hi - lo);
  double f1 = deficit(b * std::exp(x1));
  double f2 = deficit(b * std::exp(x2));
  for (int it = 0; it < 80; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = deficit(b * std::exp(x1));
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = deficit(b * std::exp(x2));
    }
  }
  double a = b * std::exp(us[best]);
  for (auto [x, f] : {std::pair{x1, f1}, std::pair{x2, f2}}) {
    if (f < best_d) {
      best_d = f;
      a = b * std::exp(x);
    }
  }
  return {a, best_d, best_d < -1e-12};
}

const char* to_string(SearchFamilyId f) {
  switch (f) {
    case SearchFamilyId::triangle: return "triangle";
    case SearchFamilyId::halfplane: return "halfplane";
    case SearchFamilyId::symmetric_dilate: return "symmetric-dilate";
  }
  return "unknown";
}

SearchFamilyId parse_search_family(const std::string& name) {
  if (name == "triangle") return SearchFamilyId::triangle;
  if (name == "halfplane") return SearchFamilyId::halfplane;
  if (name == "symmetric-dilate") return SearchFamilyId::symmetric_dilate;
  throw DomainError("unknown search family '" + name + "'");
}

std::size_t family_dimension(SearchFamilyId f) {
  switch (f) {
    case SearchFamilyId::triangle: return 10;
    case SearchFamilyId::halfplane: return 8;
    case SearchFamilyId::symmetric_dilate: return 8;
  }
  return 0;
}

SetPair family_sets(SearchFamilyId f, const std::vector<double>& p) {
  if (p.size() != family_dimension(f)) throw DomainError("wrong parameter count for search family");
  for (double v : p)
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("search parameters must lie in [0, 1]");

  switch (f) {
    case SearchFamilyId::triangle: {
      // Angular gaps stay below pi, so 0 is interior to A.
      const double base = kTwoPi * p[0];
      std::vector<Vec2> tri;
      for (int k = 0; k < 3; ++k) {
        const double angle = base + kTwoPi * k / 3.0 + lerp(-0.5, 0.5, p[1 + k]);
        tri.push_back(polar(lerp(0.2, 2.0, p[4 + k]), angle));
      }
      const ConvexPolygon a = ConvexPolygon::hull(tri);
      const double c = lerp(1.0, 3.0, p[7]);
      const Vec2 w{lerp(-1.5, 1.5, p[8]), lerp(-1.5, 1.5, p[9])};
      std::vector<Vec2> pts = a.vertices();
      for (const Vec2& v : a.vertices()) pts.push_back(v * c + w);
      return {a, ConvexPolygon::hull(pts)};
    }
    case SearchFamilyId::halfplane: {
      const double l = lerp(0.5, 2.0, p[0]);
      std::vector<Vec2> b = box_vertices(l);
      b = clip(b, polar(1.0, kTwoPi * p[1]), lerp(0.1, 1.0, p[2]) * l);
      b = clip(b, polar(1.0, kTwoPi * p[3]), lerp(0.1, 1.0, p[4]) * l);
      std::vector<Vec2> a = clip(b, {1.0, 0.0}, lerp(0.1, 1.0, p[5]) * l);
      for (Vec2 n : {Vec2{-1.0, 0.0}, Vec2{0.0, 1.0}, Vec2{0.0, -1.0}}) a = clip(a, n, lerp(0.1, 1.0, p[5]) * l);
      a = clip(a, polar(1.0, kTwoPi * p[6]), lerp(0.05, 1.0, p[7]) * l);
      return {ConvexPolygon::hull(a), ConvexPolygon::hull(b)};
    }
    case SearchFamilyId::symmetric_dilate: {
      std::vector<Vec2> pts;
      for (int k = 0; k < 3; ++k) {
        const Vec2 v = polar(lerp(0.3, 2.0, p[k]), std::numbers::pi * (k + p[3 + k]) / 3.0);
        pts.push_back(v);
        pts.push_back(v * -1.0);
      }
      const ConvexPolygon base = ConvexPolygon::hull(pts);
      return {dilate(base, lerp(0.2, 1.0, p[6])), dilate(base, lerp(1.0, 3.0, p[7]))};
    }
  }
  throw DomainError("unknown search family");
}

SearchResult violation_search(const SearchFamily& fam, std::size_t budget, const SearchOptions& opts) {
  if (fam.measure.dimension() != 2) throw DomainError("violation_search needs a planar measure");
  if (budget == 0) throw DomainError("search budget must be positive");
  const std::size_t dim = family_dimension(fam.family);
  const std::size_t restarts = std::max<std::size_t>(1, std::min(opts.restarts, budget));
  const MeasureEvaluator loose(fam.measure, opts.search_policy);
  const std::vector<double> half{0.5};

  struct Restart {
    std::vector<double> params;
    double deficit = kInf;
    std::size_t evaluations = 0;
  };
  std::vector<Restart> runs(restarts);

  parallel_for(restarts, [&](std::size_t idx) {
    Restart& run = runs[idx];
    const std::size_t share = budget / restarts + (idx < budget % restarts ? 1 : 0);
    std::seed_seq seq{fam.seed, static_cast<std::uint64_t>(idx)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    auto objective = [&](const std::vector<double>& x) {
      ++run.evaluations;
      try {
        const SetPair sets = family_sets(fam.family, x);
        BmOptions bm;
        bm.refine_lambda = false;
        bm.certify = false;
        const auto r = check_bm(loose, sets.a, sets.b, fam.s, half, bm);
        return r.vacuous() ? kInf : r.worst_deficit;
      } catch (const std::exception&) {
        return kInf;
      }
    };

    std::vector<double> x(dim);
    while (run.evaluations < share) {
      for (auto& v : x) v = unit(rng);
      double fx = objective(x);
      double h = 0.25;
      while (run.evaluations < share && h >= 1e-3) {
        bool improved = false;
        for (std::size_t k = 0; k < dim && run.evaluations < share; ++k) {
          for (double sign : {1.0, -1.0}) {
            if (run.evaluations >= share) break;
            std::vector<double> y = x;
            y[k] = std::clamp(y[k] + sign * h, 0.0, 1.0);
            if (y[k] == x[k]) continue;
            const double fy = objective(y);
            if (fy < fx) {
              x = std::move(y);
              fx = fy;
              improved = true;
              break;
            }
          }
        }
        if (!improved) h *= 0.5;
      }
      if (fx < run.deficit) {
        run.deficit = fx;
        run.params = x;
      }
    }
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i)
    if (runs[i].deficit < runs[best].deficit) best = i;
  if (runs[best].params.empty()) throw DomainError("search produced no valid set pair");

  SearchResult out{{}, {}, runs[best].params,
                   family_sets(fam.family, runs[best].params)};
  out.restart = best;
  for (const auto& r : runs) out.evaluations += r.evaluations;

  const MeasureEvaluator ev(fam.measure);
  BmOptions point;
  point.refine_lambda = false;
  out.report = check_bm(ev, out.sets.a, out.sets.b, fam.s, half, point);
  out.full_scan = check_bm(ev, out.sets.a, out.sets.b, fam.s, default_lambda_grid());
  for (auto* r : {&out.report, &out.full_scan}) {
    r->exploratory = true;
    for (std::size_t k = 0; k < out.params.size(); ++k) r->witness["param_" + std::to_string(k)] = out.params[k];
    r->witness["restart"] = static_cast<double>(best);
    r->witness["s"] = fam.s;
  }
  out.report.notes.push_back("budget of " + std::to_string(budget) + " evaluations exhausted; best-so-far reported");
  return out;
}

}  // namespace bmlab
