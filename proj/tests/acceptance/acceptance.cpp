// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "bmlab/concavity.hpp"
#include "bmlab/counterexamples.hpp"
#include "bmlab/means.hpp"
#include "bmlab/parallel.hpp"
#include "bmlab/supconv.hpp"
#include "support/oracles.hpp"

using namespace bmlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Tabulated density on [-6, 6] with its maximum at 0, non-decreasing before
// and non-increasing after.
Density1D unimodal_at_zero(oracle::Rng& r) {
  const int n = 121;
  std::vector<double> grid(n), values(n);
  for (int i = 0; i < n; ++i) grid[i] = -6.0 + 12.0 * i / (n - 1);
  const int m = n / 2;
  values[m] = r.uniform(0.5, 2.0);
  for (int i = m - 1; i >= 0; --i) values[i] = values[i + 1] * r.uniform(0.8, 1.0);
  for (int i = m + 1; i < n; ++i) values[i] = values[i - 1] * r.uniform(0.8, 1.0);
  return Density1D::tabulated(grid, values, 0.0);
}

Density1D random_factor(oracle::Rng& r) {
  switch (r.integer(0, 3)) {
    case 0: return Density1D::gaussian(r.uniform(0.5, 2.0));
    case 1: return Density1D::two_sided_exponential(r.uniform(0.5, 2.0), true);
    case 2: return Density1D::uniform(-r.uniform(0.5, 3.0), r.uniform(0.5, 3.0));
    default: return unimodal_at_zero(r);
  }
}

ProductSet random_box_with_origin(oracle::Rng& r, double reach) {
  return ProductSet::box({{-r.uniform(0.0, reach), r.uniform(0.05, reach)}, {-r.uniform(0.05, reach), r.uniform(0.0, reach)}});
}

Outcome criterion1() {
  const auto start = std::chrono::steady_clock::now();
  oracle::Rng r(1001);
  const auto grid = default_lambda_grid();
  double worst = kInf;
  int failures = 0;
  for (int k = 0; k < 200; ++k) {
    const DensityND d = k < 100 ? DensityND::exponential_product(2, true)
                                : DensityND::product({random_factor(r), random_factor(r)});
    const MeasureEvaluator ev(d);
    const auto rep = check_bm(ev, random_box_with_origin(r, 3.0), random_box_with_origin(r, 3.0), 0.5, grid);
    if (rep.vacuous()) continue;
    worst = std::min(worst, rep.worst_deficit);
    if (rep.worst_deficit < -1e-6) ++failures;
  }
  // Pinned instance against independent 1-D Gauss-Legendre integrals.
  auto half_exp = [](double x) { return 0.5 * std::exp(-std::abs(x)); };
  const double side = oracle::gauss_legendre(half_exp, 0.0, 1.0);
  const double centre = oracle::gauss_legendre(half_exp, -0.5, 0.5);
  const double mu_ab = side * side;
  const double mu_mid = centre * centre;
  const MeasureEvaluator ex(DensityND::exponential_product(2, true));
  const auto a = ProductSet::box({{0, 1}, {0, 1}});
  const auto b = ProductSet::box({{-1, 0}, {-1, 0}});
  const double lib_mid = ex.measure(mink_combine(a, b, 0.5));
  const double lib_mean = s_mean(ex.measure(a), ex.measure(b), {0.5, 0.5});
  const bool pinned = std::abs(lib_mid / 0.1548181 - 1) < 1e-6 && std::abs(lib_mid / mu_mid - 1) < 1e-6 &&
                      std::abs(lib_mean / mu_ab - 1) < 1e-6 && lib_mid >= lib_mean;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {failures == 0 && pinned && secs < 30.0,
          fmt("200 box pairs, worst deficit %.3g, %d below -1e-6; pinned mu(mid) %.7f >= mean %.8f; %.1f s", worst, failures,
              lib_mid, lib_mean, secs)};
}

Outcome criterion2() {
  oracle::Rng r(1002);
  const auto grid = default_lambda_grid();
  double worst = kInf;
  int failures = 0;
  for (int k = 0; k < 200; ++k) {
    Density1D d = Density1D::gaussian();
    double lo = -6, hi = 6;
    switch (k % 3) {
      case 0: d = Density1D::gaussian(r.uniform(0.5, 2), r.uniform(-1, 1)); break;
      case 1: d = Density1D::two_sided_exponential(r.uniform(0.5, 2), true); break;
      default:
        d = oracle::random_unimodal_tabulated(r);
        lo = -4;
        hi = 4;
    }
    const double m = *d.mode();
    auto piece = [&](double w) { return Interval{std::max(lo, m - r.uniform(0.01, w)), std::min(hi, m + r.uniform(0.01, w))}; };
    std::vector<Interval> pa{piece(1.5)};
    const auto extra = oracle::random_union(r, std::max(lo, m - 3.5), std::min(hi, m + 3.5));
    for (const auto& p : extra.pieces()) pa.push_back(p);
    std::vector<Interval> pb{piece(2.0)};
    if (r.integer(0, 1)) pb.push_back({std::min(hi - 0.1, m + 2.0), std::min(hi, m + 2.5)});
    const auto rep = check_prop_concave(MeasureEvaluator(d), IntervalUnion(pa), IntervalUnion(pb), grid);
    if (!rep.passed() || rep.worst_deficit < -1e-6) ++failures;
    if (!rep.vacuous()) worst = std::min(worst, rep.worst_deficit);
  }
  return {failures == 0, fmt("200 unimodal densities, worst deficit %.3g, %d failures", worst, failures)};
}

Outcome criterion3() {
  const double d = power_family_deficit({0.5, 1.0, 0.5, 1.0}, 0.5);
  bool ok = std::abs(d - -0.03125) < 1e-12;
  std::string found;
  for (auto [s, rr] : {std::pair{0.5, 0.75}, std::pair{0.5, 1.0}, std::pair{0.9, 0.95}}) {
    const auto res = power_family_search(s, rr, 1.0);
    ok = ok && res.violation && res.deficit <= -1e-3;
    found += fmt(" (%.2g,%.2g):%.4g", s, rr, res.deficit);
  }
  // Left side at a -> 0 is the mass of [-1/2, 1/2].
  double limit_err = 0.0;
  for (double s : {0.3, 0.5, 0.9}) {
    // Substituting x = u^10 / 2 removes the endpoint singularity of the integrand.
    const double left = oracle::gauss_legendre(
        [&](double u) { return std::pow(0.5 * std::pow(u, 10), (1 - s) / s) * 5.0 * std::pow(u, 9); }, 0.0, 1.0);
    limit_err = std::max(limit_err, std::abs(left - power_family_limit(s, 1.0)));
  }
  ok = ok && limit_err < 1e-6;
  return {ok, fmt("closed form %.15g; search%s; limit error %.2g", d, found.c_str(), limit_err)};
}

Outcome criterion4() {
  const MeasureEvaluator g(DensityND::gaussian_standard(2));
  const auto b_ts = linspace(-2, 2, 33);
  const auto d_ts = linspace(0.25, 3, 23);
  bool ok = true;
  std::string detail;
  for (const auto& [name, set] : {std::pair<const char*, ConvexPolygon>{"square", ConvexPolygon::box(-1, 1, -1, 1)},
                                  std::pair<const char*, ConvexPolygon>{"hexagon", ConvexPolygon::regular(6, 1.0)}}) {
    const bool unconditional = is_unconditional(set);
    const auto bp = check_b_property(g, set, b_ts);
    const auto dl = scan_dilates(g, set, d_ts, 0.5);
    const auto pipe = prop_equiv_pipeline(g, set);
    ok = ok && unconditional && bp.passed() && dl.passed() && bp.worst_deficit >= -1e-7 &&
         dl.worst_deficit >= -1e-7 && !pipe.contradiction;
    detail += fmt("%s b=%.3g dil=%.3g%s; ", name, bp.worst_deficit, dl.worst_deficit,
                  pipe.contradiction ? " CONTRADICTION" : "");
  }
  return {ok, detail};
}

GridFunction1D random_unimodal_grid(oracle::Rng& r, std::size_t n, double top) {
  GridFunction1D f{-4, 8.0 / (n - 1), std::vector<double>(n, 0.0)};
  const std::size_t lo = r.integer(5, static_cast<int>(n / 2));
  const std::size_t hi = r.integer(static_cast<int>(n / 2) + 1, static_cast<int>(n) - 5);
  const std::size_t m = r.integer(static_cast<int>(lo), static_cast<int>(hi));
  f.values[m] = top;
  for (std::size_t i = m; i-- > lo;) f.values[i] = f.values[i + 1] * r.uniform(0.85, 1.0);
  for (std::size_t i = m + 1; i <= hi; ++i) f.values[i] = f.values[i - 1] * r.uniform(0.85, 1.0);
  return f;
}

Outcome criterion5() {
  oracle::Rng r(1005);
  int failures = 0;
  double worst_margin = kInf;
  for (int k = 0; k < 200; ++k) {
    const double top = r.uniform(0.5, 2.0);
    const auto f = random_unimodal_grid(r, 256, top);
    const auto g = random_unimodal_grid(r, 256, top);
    for (double l : {0.25, 0.5, 0.75}) {
      const auto rep = check_henstock_macbeath(f, g, l);
      if (!rep.passed()) ++failures;
      worst_margin = std::min(worst_margin, rep.worst_deficit + rep.tolerance);
    }
  }
  const MeasureEvaluator u(Density1D::uniform(-1, 2));
  const auto pipe = prop_equiv_pipeline(u, IntervalUnion::single(-1, 1));
  const bool remark = pipe.b_property.violated() && pipe.dilates.passed() && !pipe.contradiction;
  return {failures == 0 && remark,
          fmt("600 HM checks, %d failures, min margin %.3g; converse example: B-property %s, dilates %s", failures,
              worst_margin, to_string(pipe.b_property.verdict), to_string(pipe.dilates.verdict))};
}

Outcome criterion6() {
  oracle::Rng r(1006);
  const double lo = -3, hi = 3;
  const int n = 600;
  const double h = (hi - lo) / n;
  int interval_failures = 0;
  for (int k = 0; k < 100; ++k) {
    const auto a = oracle::random_union(r);
    const auto b = oracle::random_union(r);
    const double l = r.uniform(0.05, 0.95);
    const auto c = mink_combine_1d(a, b, l);
    std::vector<double> pa, pb;
    for (int i = 0; i <= n; ++i) {
      if (a.contains(lo + i * h)) pa.push_back(lo + i * h);
      if (b.contains(lo + i * h)) pb.push_back(lo + i * h);
    }
    std::vector<char> hit(n + 1, 0);
    for (double x : pa)
      for (double y : pb) {
        const long idx = std::lround(((1 - l) * x + l * y - lo) / h);
        if (idx >= 0 && idx <= n) hit[idx] = 1;
      }
    for (int i = 0; i <= n; ++i) {
      const double z = lo + i * h;
      const bool exact = c.contains(z);
      if (exact == static_cast<bool>(hit[i])) continue;
      if (c.contains(z - h) == exact && c.contains(z + h) == exact) {
        ++interval_failures;
        break;
      }
    }
  }
  int poly_failures = 0;
  double worst = kInf;
  for (int k = 0; k < 100; ++k) {
    const auto a = oracle::random_polygon(r, {r.uniform(-2, 2), r.uniform(-2, 2)});
    const auto b = oracle::random_polygon(r, {r.uniform(-2, 2), r.uniform(-2, 2)});
    const double l = r.uniform(0, 1);
    const auto c = mink_combine_polygon(a, b, l);
    const auto& v = c.vertices();
    bool convex = v.size() >= 3;
    for (std::size_t i = 0; i < v.size(); ++i)
      convex = convex && cross(v[(i + 1) % v.size()] - v[i], v[(i + 2) % v.size()] - v[(i + 1) % v.size()]) > 0;
    const double deficit = std::sqrt(oracle::shoelace(v)) - (1 - l) * std::sqrt(a.area()) - l * std::sqrt(b.area());
    worst = std::min(worst, deficit);
    if (!convex || deficit < -1e-9) ++poly_failures;
  }
  return {interval_failures == 0 && poly_failures == 0,
          fmt("interval pairs off by more than a cell: %d; polygon failures: %d, worst BM deficit %.3g",
              interval_failures, poly_failures, worst)};
}

Outcome criterion7() {
  const auto sq = ConvexPolygon::box(0, 1, 0, 1);
  const MeasureEvaluator leb(DensityND::lebesgue(2));
  const std::vector<double> ts{0.25, 0.5, 1.0, 2.0};
  const auto c = parallel_curve(leb, sq, disk_polygon(64), ts);
  double worst_rel = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i)
    worst_rel = std::max(worst_rel, std::abs(c.values[i] / steiner_area(sq, ts[i]) - 1));
  oracle::Rng r(1007);
  int failures = 0;
  const auto grid = linspace(0, 2, 21);
  for (int k = 0; k < 50; ++k) {
    const MeasureEvaluator ev(DensityND::product({random_factor(r), random_factor(r)}));
    const auto curve = parallel_curve(ev, random_box_with_origin(r, 2.0), random_box_with_origin(r, 1.0), grid);
    if (!check_parallel_concavity(curve, 0.5).passed()) ++failures;
  }
  return {worst_rel < 0.01 && failures == 0,
          fmt("Steiner max relative error %.3g%%; box corollary failures %d/50", 100 * worst_rel, failures)};
}

Outcome criterion8() {
  const MeasureEvaluator iq(DensityND::inverse_quadratic());
  // Independent confirmation of (-1)-concavity: 1/phi = 1 + x^2 + y^2 is convex.
  oracle::Rng r(1008);
  bool convex = true;
  for (int i = 0; i < 1000; ++i) {
    const double x = r.uniform(-5, 5), y = r.uniform(-5, 5), z = r.uniform(-5, 5), w = r.uniform(-5, 5);
    const double l = r.uniform(0, 1);
    auto q = [](double a, double b) { return 1 + a * a + b * b; };
    convex = convex && q((1 - l) * x + l * z, (1 - l) * y + l * w) <= (1 - l) * q(x, y) + l * q(z, w) + 1e-12;
  }
  int failures = 0, vacuous = 0;
  double worst = kInf, worst_gap = 0.0;
  const auto u = DirectionUnit::e1();
  for (int k = 0; k < 50; ++k) {
    const auto a = oracle::random_polygon(r, {r.uniform(-1, 1), r.uniform(-1, 1)});
    ConvexPolygon b0 = oracle::random_polygon(r, {r.uniform(-0.2, 0.2), r.uniform(-0.2, 0.2)});
    while (!b0.contains({0, 0}, -1e-3)) b0 = oracle::random_polygon(r, {r.uniform(-0.2, 0.2), r.uniform(-0.2, 0.2)});
    const auto b = dilate(b0, match_max_section_scale(iq, a, b0, u));
    const double ma = max_section(iq, a, u).value;
    const double mb = max_section(iq, b, u).value;
    worst_gap = std::max(worst_gap, std::abs(ma - mb) / ma);
    const auto rep = check_bonnesen_sections(iq, a, b, u, default_lambda_grid());
    if (rep.vacuous()) ++vacuous;
    if (!rep.passed() || rep.worst_deficit < -1e-5) ++failures;
    if (!rep.vacuous()) worst = std::min(worst, rep.worst_deficit);
  }
  return {convex && failures == 0 && worst_gap <= 1e-6,
          fmt("50 pairs, worst deficit %.3g, failures %d (vacuous %d), max section gap %.2g", worst, failures, vacuous,
              worst_gap)};
}

GridFunction2D product_grid(oracle::Rng& r, std::size_t n) {
  GridFunction2D f{-2, -2, 4.0 / (n - 1), 4.0 / (n - 1), n, n, std::vector<double>(n * n)};
  std::vector<double> px(n), py(n);
  auto profile = [&](std::vector<double>& p) {
    const std::size_t m = r.integer(4, static_cast<int>(n) - 5);
    p[m] = r.uniform(0.5, 2);
    for (std::size_t i = m; i-- > 0;) p[i] = p[i + 1] * r.uniform(0.6, 1.0);
    for (std::size_t i = m + 1; i < n; ++i) p[i] = p[i - 1] * r.uniform(0.6, 1.0);
  };
  profile(px);
  profile(py);
  for (std::size_t iy = 0; iy < n; ++iy)
    for (std::size_t ix = 0; ix < n; ++ix) f.values[iy * n + ix] = px[ix] * py[iy];
  return f;
}

Outcome criterion9() {
  const auto start = std::chrono::steady_clock::now();
  oracle::Rng r(1009);
  const auto u = DirectionUnit::e1();
  int failures = 0, vacuous = 0;
  double worst_margin = kInf;
  for (int k = 0; k < 20; ++k) {
    const auto f = product_grid(r, 32);
    auto g = product_grid(r, 32);
    const double c = grid_max_section(f, u) / grid_max_section(g, u);
    for (auto& v : g.values) v *= c;
    const auto rep = check_dancs_uhrin(f, g, u, 0.5, -1.0);
    if (rep.vacuous()) ++vacuous;
    if (!rep.passed()) ++failures;
    worst_margin = std::min(worst_margin, rep.worst_deficit + rep.tolerance);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {failures == 0 && secs < 60.0,
          fmt("20 pairs on 32x32, failures %d (vacuous %d), min margin %.3g, %.1f s", failures, vacuous, worst_margin, secs)};
}

Outcome criterion10() {
  SearchFamily fam{SearchFamilyId::triangle, DensityND::exponential_product(2, true), 0.5, 7};
  const auto a = violation_search(fam, 20000);
  const auto b = violation_search(fam, 20000);
  const bool reproducible = a.params == b.params && a.report.worst_deficit == b.report.worst_deficit &&
                            a.report.witness == b.report.witness;
  bool survives = true;
  if (a.report.certified && *a.report.certified) survives = a.report.witness.at("deficit_tight") < 0.0;
  return {reproducible && survives && a.report.exploratory,
          fmt("best deficit %.6g at restart %zu, %zu evaluations, certified %s, reproducible %s",
              a.report.worst_deficit, a.restart, a.evaluations,
              a.report.certified ? (*a.report.certified ? "yes" : "no") : "n/a", reproducible ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"box products, s = 1/2", criterion1},
      {"unimodal 1-D arithmetic check", criterion2},
      {"power family certification", criterion3},
      {"B-property and dilates", criterion4},
      {"Henstock-Macbeath and converse example", criterion5},
      {"Minkowski combination oracles", criterion6},
      {"Steiner oracle and box parallel curves", criterion7},
      {"matched maximal sections", criterion8},
      {"Dancs-Uhrin grid check", criterion9},
      {"exploratory violation search", criterion10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
