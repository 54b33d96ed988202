#include "bmlab/concavity.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "bmlab/errors.hpp"
#include "bmlab/means.hpp"
#include "bmlab/workers.hpp"

namespace bmlab {

namespace {

constexpr double kGolden = 0.6180339887498949;

template <class Fn>
double evaluate_at(double parameter, Fn&& fn) {
  try {
    return fn();
  } catch (const EvaluationError&) {
    throw;
  } catch (const std::exception& e) {
    std::ostringstream os;
    os << e.what() << " (at parameter " << parameter << ")";
    throw EvaluationError(os.str(), parameter);
  }
}

// Values of fn over a parameter list, computed in parallel into fixed slots.
template <class Fn>
std::vector<double> sample_curve(std::span<const double> params, Fn&& fn) {
  std::vector<double> out(params.size());
  parallel_for(params.size(), [&](std::size_t i) { out[i] = evaluate_at(params[i], [&] { return fn(params[i]); }); });
  return out;
}

void require_sorted(std::span<const double> ts) {
  for (std::size_t i = 1; i < ts.size(); ++i)
    if (!(ts[i] > ts[i - 1])) throw DomainError("grid must be strictly increasing");
}

}  // namespace

double s_mean(double a, double b, SMeanSpec spec) {
  if (!(a >= 0.0) || !(b >= 0.0)) throw DomainError("s_mean arguments must be >= 0");
  if (!(spec.lambda >= 0.0 && spec.lambda <= 1.0)) throw DomainError("lambda must lie in [0, 1]");
  return power_mean(a, b, spec.lambda, spec.s);
}

std::vector<double> default_lambda_grid() { return linspace(0.0, 1.0, 11); }

std::vector<double> make_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw DomainError("grid needs step > 0 and hi >= lo");
  std::vector<double> g;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) g.push_back(lo + step * static_cast<double>(i));
  if (hi - g.back() > 1e-9 * std::max(1.0, std::abs(hi))) g.push_back(hi);
  else g.back() = std::min(g.back(), hi);
  if (n > 0 && std::abs(g.back() - hi) <= 1e-9 * std::max(1.0, std::abs(hi))) g.back() = hi;
  return g;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {lo};
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  g.back() = hi;
  return g;
}

// ---------------------------------------------------------------------------

ConcavityReport check_bm(const MeasureEvaluator& ev, const SetRep& a, const SetRep& b, double s,
                         std::span<const double> lambdas, const BmOptions& opts) {
  if (set_dimension(a) != ev.dimension() || set_dimension(b) != ev.dimension())
    throw DomainError("set and density dimensions differ");
  if (lambdas.empty()) throw DomainError("lambda grid is empty");
  for (double l : lambdas)
    if (!(l >= 0.0 && l <= 1.0)) throw DomainError("lambda grid values must lie in [0, 1]");

  const double mu_a = ev.measure(a);
  const double mu_b = ev.measure(b);
  if (!(mu_a * mu_b > 0.0)) {
    auto r = ConcavityReport::make_vacuous("mu(A) mu(B) = 0");
    r.witness = {{"mu_A", mu_a}, {"mu_B", mu_b}};
    return r;
  }

  auto lhs_at = [&](const MeasureEvaluator& e, double l) {
    return evaluate_at(l, [&] { return e.measure(mink_combine(a, b, l)); });
  };
  auto deficit_at = [&](double l, double lhs) { return lhs - s_mean(mu_a, mu_b, {s, l}); };

  const std::vector<double> lhs = sample_curve(lambdas, [&](double l) { return lhs_at(ev, l); });

  DeficitTracker tracker;
  auto record = [&](double l, double left) {
    tracker.add(left, s_mean(mu_a, mu_b, {s, l}), {{"lambda", l}, {"mu_A", mu_a}, {"mu_B", mu_b}});
  };
  std::size_t worst_i = 0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    record(lambdas[i], lhs[i]);
    if (deficit_at(lambdas[i], lhs[i]) < deficit_at(lambdas[worst_i], lhs[worst_i])) worst_i = i;
  }

  if (opts.refine_lambda && lambdas.size() >= 3) {
    const double lo = lambdas[worst_i == 0 ? 0 : worst_i - 1];
    const double hi = lambdas[std::min(worst_i + 1, lambdas.size() - 1)];
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    double lo_ = lo;
    double hi_ = hi;
    double f1 = lhs_at(ev, x1);
    double f2 = lhs_at(ev, x2);
    record(x1, f1);
    record(x2, f2);
    for (int it = 0; it < 18; ++it) {
      if (deficit_at(x1, f1) <= deficit_at(x2, f2)) {
        hi_ = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi_ - kGolden * (hi_ - lo_);
        f1 = lhs_at(ev, x1);
        record(x1, f1);
      } else {
        lo_ = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo_ + kGolden * (hi_ - lo_);
        f2 = lhs_at(ev, x2);
        record(x2, f2);
      }
    }
  }

  ConcavityReport r = tracker.finish(opts.tol);
  r.witness["s"] = s;
  if (r.violated() && opts.certify) {
    const MeasureEvaluator tight = ev.with_policy(ev.policy().tightened(10.0));
    const double l = r.witness.at("lambda");
    const double ta = tight.measure(a);
    const double tb = tight.measure(b);
    const double d = lhs_at(tight, l) - s_mean(ta, tb, {s, l});
    r.certified = d < -r.tolerance;
    r.witness["deficit_tight"] = d;
    if (!*r.certified) r.notes.push_back("violation did not survive 10x quadrature tightening");
  }
  return r;
}

std::vector<CurveDeficit> curve_deficits(std::span<const double> ts, std::span<const double> fs, double p) {
  if (ts.size() != fs.size()) throw DomainError("curve grid and values differ in length");
  if (ts.size() < 3) throw DomainError("curve check needs at least 3 samples");
  require_sorted(ts);
  for (double f : fs)
    if (!(f >= 0.0)) throw DomainError("curve values must be >= 0");

  const bool infinite_p = std::isinf(p);
  std::vector<double> g(fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const double f = fs[i];
    if (infinite_p) {
      g[i] = f;
    } else if (p == 0.0) {
      if (f == 0.0) throw DomainError("log-concavity test needs strictly positive values");
      g[i] = std::log(f);
    } else if (p > 0.0) {
      g[i] = std::pow(f, p);
    } else {
      if (f == 0.0) throw DomainError("negative power test needs strictly positive values");
      g[i] = -std::pow(f, p);
    }
  }

  std::vector<CurveDeficit> out;
  out.reserve(ts.size() - 2);
  for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
    const double w = (ts[i] - ts[i - 1]) / (ts[i + 1] - ts[i - 1]);
    const double rhs = infinite_p ? power_mean(g[i - 1], g[i + 1], w, p) : (1.0 - w) * g[i - 1] + w * g[i + 1];
    double scale = std::max({std::abs(g[i - 1]), std::abs(g[i]), std::abs(g[i + 1])});
    // Errors in log F are relative errors in F, so the scale never drops below one.
    if (p == 0.0) scale = std::max(scale, 1.0);
    out.push_back({i, g[i] - rhs, scale});
  }
  return out;
}

ConcavityReport check_curve_power_concavity(std::span<const double> ts, std::span<const double> fs,
                                            double p, const CheckTolerance& tol) {
  DeficitTracker tracker;
  for (const auto& d : curve_deficits(ts, fs, p)) {
    tracker.add_deficit(d.deficit, d.scale,
                        {{"t", ts[d.index]}, {"t_left", ts[d.index - 1]}, {"t_right", ts[d.index + 1]},
                         {"F", fs[d.index]}});
  }
  ConcavityReport r = tracker.finish(tol);
  r.witness["p"] = p;
  return r;
}

ConcavityReport scan_dilates(const MeasureEvaluator& ev, const SetRep& a, std::span<const double> ts,
                             double p, const CheckTolerance& tol) {
  if (!contains_origin(a)) return ConcavityReport::make_vacuous("0 is not in A");
  for (double t : ts)
    if (!(t > 0.0)) throw DomainError("dilate grid must be positive");
  const auto fs = sample_curve(ts, [&](double t) { return ev.measure(dilate(a, t)); });
  return check_curve_power_concavity(ts, fs, p, tol);
}

ConcavityReport check_b_property(const MeasureEvaluator& ev, const SetRep& a,
                                 std::span<const double> ts, const CheckTolerance& tol) {
  if (!contains_origin(a)) return ConcavityReport::make_vacuous("0 is not in A");
  const auto fs = sample_curve(ts, [&](double t) { return ev.measure(dilate(a, std::exp(t))); });
  return check_curve_power_concavity(ts, fs, 0.0, tol);
}

RadialCheck check_radial_monotone(const DensityND& d, std::span<const std::vector<double>> rays,
                                  std::span<const double> ts) {
  for (double t : ts)
    if (t < 0.0) throw DomainError("radial grid must be nonnegative");
  require_sorted(ts);
  std::vector<double> pt(d.dimension());
  for (std::size_t r = 0; r < rays.size(); ++r) {
    if (rays[r].size() != d.dimension()) throw DomainError("ray dimension does not match density");
    double prev = kInf;
    for (double t : ts) {
      for (std::size_t k = 0; k < pt.size(); ++k) pt[k] = t * rays[r][k];
      const double v = d(pt);
      if (v > prev + 1e-12 + 1e-12 * prev) return {false, r, t};
      prev = v;
    }
  }
  return {};
}

std::vector<std::vector<double>> random_rays(std::size_t n, std::size_t count, std::uint64_t seed) {
  if (n == 1) return {{-1.0}, {1.0}};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> rays;
  rays.reserve(count);
  while (rays.size() < count) {
    std::vector<double> v(n);
    double norm = 0.0;
    for (auto& x : v) {
      x = normal(rng);
      norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12) continue;
    for (auto& x : v) x /= norm;
    rays.push_back(std::move(v));
  }
  return rays;
}

EquivPipelineReport prop_equiv_pipeline(const MeasureEvaluator& ev, const SetRep& a,
                                        const EquivPipelineOptions& opts) {
  EquivPipelineReport out;
  const std::size_t n = ev.dimension();
  const auto rays = random_rays(n, opts.ray_count, opts.seed);
  out.radial = check_radial_monotone(ev.as_nd(), rays, opts.radial_ts);
  out.radial_monotone = out.radial.ok;
  out.b_property = check_b_property(ev, a, opts.b_ts, opts.tol);
  out.dilates = scan_dilates(ev, a, opts.dilate_ts, 1.0 / static_cast<double>(n), opts.tol);

  out.implication_applies = out.radial_monotone && out.b_property.passed();
  out.contradiction = out.implication_applies && out.dilates.violated();
  if (out.contradiction) {
    out.note = "numerical contradiction: radial monotonicity and B-property hold but dilate "
               "concavity fails; audit tolerances";
  } else if (out.implication_applies) {
    out.note = "implication instance confirmed";
  } else if (out.dilates.passed()) {
    out.note = "converse not implied: dilate concavity holds without the hypotheses";
  } else {
    out.note = "hypotheses not met";
  }
  return out;
}

// ---------------------------------------------------------------------------

ConcavityReport check_prop_concave(const MeasureEvaluator& ev, const IntervalUnion& a,
                                   const IntervalUnion& b, std::span<const double> lambdas,
                                   const BmOptions& opts) {
  if (ev.dimension() != 1) throw DomainError("check_prop_concave needs a one-dimensional density");
  const Density1D d = *ev.factor(0);
  if (!d.mode()) return ConcavityReport::make_vacuous("density has no mode");
  const double mode = *d.mode();
  if (!a.contains(mode) || !b.contains(mode))
    return ConcavityReport::make_vacuous("mode is not in A ∩ B");

  // Unimodality is verified on a grid covering both sets and the mode.
  double lo = mode;
  double hi = mode;
  for (const auto* set : {&a, &b}) {
    if (set->is_full_line()) {
      lo = std::min(lo, mode - 20.0);
      hi = std::max(hi, mode + 20.0);
    } else if (!set->is_empty()) {
      lo = std::min(lo, set->hull().lo);
      hi = std::max(hi, set->hull().hi);
    }
  }
  const auto [slo, shi] = d.support();
  lo = std::max(lo, slo);
  hi = std::min(hi, shi);
  auto grid = linspace(lo, hi, 2001);
  grid.push_back(mode);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.size() >= 3) {
    const auto uni = check_unimodal(d, grid);
    if (!uni.ok) {
      auto r = ConcavityReport::make_vacuous("density is not unimodal: " + uni.reason);
      if (uni.violation_at) r.witness["x"] = *uni.violation_at;
      return r;
    }
  }
  return check_bm(ev, a, b, 1.0, lambdas, opts);
}

ConcavityReport check_slab(const MeasureEvaluator& ev, const IntervalUnion& a1,
                           const ConvexPolygon& b, std::span<const double> lambdas,
                           const CheckTolerance& tol) {
  if (ev.dimension() != 2) throw DomainError("check_slab needs a two-dimensional density");
  const auto mu1 = ev.factor(0);
  const auto mu2 = ev.factor(1);
  if (!mu1 || !mu2) throw DomainError("check_slab needs a product density");
  const auto mass2 = mu2->total_mass();
  if (!mass2) throw DomainError("second factor has infinite total mass");

  if (!mu1->mode() || *mu1->mode() != 0.0) return ConcavityReport::make_vacuous("first factor is not unimodal at 0");
  const auto uni = check_unimodal(*mu1, linspace(-20.0, 20.0, 4001));
  if (!uni.ok) return ConcavityReport::make_vacuous("first factor is not unimodal: " + uni.reason);
  if (!a1.contains(0.0) || !b.contains({0.0, 0.0}))
    return ConcavityReport::make_vacuous("0 is not in A ∩ B");

  const auto& policy = ev.policy();
  const double mu_a = measure_1d(*mu1, a1, policy) * *mass2;
  const double mu_b = measure_polygon(ev, b).value;
  if (!(mu_a * mu_b > 0.0)) return ConcavityReport::make_vacuous("mu(A) mu(B) = 0");

  const auto px = project_axis(b, Axis::x);
  const IntervalUnion proj = IntervalUnion::single(px.lo, px.hi);
  DeficitTracker tracker;
  for (double l : lambdas) {
    if (!(l >= 0.0 && l <= 1.0)) throw DomainError("lambda grid values must lie in [0, 1]");
    // The slab identity holds for lambda < 1; at lambda = 1 the combination is B.
    const double lhs = evaluate_at(l, [&] {
      return l == 1.0 ? mu_b : measure_1d(*mu1, mink_combine_1d(a1, proj, l), policy) * *mass2;
    });
    tracker.add(lhs, (1.0 - l) * mu_a + l * mu_b, {{"lambda", l}, {"mu_A", mu_a}, {"mu_B", mu_b}});
  }
  return tracker.finish(tol);
}

double match_max_section_scale(const MeasureEvaluator& ev, const ConvexPolygon& a,
                               const ConvexPolygon& b, const DirectionUnit& u, double rel_tol) {
  if (!b.contains({0.0, 0.0}, -1e-12)) throw DomainError("0 must be interior to B");
  const double target = max_section(ev, a, u).value;
  auto m = [&](double c) { return max_section(ev, dilate(b, c), u).value; };
  double lo = 1.0;
  double hi = 1.0;
  double m_lo = m(lo);
  double m_hi = m_lo;
  for (int i = 0; i < 60 && m_lo > target; ++i) {
    lo *= 0.5;
    m_lo = m(lo);
  }
  for (int i = 0; i < 60 && m_hi < target; ++i) {
    hi *= 2.0;
    m_hi = m(hi);
  }
  if (!(m_lo <= target && target <= m_hi)) throw DomainError("cannot bracket the matching scale");
  double c = std::sqrt(lo * hi);
  for (int it = 0; it < 200; ++it) {
    c = std::sqrt(lo * hi);
    const double v = m(c);
    if (std::abs(v - target) <= rel_tol * target) break;
    if (v < target) lo = c;
    else hi = c;
    if (hi / lo - 1.0 < 1e-15) break;
  }
  return c;
}

ConcavityReport check_bonnesen_sections(const MeasureEvaluator& ev, const ConvexPolygon& a,
                                        const ConvexPolygon& b, const DirectionUnit& u,
                                        std::span<const double> lambdas, const BonnesenOptions& opts) {
  if (ev.dimension() != 2) throw DomainError("check_bonnesen_sections needs a two-dimensional density");
  const DensityND d = ev.as_nd();
  if (!(d.gamma_class() >= -1.0))
    return ConcavityReport::make_vacuous("density is not declared (-1)-concave");

  // Spot check of the declared class on the bounding box of A ∪ B.
  const auto ax = project_axis(a, Axis::x);
  const auto ay = project_axis(a, Axis::y);
  const auto bx = project_axis(b, Axis::x);
  const auto by = project_axis(b, Axis::y);
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> ux(std::min(ax.lo, bx.lo), std::max(ax.hi, bx.hi));
  std::uniform_real_distribution<double> uy(std::min(ay.lo, by.lo), std::max(ay.hi, by.hi));
  std::uniform_real_distribution<double> ul(0.0, 1.0);
  std::vector<GammaTripleND> triples;
  triples.reserve(opts.spot_samples);
  for (std::size_t i = 0; i < opts.spot_samples; ++i) {
    GammaTripleND t;
    t.x = {ux(rng), uy(rng)};
    t.y = {ux(rng), uy(rng)};
    t.lambda = ul(rng);
    triples.push_back(std::move(t));
  }
  const auto spot = check_gamma_concavity(d, -1.0, triples);
  if (spot.violated()) {
    auto r = ConcavityReport::make_vacuous("density failed the (-1)-concavity spot check");
    r.witness = spot.witness;
    return r;
  }

  const double ma = max_section(ev, a, u).value;
  const double mb = max_section(ev, b, u).value;
  const double gap = std::abs(ma - mb) / std::max({ma, mb, 1e-300});
  if (gap > opts.section_rel_tol) {
    auto r = ConcavityReport::make_vacuous("maximal sections differ");
    r.witness = {{"section_gap", gap}, {"m_A", ma}, {"m_B", mb}};
    return r;
  }
  ConcavityReport r = check_bm(ev, a, b, 1.0, lambdas, opts.bm);
  r.witness["section_gap"] = gap;
  return r;
}

}  // namespace bmlab
