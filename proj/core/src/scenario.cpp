#include "bmlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bmlab/counterexamples.hpp"
#include "bmlab/errors.hpp"
#include "bmlab/means.hpp"
#include "bmlab/workers.hpp"

namespace bmlab {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("field '" + path + "': " + what);
}

std::string sub(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& need(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(sub(path, key), "missing");
  return *it;
}

const json* maybe(const json& j, const std::string& key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double num(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

double num_or(const json& j, const std::string& key, const std::string& path, double fallback) {
  const json* v = maybe(j, key);
  return v ? num(*v, sub(path, key)) : fallback;
}

std::size_t count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) fail(path, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

std::string str(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

bool flag(const json& j, const std::string& key, const std::string& path, bool fallback) {
  const json* v = maybe(j, key);
  if (!v) return fallback;
  if (!v->is_boolean()) fail(sub(path, key), "expected a boolean");
  return v->get<bool>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(num(j[i], idx(path, i)));
  return out;
}

Interval pair(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(path, "expected [lo, hi]");
  return {parse_extended(j[0], idx(path, 0)), parse_extended(j[1], idx(path, 1))};
}

Vec2 point(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(path, "expected [x, y]");
  return {num(j[0], idx(path, 0)), num(j[1], idx(path, 1))};
}

// Wraps module DomainErrors raised while building an object from a descriptor.
template <class Fn>
auto build(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const DomainError& e) {
    fail(path, e.what());
  }
}

IntervalUnion parse_intervals(const json& j, const std::string& path, bool allow_full_line) {
  const std::string kind = str(need(j, "kind", path), sub(path, "kind"));
  if (kind == "full-line") {
    if (!allow_full_line) fail(path, "full-line is only allowed as a product factor");
    return IntervalUnion::full_line();
  }
  if (kind != "intervals") fail(sub(path, "kind"), "expected 'intervals' or 'full-line'");
  const json& list = need(j, "intervals", path);
  if (!list.is_array()) fail(sub(path, "intervals"), "expected an array");
  std::vector<Interval> pieces;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const Interval p = pair(list[i], idx(sub(path, "intervals"), i));
    if (!std::isfinite(p.lo) || !std::isfinite(p.hi)) fail(idx(sub(path, "intervals"), i), "endpoints must be finite");
    pieces.push_back(p);
  }
  return build(path, [&] { return IntervalUnion(pieces); });
}

DensityND require_nd(const Density& d, std::size_t n, const std::string& path) {
  if (const auto* nd = std::get_if<DensityND>(&d)) {
    if (nd->dimension() != n) fail(path, "expected a " + std::to_string(n) + "-dimensional density");
    return *nd;
  }
  if (n == 1) return DensityND::product({std::get<Density1D>(d)});
  fail(path, "expected a " + std::to_string(n) + "-dimensional density");
}

ConvexPolygon require_polygon(const SetRep& s, const std::string& path) {
  if (const auto* p = std::get_if<ConvexPolygon>(&s)) return *p;
  // Bounded planar boxes are accepted as rectangles.
  if (const auto* b = std::get_if<ProductSet>(&s); b && b->dimension() == 2) {
    const auto& fx = b->factor(0);
    const auto& fy = b->factor(1);
    if (!fx.is_full_line() && !fy.is_full_line() && fx.pieces().size() == 1 && fy.pieces().size() == 1) {
      const auto x = fx.pieces()[0];
      const auto y = fy.pieces()[0];
      if (x.lo < x.hi && y.lo < y.hi) return ConvexPolygon::box(x.lo, x.hi, y.lo, y.hi);
    }
  }
  fail(path, "expected a polygon");
}

IntervalUnion require_intervals(const SetRep& s, const std::string& path) {
  if (const auto* p = std::get_if<IntervalUnion>(&s)) return *p;
  fail(path, "expected an interval union");
}

void require_sets(const ScenarioConfig& cfg, std::size_t n) {
  if (cfg.sets.size() != n) fail("sets", "expected " + std::to_string(n) + " set descriptor(s)");
}

const Density& require_measure(const ScenarioConfig& cfg) {
  if (!cfg.measure) fail("measure", "missing");
  return *cfg.measure;
}

double require_s(const ScenarioConfig& cfg) {
  if (!cfg.s) fail("s", "missing");
  return *cfg.s;
}

std::vector<double> require_t_grid(const ScenarioConfig& cfg) {
  if (cfg.t_grid.empty()) fail("t_grid", "missing or empty");
  return cfg.t_grid;
}

std::vector<double> lambdas_for(const ScenarioConfig& cfg, double fallback) {
  if (const json* l = maybe(cfg.raw, "lambda")) return {num(*l, "lambda")};
  if (maybe(cfg.raw, "lambda_grid")) return cfg.lambda_grid;
  return {fallback};
}

DirectionUnit direction(const json& raw) {
  const json* d = maybe(raw, "direction");
  if (!d) return DirectionUnit::e1();
  const Vec2 v = point(*d, "direction");
  return build("direction", [&] { return DirectionUnit::from_vector(v); });
}

// Among per-lambda reports: the first vacuous one, else the smallest margin
// deficit + tolerance.
ConcavityReport worst_of(const std::vector<ConcavityReport>& reports) {
  std::size_t best = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (reports[i].vacuous()) return reports[i];
    total += reports[i].samples;
    if (reports[i].worst_deficit + reports[i].tolerance < reports[best].worst_deficit + reports[best].tolerance)
      best = i;
  }
  ConcavityReport r = reports[best];
  r.samples = total;
  return r;
}

json sets_json(const ScenarioConfig& cfg) {
  json a = json::array();
  for (const auto& s : cfg.sets) a.push_back(describe(s));
  return a;
}

std::string density_name(const Density& d) {
  return std::visit([](const auto& x) { return x.name(); }, d);
}

std::vector<double> sample_values(std::span<const double> ts, const std::function<double(double)>& f) {
  std::vector<double> out(ts.size());
  parallel_for(ts.size(), [&](std::size_t i) { out[i] = f(ts[i]); });
  return out;
}

void format_number(std::ostringstream& os, double v) {
  if (std::isnan(v)) {
    os << "null";
  } else if (std::isinf(v)) {
    os << (v > 0 ? "\"inf\"" : "\"-inf\"");
  } else {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  }
}

void emit(std::ostringstream& os, const json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << json(it.key()).dump() << ": ";
        emit(os, it.value(), indent + 2);
      }
      os << "\n" << close << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        emit(os, j[i], indent + 2);
      }
      os << "\n" << close << "]";
      return;
    }
    case json::value_t::number_float: format_number(os, j.get<double>()); return;
    default: os << j.dump(); return;
  }
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// ---------------------------------------------------------------------------
// Command runners.

ScenarioResult run_check_bm(const ScenarioConfig& cfg) {
  require_sets(cfg, 2);
  const MeasureEvaluator ev(require_measure(cfg), cfg.policy);
  BmOptions opts;
  opts.tol = cfg.tolerance;
  opts.refine_lambda = flag(cfg.raw, "refine_lambda", "", true);
  const auto r = check_bm(ev, cfg.sets[0], cfg.sets[1], require_s(cfg), cfg.lambda_grid, opts);
  ScenarioResult out;
  out.document["report"] = report_to_json(r);
  out.exit_code = exit_code_for(r);
  return out;
}

ScenarioResult run_curve(const ScenarioConfig& cfg, bool b_property) {
  require_sets(cfg, 1);
  const MeasureEvaluator ev(require_measure(cfg), cfg.policy);
  const auto ts = require_t_grid(cfg);
  const SetRep& a = cfg.sets[0];
  ScenarioResult out;
  ConcavityReport r;
  if (!contains_origin(a)) {
    r = ConcavityReport::make_vacuous("0 is not in A");
  } else {
    const double p = b_property ? 0.0 : parse_extended(need(cfg.raw, "p", ""), "p");
    if (!b_property)
      for (double t : ts)
        if (!(t > 0.0)) fail("t_grid", "dilate grid must be positive");
    const auto fs = sample_values(ts, [&](double t) { return ev.measure(dilate(a, b_property ? std::exp(t) : t)); });
    r = check_curve_power_concavity(ts, fs, p, cfg.tolerance);
    out.csv = curve_csv(ts, fs, "measure");
  }
  out.document["report"] = report_to_json(r);
  out.exit_code = exit_code_for(r);
  return out;
}

ScenarioResult run_prop_equiv(const ScenarioConfig& cfg) {
  require_sets(cfg, 1);
  const MeasureEvaluator ev(require_measure(cfg), cfg.policy);
  EquivPipelineOptions opts;
  opts.tol = cfg.tolerance;
  opts.seed = cfg.seed;
  if (const json* g = maybe(cfg.raw, "b_grid")) opts.b_ts = parse_grid(*g, "b_grid");
  if (const json* g = maybe(cfg.raw, "dilate_grid")) opts.dilate_ts = parse_grid(*g, "dilate_grid");
  if (const json* g = maybe(cfg.raw, "radial_grid")) opts.radial_ts = parse_grid(*g, "radial_grid");
  if (const json* c = maybe(cfg.raw, "rays")) opts.ray_count = count(*c, "rays");
  const auto rep = prop_equiv_pipeline(ev, cfg.sets[0], opts);
  ScenarioResult out;
  json radial{{"ok", rep.radial_monotone}};
  if (!rep.radial.ok) {
    radial["ray"] = rep.radial.ray;
    radial["t"] = rep.radial.t;
  }
  out.document["radial"] = radial;
  out.document["b_property"] = report_to_json(rep.b_property);
  out.document["dilates"] = report_to_json(rep.dilates);
  out.document["implication_applies"] = rep.implication_applies;
  out.document["contradiction"] = rep.contradiction;
  out.document["note"] = rep.note;
  out.exit_code = rep.contradiction ? 1 : 0;
  return out;
}

ScenarioResult run_prop_concave(const ScenarioConfig& cfg) {
  require_sets(cfg, 2);
  const MeasureEvaluator ev(require_measure(cfg), cfg.policy);
  BmOptions opts;
  opts.tol = cfg.tolerance;
  const auto r = check_prop_concave(ev, require_intervals(cfg.sets[0], "sets[0]"),
                                    require_intervals(cfg.sets[1], "sets[1]"), cfg.lambda_grid, opts);
  ScenarioResult out;
  out.document["report"] = report_to_json(r);
  out.exit_code = exit_code_for(r);
  return out;
}

ScenarioResult run_slab(const ScenarioConfig& cfg) {
  require_sets(cfg, 2);
  const MeasureEvaluator ev(require_measure(cfg), cfg.policy);
  IntervalUnion a1;
  if (const auto* iu = std::get_if<IntervalUnion>(&cfg.sets[0])) {
    a1 = *iu;
  } else if (const auto* ps = std::get_if<ProductSet>(&cfg.sets[0])) {
    if (ps->dimension() != 2 || !ps->factor(1).is_full_line()) fail("sets[0]", "expected A1 x R");
    a1 = ps->factor(0);
  } else {
    fail("sets[0]", "expected an interval union or a product A1 x R");
  }
  const auto r = check_slab(ev, a1, require_polygon(cfg.sets[1], "sets[1]"), cfg.lambda_grid, cfg.tolerance);
  ScenarioResult out;
  out.document["report"] = report_to_json(r);
  out.exit_code = exit_code_for(r);
  return out;
}

ScenarioResult run_bonnesen(const ScenarioConfig& cfg) {
  require_sets(cfg, 2);
  const MeasureEvaluator ev(require_measure(cfg), cfg.policy);
  const ConvexPolygon a = require_polygon(cfg.sets[0], "sets[0]");
  ConvexPolygon b = require_polygon(cfg.sets[1], "sets[1]");
  const DirectionUnit u = direction(cfg.raw);
  ScenarioResult out;
  if (flag(cfg.raw, "match_scale", "", true)) {
    const double c = match_max_section_scale(ev, a, b, u);
    b = dilate(b, c);
    out.document["matched_scale"] = c;
  }
  BonnesenOptions opts;
  opts.bm.tol = cfg.tolerance;
  opts.seed = cfg.seed;
  const auto r = check_bonnesen_sections(ev, a, b, u, cfg.lambda_grid, opts);
  out.document["report"] = report_to_json(r);
  out.exit_code = exit_code_for(r);
  return out;
}

ScenarioResult run_hm(const ScenarioConfig& cfg) {
  const auto f = parse_grid_function_1d(need(cfg.raw, "f", ""), "f");
  const auto g = parse_grid_function_1d(need(cfg.raw, "g", ""), "g");
  std::vector<ConcavityReport> reports;
  for (double l : lambdas_for(cfg, 0.5)) reports.push_back(check_henstock_macbeath(f, g, l, cfg.tolerance));
  const auto r = worst_of(reports);
  ScenarioResult out;
  out.document["report"] = report_to_json(r);
  out.exit_code = exit_code_for(r);
  return out;
}

ScenarioResult run_dancs_uhrin(const ScenarioConfig& cfg) {
  const auto f = parse_grid_function_2d(need(cfg.raw, "f", ""), "f");
  const auto g = parse_grid_function_2d(need(cfg.raw, "g", ""), "g");
  const double gamma = maybe(cfg.raw, "gamma") ? parse_extended(cfg.raw["gamma"], "gamma") : -1.0;
  const DirectionUnit u = direction(cfg.raw);
  std::vector<ConcavityReport> reports;
  for (double l : lambdas_for(cfg, 0.5)) reports.push_back(check_dancs_uhrin(f, g, u, l, gamma, cfg.tolerance));
  const auto r = worst_of(reports);
  ScenarioResult out;
  out.document["report"] = report_to_json(r);
  out.exit_code = exit_code_for(r);
  return out;
}

ScenarioResult run_counterexample_power(const ScenarioConfig& cfg) {
  const double s = require_s(cfg);
  const double r = num(need(cfg.raw, "r", ""), "r");
  const double b = num(need(cfg.raw, "b", ""), "b");
  const double lambda = num_or(cfg.raw, "lambda", "", 0.5);
  PowerFamilyInstance inst{s, r, 0.0, b};
  if (const json* a = maybe(cfg.raw, "a")) {
    inst.a = num(*a, "a");
  } else {
    inst.a = build("", [&] { return power_family_search(s, r, b); }).a;
  }
  const double d = build("", [&] { return power_family_deficit(inst, lambda); });
  const double mu_a = power_mass(s, inst.a);
  const double mu_b = power_mass(s, b);
  DeficitTracker t;
  t.add(power_mass(s, (1.0 - lambda) * inst.a + lambda * b), s_mean(mu_a, mu_b, {r, lambda}),
        {{"a", inst.a}, {"b", b}, {"lambda", lambda}, {"mu_A", mu_a}, {"mu_B", mu_b}, {"r", r}, {"s", s}});
  ConcavityReport rep = t.finish(CheckTolerance{1e-12, 0.0});
  rep.worst_deficit = d;
  if (rep.violated()) rep.certified = true;
  ScenarioResult out;
  out.document["report"] = report_to_json(rep);
  out.document["limit_a_to_0"] = power_family_limit(s, b);
  out.exit_code = exit_code_for(rep);
  return out;
}

DensityND search_measure(const json& j) {
  if (j.is_string()) {
    const std::string m = j.get<std::string>();
    if (m == "gaussian") return DensityND::gaussian_standard(2);
    if (m == "exp-product" || m == "exponential-product") return DensityND::exponential_product(2, true);
    if (m == "lebesgue") return DensityND::lebesgue(2);
    fail("measure", "expected gaussian, exp-product or lebesgue");
  }
  return require_nd(parse_density(j, "measure"), 2, "measure");
}

ScenarioResult run_counterexample_search(const ScenarioConfig& cfg) {
  SearchFamily fam;
  fam.family = build("family", [&] { return parse_search_family(str(need(cfg.raw, "family", ""), "family")); });
  fam.measure = search_measure(need(cfg.raw, "measure", ""));
  fam.s = require_s(cfg);
  fam.seed = cfg.seed;
  const std::size_t budget = maybe(cfg.raw, "budget") ? count(cfg.raw["budget"], "budget") : 20000;
  if (budget == 0) fail("budget", "must be positive");
  SearchOptions opts;
  if (const json* r = maybe(cfg.raw, "restarts")) opts.restarts = count(*r, "restarts");
  const auto res = violation_search(fam, budget, opts);
  ScenarioResult out;
  out.document["report"] = report_to_json(res.report);
  out.document["full_scan"] = report_to_json(res.full_scan);
  out.document["family"] = to_string(fam.family);
  out.document["params"] = res.params;
  out.document["evaluations"] = res.evaluations;
  out.document["A"] = describe(res.sets.a);
  out.document["B"] = describe(res.sets.b);
  out.exit_code = 0;
  return out;
}

ScenarioResult run_parallel(const ScenarioConfig& cfg) {
  require_sets(cfg, 2);
  const MeasureEvaluator ev(require_measure(cfg), cfg.policy);
  const auto ts = require_t_grid(cfg);
  const double s = require_s(cfg);
  const auto curve = build("sets", [&] { return parallel_curve(ev, cfg.sets[0], cfg.sets[1], ts); });
  const auto r = check_parallel_concavity(curve, s, cfg.tolerance);
  ScenarioResult out;
  out.document["report"] = report_to_json(r);
  out.document["nondecreasing"] = is_nondecreasing(curve);
  out.csv = parallel_csv(curve, s);
  out.exit_code = exit_code_for(r);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

double parse_extended(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  fail(path, "expected a number, \"inf\" or \"-inf\"");
}

std::vector<double> parse_grid_spec(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("grid spec '" + spec + "': expected a:b:step");
    }
  }
  if (parts.size() != 3) throw ConfigError("grid spec '" + spec + "': expected a:b:step");
  try {
    return make_grid(parts[0], parts[1], parts[2]);
  } catch (const DomainError& e) {
    throw ConfigError("grid spec '" + spec + "': " + e.what());
  }
}

std::vector<double> parse_grid(const json& j, const std::string& path) {
  std::vector<double> g;
  if (j.is_string()) {
    try {
      g = parse_grid_spec(j.get<std::string>());
    } catch (const ConfigError& e) {
      fail(path, e.what());
    }
  } else {
    g = numbers(j, path);
  }
  if (g.empty()) fail(path, "grid is empty");
  return g;
}

Density1D parse_density_1d(const json& j, const std::string& path) {
  const auto d = parse_density(j, path);
  if (const auto* one = std::get_if<Density1D>(&d)) return *one;
  fail(path, "expected a one-dimensional density");
}

Density parse_density(const json& j, const std::string& path) {
  const std::string kind = str(need(j, "kind", path), sub(path, "kind"));
  return build(path, [&]() -> Density {
    if (kind == "gaussian")
      return Density1D::gaussian(num_or(j, "sigma", path, 1.0), num_or(j, "mean", path, 0.0));
    if (kind == "two-sided-exponential")
      return Density1D::two_sided_exponential(num_or(j, "rate", path, 1.0), flag(j, "normalize", path, false));
    if (kind == "power-plus") {
      if (const json* s = maybe(j, "s")) return Density1D::power_plus(borell_s_to_gamma(num(*s, sub(path, "s")), 1));
      return Density1D::power_plus(parse_extended(need(j, "gamma", path), sub(path, "gamma")));
    }
    if (kind == "uniform") {
      const Interval i = pair(need(j, "interval", path), sub(path, "interval"));
      return Density1D::uniform(i.lo, i.hi);
    }
    if (kind == "tabulated") {
      std::optional<double> mode;
      if (const json* m = maybe(j, "mode")) mode = num(*m, sub(path, "mode"));
      const double gamma = maybe(j, "gamma") ? parse_extended(j["gamma"], sub(path, "gamma")) : -kInf;
      return Density1D::tabulated(numbers(need(j, "grid", path), sub(path, "grid")),
                                  numbers(need(j, "values", path), sub(path, "values")), mode, gamma);
    }
    if (kind == "lebesgue") {
      const std::size_t n = maybe(j, "dimension") ? count(j["dimension"], sub(path, "dimension")) : 1;
      if (n == 1) return Density1D::lebesgue();
      return DensityND::lebesgue(n);
    }
    if (kind == "product") {
      const json& fs = need(j, "factors", path);
      if (!fs.is_array()) fail(sub(path, "factors"), "expected an array");
      std::vector<Density1D> factors;
      for (std::size_t i = 0; i < fs.size(); ++i)
        factors.push_back(parse_density_1d(fs[i], idx(sub(path, "factors"), i)));
      return DensityND::product(std::move(factors));
    }
    if (kind == "gaussian-standard")
      return DensityND::gaussian_standard(count(need(j, "dimension", path), sub(path, "dimension")));
    if (kind == "exponential-product")
      return DensityND::exponential_product(count(need(j, "dimension", path), sub(path, "dimension")),
                                            flag(j, "normalize", path, false));
    if (kind == "custom-2d") {
      const std::string name = str(need(j, "name", path), sub(path, "name"));
      if (name == "inverse-quadratic") return DensityND::inverse_quadratic();
      fail(sub(path, "name"), "unknown custom density '" + name + "'");
    }
    fail(sub(path, "kind"), "unknown density kind '" + kind + "'");
  });
}

SetRep parse_set(const json& j, const std::string& path) {
  const std::string kind = str(need(j, "kind", path), sub(path, "kind"));
  if (kind == "intervals" || kind == "full-line") return parse_intervals(j, path, false);
  if (kind == "product") {
    const json& fs = need(j, "factors", path);
    if (!fs.is_array() || fs.empty()) fail(sub(path, "factors"), "expected a non-empty array");
    std::vector<IntervalUnion> factors;
    for (std::size_t i = 0; i < fs.size(); ++i) factors.push_back(parse_intervals(fs[i], idx(sub(path, "factors"), i), true));
    return build(path, [&] { return ProductSet(std::move(factors)); });
  }
  if (kind == "box") {
    const json& sides = need(j, "sides", path);
    if (!sides.is_array() || sides.empty()) fail(sub(path, "sides"), "expected a non-empty array");
    std::vector<Interval> iv;
    for (std::size_t i = 0; i < sides.size(); ++i) iv.push_back(pair(sides[i], idx(sub(path, "sides"), i)));
    return build(path, [&] { return ProductSet::box(iv); });
  }
  if (kind == "polygon") {
    const json& vs = need(j, "vertices", path);
    if (!vs.is_array()) fail(sub(path, "vertices"), "expected an array");
    std::vector<Vec2> pts;
    for (std::size_t i = 0; i < vs.size(); ++i) pts.push_back(point(vs[i], idx(sub(path, "vertices"), i)));
    if (flag(j, "hull", path, false)) return build(path, [&] { return ConvexPolygon::hull(pts); });
    return build(path, [&] { return ConvexPolygon(pts); });
  }
  if (kind == "regular-polygon" || kind == "disk") {
    const std::size_t n = maybe(j, "n") ? count(j["n"], sub(path, "n")) : 64;
    Vec2 center{};
    if (const json* c = maybe(j, "center")) center = point(*c, sub(path, "center"));
    return build(path, [&] {
      return ConvexPolygon::regular(n, num_or(j, "radius", path, 1.0), center, num_or(j, "phase", path, 0.0));
    });
  }
  fail(sub(path, "kind"), "unknown set kind '" + kind + "'");
}

QuadraturePolicy parse_policy(const json& j, const std::string& path, QuadraturePolicy base) {
  if (!j.is_object()) fail(path, "expected an object");
  base.abs_tol = num_or(j, "abs_tol", path, base.abs_tol);
  base.rel_tol = num_or(j, "rel_tol", path, base.rel_tol);
  if (const json* d = maybe(j, "max_depth")) base.max_depth = static_cast<int>(count(*d, sub(path, "max_depth")));
  if (const json* g = maybe(j, "section_grid"))
    base.section_grid = static_cast<int>(count(*g, sub(path, "section_grid")));
  build(path, [&] {
    base.validate();
    return 0;
  });
  return base;
}

GridFunction1D parse_grid_function_1d(const json& j, const std::string& path) {
  if (maybe(j, "values")) {
    GridFunction1D f{num(need(j, "x0", path), sub(path, "x0")), num(need(j, "step", path), sub(path, "step")),
                     numbers(j["values"], sub(path, "values"))};
    return f;
  }
  const double lo = num(need(j, "lo", path), sub(path, "lo"));
  const double hi = num(need(j, "hi", path), sub(path, "hi"));
  const std::size_t n = count(need(j, "n", path), sub(path, "n"));
  if (n < 2 || !(hi > lo)) fail(path, "sampled grid needs n >= 2 and hi > lo");
  const Density1D d = parse_density_1d(need(j, "density", path), sub(path, "density"));
  std::optional<IntervalUnion> set;
  if (const json* s = maybe(j, "set")) set = parse_intervals(*s, sub(path, "set"), true);
  const double scale = num_or(j, "scale", path, 1.0);
  GridFunction1D f{lo, (hi - lo) / static_cast<double>(n - 1), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double x = f.x(i);
    f.values[i] = (set && !set->contains(x)) ? 0.0 : scale * build(path, [&] { return d(x); });
  }
  return f;
}

GridFunction2D parse_grid_function_2d(const json& j, const std::string& path) {
  if (maybe(j, "values")) {
    GridFunction2D f;
    f.x0 = num(need(j, "x0", path), sub(path, "x0"));
    f.y0 = num(need(j, "y0", path), sub(path, "y0"));
    f.dx = num(need(j, "dx", path), sub(path, "dx"));
    f.dy = num(need(j, "dy", path), sub(path, "dy"));
    f.nx = count(need(j, "nx", path), sub(path, "nx"));
    f.ny = count(need(j, "ny", path), sub(path, "ny"));
    f.values = numbers(j["values"], sub(path, "values"));
    if (f.values.size() != f.nx * f.ny) fail(sub(path, "values"), "expected nx * ny values");
    return f;
  }
  auto axis = [&](const std::string& key) {
    const json& a = need(j, key, path);
    const double lo = num(need(a, "lo", sub(path, key)), sub(sub(path, key), "lo"));
    const double hi = num(need(a, "hi", sub(path, key)), sub(sub(path, key), "hi"));
    const std::size_t n = count(need(a, "n", sub(path, key)), sub(sub(path, key), "n"));
    if (n < 2 || !(hi > lo)) fail(sub(path, key), "needs n >= 2 and hi > lo");
    return std::tuple{lo, hi, n};
  };
  const auto [xlo, xhi, nx] = axis("x");
  const auto [ylo, yhi, ny] = axis("y");
  const DensityND d = require_nd(parse_density(need(j, "density", path), sub(path, "density")), 2, sub(path, "density"));
  std::optional<SetRep> set;
  if (const json* s = maybe(j, "set")) set = parse_set(*s, sub(path, "set"));
  const double scale = num_or(j, "scale", path, 1.0);
  GridFunction2D f{xlo, ylo, (xhi - xlo) / static_cast<double>(nx - 1), (yhi - ylo) / static_cast<double>(ny - 1),
                   nx, ny, std::vector<double>(nx * ny)};
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double x = f.x0 + f.dx * static_cast<double>(ix);
      const double y = f.y0 + f.dy * static_cast<double>(iy);
      bool inside = true;
      if (set) {
        if (const auto* p = std::get_if<ConvexPolygon>(&*set)) {
          inside = p->contains({x, y}, 1e-12);
        } else if (const auto* ps = std::get_if<ProductSet>(&*set)) {
          inside = ps->dimension() == 2 && ps->factor(0).contains(x) && ps->factor(1).contains(y);
        } else {
          fail(sub(path, "set"), "expected a planar set");
        }
      }
      f.values[iy * nx + ix] = inside ? scale * d(x, y) : 0.0;
    }
  }
  return f;
}

const char* to_string(Command c) {
  switch (c) {
    case Command::check_bm: return "check-bm";
    case Command::scan_dilates: return "scan-dilates";
    case Command::b_property: return "b-property";
    case Command::prop_equiv: return "prop-equiv";
    case Command::prop_concave: return "prop-concave";
    case Command::slab: return "slab";
    case Command::bonnesen: return "bonnesen";
    case Command::hm: return "hm";
    case Command::dancs_uhrin: return "dancs-uhrin";
    case Command::counterexample_power: return "counterexample-power";
    case Command::counterexample_search: return "counterexample-search";
    case Command::parallel: return "parallel";
  }
  return "unknown";
}

Command parse_command(const std::string& name) {
  for (Command c : {Command::check_bm, Command::scan_dilates, Command::b_property, Command::prop_equiv,
                    Command::prop_concave, Command::slab, Command::bonnesen, Command::hm, Command::dancs_uhrin,
                    Command::counterexample_power, Command::counterexample_search, Command::parallel})
    if (name == to_string(c)) return c;
  throw ConfigError("field 'command': unknown command '" + name + "'");
}

ScenarioConfig parse_scenario(const json& j) {
  if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
  ScenarioConfig cfg;
  cfg.raw = j;
  cfg.command = parse_command(str(need(j, "command", ""), "command"));
  if (const json* n = maybe(j, "name")) cfg.name = str(*n, "name");
  if (const json* m = maybe(j, "measure")) {
    if (!(m->is_string() && cfg.command == Command::counterexample_search)) cfg.measure = parse_density(*m, "measure");
  }
  if (const json* sets = maybe(j, "sets")) {
    if (!sets->is_array()) fail("sets", "expected an array");
    for (std::size_t i = 0; i < sets->size(); ++i) cfg.sets.push_back(parse_set((*sets)[i], idx("sets", i)));
  }
  if (const json* s = maybe(j, "s")) cfg.s = parse_extended(*s, "s");
  if (const json* g = maybe(j, "lambda_grid")) cfg.lambda_grid = parse_grid(*g, "lambda_grid");
  if (const json* g = maybe(j, "t_grid")) cfg.t_grid = parse_grid(*g, "t_grid");
  if (const json* p = maybe(j, "policy")) cfg.policy = parse_policy(*p, "policy");
  if (const json* t = maybe(j, "tolerance")) {
    cfg.tolerance.abs = num_or(*t, "abs", "tolerance", cfg.tolerance.abs);
    cfg.tolerance.rel = num_or(*t, "rel", "tolerance", cfg.tolerance.rel);
  }
  if (const json* s = maybe(j, "seed")) cfg.seed = count(*s, "seed");
  if (const json* o = maybe(j, "output")) cfg.output = str(*o, "output");

  // Command-specific required fields.
  auto require = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys) need(j, k, "");
  };
  switch (cfg.command) {
    case Command::check_bm: require({"measure", "sets", "s"}); break;
    case Command::scan_dilates: require({"measure", "sets", "t_grid", "p"}); break;
    case Command::b_property: require({"measure", "sets", "t_grid"}); break;
    case Command::prop_equiv: require({"measure", "sets"}); break;
    case Command::prop_concave:
    case Command::slab:
    case Command::bonnesen: require({"measure", "sets"}); break;
    case Command::hm:
    case Command::dancs_uhrin: require({"f", "g"}); break;
    case Command::counterexample_power: require({"s", "r", "b"}); break;
    case Command::counterexample_search: require({"measure", "family", "s"}); break;
    case Command::parallel: require({"measure", "sets", "t_grid", "s"}); break;
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read scenario file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError(path.string() + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": malformed JSON: " + e.what());
  }
  try {
    return parse_scenario(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void apply_overrides(ScenarioConfig& cfg, const ScenarioOverrides& o) {
  if (o.abs_tol) cfg.policy.abs_tol = *o.abs_tol;
  if (o.rel_tol) cfg.policy.rel_tol = *o.rel_tol;
  if (o.section_grid) cfg.policy.section_grid = *o.section_grid;
  try {
    cfg.policy.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("policy override: ") + e.what());
  }
  if (o.seed) {
    cfg.seed = *o.seed;
    cfg.raw["seed"] = *o.seed;
  }
  if (o.lambda_grid) {
    cfg.lambda_grid = *o.lambda_grid;
    cfg.raw["lambda_grid"] = *o.lambda_grid;
  }
  if (o.t_grid) {
    cfg.t_grid = *o.t_grid;
    cfg.raw["t_grid"] = *o.t_grid;
  }
}

int exit_code_for(const ConcavityReport& r) { return (r.violated() && !r.exploratory) ? 1 : 0; }

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  ScenarioResult out;
  switch (cfg.command) {
    case Command::check_bm: out = run_check_bm(cfg); break;
    case Command::scan_dilates: out = run_curve(cfg, false); break;
    case Command::b_property: out = run_curve(cfg, true); break;
    case Command::prop_equiv: out = run_prop_equiv(cfg); break;
    case Command::prop_concave: out = run_prop_concave(cfg); break;
    case Command::slab: out = run_slab(cfg); break;
    case Command::bonnesen: out = run_bonnesen(cfg); break;
    case Command::hm: out = run_hm(cfg); break;
    case Command::dancs_uhrin: out = run_dancs_uhrin(cfg); break;
    case Command::counterexample_power: out = run_counterexample_power(cfg); break;
    case Command::counterexample_search: out = run_counterexample_search(cfg); break;
    case Command::parallel: out = run_parallel(cfg); break;
  }
  out.document["scenario"] = cfg.name;
  out.document["command"] = to_string(cfg.command);
  if (cfg.measure) out.document["measure"] = density_name(*cfg.measure);
  if (!cfg.sets.empty()) out.document["sets"] = sets_json(cfg);
  return out;
}

json report_to_json(const ConcavityReport& r) {
  json j;
  j["verdict"] = to_string(r.verdict);
  j["worst_deficit"] = r.worst_deficit;
  j["witness"] = json::object();
  for (const auto& [k, v] : r.witness) j["witness"][k] = v;
  j["samples"] = r.samples;
  j["tolerance"] = r.tolerance;
  j["exploratory"] = r.exploratory;
  if (r.vacuous() || !r.reason.empty()) j["reason"] = r.reason;
  if (r.certified) j["certified"] = *r.certified;
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

std::string canonical_json(const json& j) {
  std::ostringstream os;
  emit(os, j, 0);
  os << "\n";
  return os.str();
}

std::string curve_csv(std::span<const double> ts, std::span<const double> values, const std::string& value_name) {
  std::string out = "t," + value_name + "\n";
  for (std::size_t i = 0; i < ts.size(); ++i) out += csv_number(ts[i]) + "," + csv_number(values[i]) + "\n";
  return out;
}

std::string parallel_csv(const ParallelCurve& curve, double s) {
  std::vector<std::string> cumulative(curve.ts.size());
  if (curve.ts.size() >= 3) {
    double running = kInf;
    for (const auto& d : curve_deficits(curve.ts, curve.values, s)) {
      running = std::min(running, d.deficit);
      cumulative[d.index] = csv_number(running);
    }
    if (!cumulative.empty() && curve.ts.size() >= 3) cumulative.back() = cumulative[curve.ts.size() - 2];
  }
  std::string out = "t,value,cumulative_deficit\n";
  for (std::size_t i = 0; i < curve.ts.size(); ++i)
    out += csv_number(curve.ts[i]) + "," + csv_number(curve.values[i]) + "," + cumulative[i] + "\n";
  return out;
}

void write_outputs(const ScenarioResult& result, const std::filesystem::path& json_path) {
  if (json_path.has_parent_path()) std::filesystem::create_directories(json_path.parent_path());
  auto write = [](const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
    f << text;
    if (!f) throw std::runtime_error("write failed for '" + p.string() + "'");
  };
  write(json_path, canonical_json(result.document));
  if (result.csv) {
    auto csv = json_path;
    csv.replace_extension(".csv");
    write(csv, *result.csv);
  }
}

}  // namespace bmlab
