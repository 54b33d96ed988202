#include "bmlab/measures.hpp"

#include <algorithm>
#include <cmath>
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

constexpr double kUnimodalSlack = 1e-12;
constexpr double kGammaRelSlack = 1e-9;

double eval_tabulated(const Tabulated& t, double x) {
  const auto& g = t.grid;
  if (!(x >= g.front() && x <= g.back())) {
    std::ostringstream os;
    os << "tabulated density queried at " << x << " outside [" << g.front() << ", " << g.back()
       << "]";
    throw DomainError(os.str());
  }
  auto it = std::upper_bound(g.begin(), g.end(), x);
  if (it == g.end()) return t.values.back();
  const auto hi = static_cast<std::size_t>(it - g.begin());
  const std::size_t lo = hi - 1;
  const double w = (x - g[lo]) / (g[hi] - g[lo]);
  return (1.0 - w) * t.values[lo] + w * t.values[hi];
}

std::string fmt_num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

Density1D Density1D::gaussian(double sigma, double mean) {
  if (!(sigma > 0.0)) throw DomainError("gaussian sigma must be positive");
  Density1D d(Gaussian{sigma, mean});
  d.mode_ = mean;
  d.flags_ = {true, true};
  d.gamma_ = 0.0;
  return d;
}

Density1D Density1D::two_sided_exponential(double rate, bool normalize) {
  if (!(rate > 0.0)) throw DomainError("exponential rate must be positive");
  Density1D d(TwoSidedExponential{rate, normalize});
  d.mode_ = 0.0;
  d.flags_ = {true, true};
  d.gamma_ = 0.0;
  return d;
}

Density1D Density1D::power_plus(double gamma) {
  if (!(gamma > 0.0)) throw DomainError("power-plus gamma must be positive");
  Density1D d(PowerPlus{gamma});
  // Increasing on the half-line: no maximizer.
  d.flags_ = {true, false};
  d.gamma_ = gamma;
  return d;
}

Density1D Density1D::uniform(double lo, double hi) {
  if (!(lo < hi)) throw DomainError("uniform interval must satisfy lo < hi");
  Density1D d(Uniform{lo, hi});
  d.mode_ = std::clamp(0.0, lo, hi);
  d.flags_ = {true, true};
  d.gamma_ = kInf;
  return d;
}

Density1D Density1D::lebesgue() {
  Density1D d(Lebesgue{});
  d.mode_ = 0.0;
  d.flags_ = {true, true};
  d.gamma_ = kInf;
  return d;
}

Density1D Density1D::tabulated(std::vector<double> grid, std::vector<double> values,
                               std::optional<double> mode, double gamma) {
  if (grid.size() < 2 || grid.size() != values.size())
    throw DomainError("tabulated density needs >= 2 grid points and matching values");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw DomainError("tabulated grid must be strictly increasing");
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("tabulated values must be finite and >= 0");

  std::size_t mode_idx = 0;
  if (mode) {
    if (*mode < grid.front() || *mode > grid.back())
      throw DomainError("tabulated mode outside the grid");
    mode_idx = static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), *mode) - grid.begin());
  } else {
    mode_idx = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
  }

  MonotoneFlags flags{true, true};
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] <= grid[mode_idx]) {
      if (values[i] < values[i - 1] - kUnimodalSlack) flags.non_decreasing_left = false;
    } else {
      if (values[i] > values[i - 1] + kUnimodalSlack) flags.non_increasing_right = false;
    }
  }

  const double mode_x = mode ? *mode : grid[mode_idx];
  Density1D d(Tabulated{std::move(grid), std::move(values)});
  d.mode_ = mode_x;
  d.flags_ = flags;
  d.gamma_ = gamma;
  return d;
}

double Density1D::operator()(double x) const {
  return std::visit(
      overloaded{
          [x](const Gaussian& g) {
            const double z = (x - g.mean) / g.sigma;
            return std::exp(-0.5 * z * z) / (g.sigma * std::sqrt(2.0 * std::numbers::pi));
          },
          [x](const TwoSidedExponential& e) {
            const double v = std::exp(-e.rate * std::abs(x));
            return e.normalize ? 0.5 * e.rate * v : v;
          },
          [x](const PowerPlus& p) { return x >= 0.0 ? std::pow(x, 1.0 / p.gamma) : 0.0; },
          [x](const Uniform& u) { return (x >= u.lo && x <= u.hi) ? 1.0 : 0.0; },
          [](const Lebesgue&) { return 1.0; },
          [x](const Tabulated& t) { return eval_tabulated(t, x); },
      },
      kind_);
}

std::optional<double> Density1D::total_mass() const {
  return std::visit(
      overloaded{
          [](const Gaussian&) -> std::optional<double> { return 1.0; },
          [](const TwoSidedExponential& e) -> std::optional<double> {
            return e.normalize ? 1.0 : 2.0 / e.rate;
          },
          [](const PowerPlus&) -> std::optional<double> { return std::nullopt; },
          [](const Uniform& u) -> std::optional<double> { return u.hi - u.lo; },
          [](const Lebesgue&) -> std::optional<double> { return std::nullopt; },
          [](const Tabulated& t) -> std::optional<double> {
            // Exact for the piecewise-linear interpolant.
            double m = 0.0;
            for (std::size_t i = 1; i < t.grid.size(); ++i)
              m += 0.5 * (t.values[i] + t.values[i - 1]) * (t.grid[i] - t.grid[i - 1]);
            return m;
          },
      },
      kind_);
}

std::vector<double> Density1D::breakpoints() const {
  return std::visit(overloaded{
                        [](const Gaussian&) { return std::vector<double>{}; },
                        [](const TwoSidedExponential&) { return std::vector<double>{0.0}; },
                        [](const PowerPlus&) { return std::vector<double>{0.0}; },
                        [](const Uniform& u) { return std::vector<double>{u.lo, u.hi}; },
                        [](const Lebesgue&) { return std::vector<double>{}; },
                        [](const Tabulated& t) { return t.grid; },
                    },
                    kind_);
}

std::pair<double, double> Density1D::support() const {
  return std::visit(overloaded{
                        [](const PowerPlus&) { return std::pair{0.0, kInf}; },
                        [](const Uniform& u) { return std::pair{u.lo, u.hi}; },
                        [](const Tabulated& t) { return std::pair{t.grid.front(), t.grid.back()}; },
                        [](const auto&) { return std::pair{-kInf, kInf}; },
                    },
                    kind_);
}

std::string Density1D::name() const {
  return std::visit(
      overloaded{
          [](const Gaussian& g) { return "gaussian(sigma=" + fmt_num(g.sigma) + ",mean=" + fmt_num(g.mean) + ")"; },
          [](const TwoSidedExponential& e) {
            return std::string("two-sided-exponential(rate=") + fmt_num(e.rate) +
                   (e.normalize ? ",normalized)" : ")");
          },
          [](const PowerPlus& p) { return "power-plus(gamma=" + fmt_num(p.gamma) + ")"; },
          [](const Uniform& u) { return "uniform[" + fmt_num(u.lo) + "," + fmt_num(u.hi) + "]"; },
          [](const Lebesgue&) { return std::string("lebesgue"); },
          [](const Tabulated& t) { return "tabulated(" + std::to_string(t.grid.size()) + ")"; },
      },
      kind_);
}

// ---------------------------------------------------------------------------

DensityND DensityND::product(std::vector<Density1D> factors) {
  if (factors.empty()) throw DomainError("product density needs at least one factor");
  return DensityND(ProductDensity{std::move(factors)});
}

DensityND DensityND::gaussian_standard(std::size_t n) {
  if (n == 0) throw DomainError("dimension must be >= 1");
  return DensityND(GaussianStandard{n});
}

DensityND DensityND::exponential_product(std::size_t n, bool normalize) {
  if (n == 0) throw DomainError("dimension must be >= 1");
  return DensityND(ExponentialProduct{n, normalize});
}

DensityND DensityND::custom_2d(std::string name, std::function<double(double, double)> fn,
                               double gamma, bool unconditional) {
  if (!fn) throw DomainError("custom density needs a function");
  return DensityND(Custom2D{std::move(name), std::move(fn), gamma, unconditional});
}

DensityND DensityND::lebesgue(std::size_t n) {
  if (n == 0) throw DomainError("dimension must be >= 1");
  return product(std::vector<Density1D>(n, Density1D::lebesgue()));
}

DensityND DensityND::inverse_quadratic() {
  return custom_2d(
      "inverse-quadratic", [](double x, double y) { return 1.0 / (1.0 + x * x + y * y); }, -1.0,
      true);
}

std::size_t DensityND::dimension() const {
  return std::visit(overloaded{
                        [](const ProductDensity& p) { return p.factors.size(); },
                        [](const GaussianStandard& g) { return g.dimension; },
                        [](const ExponentialProduct& e) { return e.dimension; },
                        [](const Custom2D&) { return std::size_t{2}; },
                    },
                    kind_);
}

double DensityND::operator()(std::span<const double> x) const {
  if (x.size() != dimension()) throw DomainError("point dimension does not match density");
  return std::visit(
      overloaded{
          [&](const ProductDensity& p) {
            double v = 1.0;
            for (std::size_t i = 0; i < x.size(); ++i) v *= p.factors[i](x[i]);
            return v;
          },
          [&](const GaussianStandard& g) {
            double r2 = 0.0;
            for (double xi : x) r2 += xi * xi;
            return std::exp(-0.5 * r2) *
                   std::pow(2.0 * std::numbers::pi, -0.5 * static_cast<double>(g.dimension));
          },
          [&](const ExponentialProduct& e) {
            double l1 = 0.0;
            for (double xi : x) l1 += std::abs(xi);
            const double v = std::exp(-l1);
            return e.normalize ? v * std::pow(0.5, static_cast<double>(e.dimension)) : v;
          },
          [&](const Custom2D& c) { return c.fn(x[0], x[1]); },
      },
      kind_);
}

double DensityND::operator()(double x, double y) const {
  const double p[2] = {x, y};
  return (*this)(std::span<const double>(p, 2));
}

std::optional<std::vector<Density1D>> DensityND::factors() const {
  return std::visit(
      overloaded{
          [](const ProductDensity& p) -> std::optional<std::vector<Density1D>> { return p.factors; },
          [](const GaussianStandard& g) -> std::optional<std::vector<Density1D>> {
            return std::vector<Density1D>(g.dimension, Density1D::gaussian(1.0));
          },
          [](const ExponentialProduct& e) -> std::optional<std::vector<Density1D>> {
            return std::vector<Density1D>(e.dimension,
                                          Density1D::two_sided_exponential(1.0, e.normalize));
          },
          [](const Custom2D&) -> std::optional<std::vector<Density1D>> { return std::nullopt; },
      },
      kind_);
}

double DensityND::gamma_class() const {
  return std::visit(overloaded{
                        [](const ProductDensity& p) {
                          // For nonnegative classes the product is gamma-concave with
                          // 1/gamma = sum 1/gamma_i (generalized Hoelder).
                          double inv = 0.0;
                          for (const auto& f : p.factors) {
                            const double g = f.gamma_class();
                            if (g < 0.0) return -kInf;
                            if (g == 0.0) return 0.0;
                            if (std::isfinite(g)) inv += 1.0 / g;
                          }
                          return inv == 0.0 ? kInf : 1.0 / inv;
                        },
                        [](const GaussianStandard&) { return 0.0; },
                        [](const ExponentialProduct&) { return 0.0; },
                        [](const Custom2D& c) { return c.gamma; },
                    },
                    kind_);
}

bool DensityND::is_unconditional() const {
  return std::visit(overloaded{
                        [](const ProductDensity& p) {
                          for (const auto& f : p.factors) {
                            const bool even = std::visit(
                                overloaded{
                                    [](const Gaussian& g) { return g.mean == 0.0; },
                                    [](const TwoSidedExponential&) { return true; },
                                    [](const Lebesgue&) { return true; },
                                    [](const Uniform& u) { return u.lo == -u.hi; },
                                    [](const auto&) { return false; },
                                },
                                f.kind());
                            if (!even) return false;
                          }
                          return true;
                        },
                        [](const Custom2D& c) { return c.unconditional; },
                        [](const auto&) { return true; },
                    },
                    kind_);
}

std::optional<double> DensityND::total_mass() const {
  if (std::holds_alternative<Custom2D>(kind_)) return std::nullopt;
  double m = 1.0;
  for (const auto& f : *factors()) {
    const auto fm = f.total_mass();
    if (!fm) return std::nullopt;
    m *= *fm;
  }
  return m;
}

std::vector<double> DensityND::breakpoints(std::size_t axis) const {
  if (axis >= dimension()) throw DomainError("axis out of range");
  if (const auto* c = std::get_if<Custom2D>(&kind_)) {
    (void)c;
    return {};
  }
  return (*factors())[axis].breakpoints();
}

std::string DensityND::name() const {
  return std::visit(overloaded{
                        [](const ProductDensity& p) {
                          std::string s = "product(";
                          for (std::size_t i = 0; i < p.factors.size(); ++i)
                            s += (i ? "," : "") + p.factors[i].name();
                          return s + ")";
                        },
                        [](const GaussianStandard& g) {
                          return "gaussian-standard(" + std::to_string(g.dimension) + ")";
                        },
                        [](const ExponentialProduct& e) {
                          return "exponential-product(" + std::to_string(e.dimension) +
                                 (e.normalize ? ",normalized)" : ")");
                        },
                        [](const Custom2D& c) { return c.name; },
                    },
                    kind_);
}

// ---------------------------------------------------------------------------

double borell_gamma_to_s(double gamma, int n) {
  if (n < 1) throw DomainError("dimension must be >= 1");
  const double nd = static_cast<double>(n);
  if (gamma == kInf) return 1.0 / nd;
  const double denom = 1.0 + nd * gamma;
  if (std::abs(denom) <= 1e-12) return -kInf;
  if (denom < 0.0 || std::isnan(gamma))
    throw DomainError("gamma < -1/n: sub-convex only, no s-concavity class");
  return gamma / denom;
}

double borell_s_to_gamma(double s, int n) {
  if (n < 1) throw DomainError("dimension must be >= 1");
  const double nd = static_cast<double>(n);
  if (s == -kInf) return -1.0 / nd;
  const double denom = 1.0 - s * nd;
  if (std::abs(denom) <= 1e-12) return kInf;
  if (denom < 0.0 || std::isnan(s)) throw DomainError("s > 1/n has no density correspondence");
  return s / denom;
}

UnimodalCheck check_unimodal(const Density1D& d, std::span<const double> grid) {
  if (grid.size() < 3) throw DomainError("unimodality check needs at least 3 grid points");
  UnimodalCheck out;
  if (!d.mode()) {
    out.reason = "density has no mode";
    out.violation_at = grid.front();
    return out;
  }
  const double mode = *d.mode();
  double prev = d(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double cur = d(grid[i]);
    // Increments ending at or before the mode must be non-negative, those
    // starting at or after it non-positive.
    if (grid[i] <= mode && cur < prev - kUnimodalSlack) {
      out.violation_at = grid[i];
      out.reason = "decrease left of mode";
      return out;
    }
    if (grid[i - 1] >= mode && cur > prev + kUnimodalSlack) {
      out.violation_at = grid[i];
      out.reason = "increase right of mode";
      return out;
    }
    prev = cur;
  }
  out.ok = true;
  return out;
}

UnimodalCheck check_symmetrized_decreasing(const Density1D& d, std::span<const double> grid) {
  UnimodalCheck out;
  double prev = kInf;
  for (double t : grid) {
    if (t < 0.0) throw DomainError("symmetrized check expects a nonnegative grid");
    const double cur = d(t) + d(-t);
    if (cur > prev + kUnimodalSlack) {
      out.violation_at = t;
      out.reason = "phi(t) + phi(-t) increases";
      return out;
    }
    prev = cur;
  }
  out.ok = true;
  return out;
}

namespace {

template <class Eval, class Mid, class Triples>
ConcavityReport gamma_scan(double gamma, const Triples& samples, Eval&& f, Mid&& mid_value) {
  DeficitTracker tracker;
  std::size_t index = 0;
  for (const auto& tr : samples) {
    const double fx = f(tr.x);
    const double fy = f(tr.y);
    if (fx > 0.0 && fy > 0.0) {
      const double lhs = mid_value(tr);
      const double rhs = power_mean(fx, fy, tr.lambda, gamma);
      const double scale = std::max(lhs, rhs);
      const double rel = scale > 0.0 ? (lhs - rhs) / scale : 0.0;
      tracker.add_deficit(rel, 1.0,
                          {{"index", static_cast<double>(index)}, {"lambda", tr.lambda},
                           {"lhs", lhs}, {"rhs", rhs}});
    }
    ++index;
  }
  if (tracker.count() == 0)
    return ConcavityReport::make_vacuous("no sample with f(x) f(y) > 0");
  return tracker.finish({kGammaRelSlack, 0.0});
}

}  // namespace

ConcavityReport check_gamma_concavity(const Density1D& d, double gamma,
                                      std::span<const GammaTriple1D> samples) {
  return gamma_scan(gamma, samples, [&](double x) { return d(x); },
                    [&](const GammaTriple1D& t) { return d((1.0 - t.lambda) * t.x + t.lambda * t.y); });
}

ConcavityReport check_gamma_concavity(const DensityND& d, double gamma,
                                      std::span<const GammaTripleND> samples) {
  return gamma_scan(
      gamma, samples, [&](const std::vector<double>& x) { return d(x); },
      [&](const GammaTripleND& t) {
        std::vector<double> z(t.x.size());
        for (std::size_t i = 0; i < z.size(); ++i) z[i] = (1.0 - t.lambda) * t.x[i] + t.lambda * t.y[i];
        return d(z);
      });
}

}  // namespace bmlab
