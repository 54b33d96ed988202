#include "bmlab/supconv.hpp"

#include <algorithm>
#include <cmath>

#include "bmlab/errors.hpp"
#include "bmlab/means.hpp"

namespace bmlab {

namespace {

void require_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("lambda must lie in [0, 1]");
}

void require_nonnegative(const std::vector<double>& v) {
  for (double x : v)
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("grid function values must be finite and >= 0");
}

bool same(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a) + std::abs(b)); }

std::size_t bin(double pos, std::size_t n) {
  const auto k = static_cast<long long>(std::llround(pos));
  return static_cast<std::size_t>(std::clamp<long long>(k, 0, static_cast<long long>(n) - 1));
}

double trapezoid_weight(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }

ConcavityReport integral_verdict(double lhs, double rhs, double slack, const CheckTolerance& tol,
                                 std::map<std::string, double> witness) {
  DeficitTracker t;
  t.add(lhs, rhs, std::move(witness));
  ConcavityReport r = t.finish(tol);
  r.tolerance += slack;
  r.verdict = r.worst_deficit < -r.tolerance ? Verdict::violation : Verdict::pass;
  r.witness["grid_slack"] = slack;
  return r;
}

}  // namespace

double GridFunction1D::integral() const {
  if (values.size() < 2) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += trapezoid_weight(i, values.size()) * values[i];
  return s * step;
}

double GridFunction1D::max() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

GridFunction1D supconv_min(const GridFunction1D& f, const GridFunction1D& g, double lambda) {
  require_lambda(lambda);
  if (f.size() != g.size() || !same(f.x0, g.x0) || !same(f.step, g.step))
    throw DomainError("supconv_min needs a common grid");
  if (!(f.step > 0.0)) throw DomainError("grid step must be positive");
  require_nonnegative(f.values);
  require_nonnegative(g.values);

  const std::size_t n = f.size();
  GridFunction1D h{f.x0, f.step, std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    if (f.values[i] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const double m = std::min(f.values[i], g.values[j]);
      if (m == 0.0) continue;
      const std::size_t k = bin((1.0 - lambda) * static_cast<double>(i) + lambda * static_cast<double>(j), n);
      h.values[k] = std::max(h.values[k], m);
    }
  }
  return h;
}

ConcavityReport check_henstock_macbeath(const GridFunction1D& f, const GridFunction1D& g, double lambda,
                                        const CheckTolerance& tol) {
  const double mf = f.max();
  const double mg = g.max();
  if (std::abs(mf - mg) > 1e-9 * std::max(1.0, std::max(mf, mg))) {
    auto r = ConcavityReport::make_vacuous("max(f) differs from max(g)");
    r.witness = {{"max_f", mf}, {"max_g", mg}};
    return r;
  }
  const GridFunction1D h = supconv_min(f, g, lambda);
  const double lhs = h.integral();
  const double rhs = (1.0 - lambda) * f.integral() + lambda * g.integral();
  return integral_verdict(lhs, rhs, f.step * (mf + mg), tol, {{"lambda", lambda}});
}

double GridFunction2D::integral() const {
  if (nx < 2 || ny < 2) return 0.0;
  double s = 0.0;
  for (std::size_t iy = 0; iy < ny; ++iy)
    for (std::size_t ix = 0; ix < nx; ++ix)
      s += trapezoid_weight(ix, nx) * trapezoid_weight(iy, ny) * at(ix, iy);
  return s * dx * dy;
}

double GridFunction2D::max() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

GridFunction2D supconv_gamma_2d(const GridFunction2D& f, const GridFunction2D& g, double lambda, double gamma) {
  require_lambda(lambda);
  if (f.nx > kMaxSupconvSide || f.ny > kMaxSupconvSide)
    throw ResourceError("supconv_gamma_2d supports grids up to 64x64");
  if (f.nx != g.nx || f.ny != g.ny || !same(f.x0, g.x0) || !same(f.y0, g.y0) || !same(f.dx, g.dx) ||
      !same(f.dy, g.dy))
    throw DomainError("supconv_gamma_2d needs a common grid");
  if (f.values.size() != f.nx * f.ny || g.values.size() != g.nx * g.ny)
    throw DomainError("grid function size does not match its shape");
  require_nonnegative(f.values);
  require_nonnegative(g.values);

  GridFunction2D h = f;
  std::fill(h.values.begin(), h.values.end(), 0.0);
  const double mu = 1.0 - lambda;
  for (std::size_t fy = 0; fy < f.ny; ++fy) {
    for (std::size_t fx = 0; fx < f.nx; ++fx) {
      const double a = f.at(fx, fy);
      if (a == 0.0) continue;
      for (std::size_t gy = 0; gy < g.ny; ++gy) {
        const std::size_t ky = bin(mu * static_cast<double>(fy) + lambda * static_cast<double>(gy), f.ny);
        for (std::size_t gx = 0; gx < g.nx; ++gx) {
          const double b = g.at(gx, gy);
          if (b == 0.0) continue;
          const std::size_t kx = bin(mu * static_cast<double>(fx) + lambda * static_cast<double>(gx), f.nx);
          double& slot = h.values[ky * f.nx + kx];
          slot = std::max(slot, power_mean(a, b, lambda, gamma));
        }
      }
    }
  }
  return h;
}

double grid_max_section(const GridFunction2D& f, const DirectionUnit& u) {
  const auto v = u.u();
  const bool along_x = std::abs(std::abs(v.x) - 1.0) <= 1e-12;
  const bool along_y = std::abs(std::abs(v.y) - 1.0) <= 1e-12;
  if (!along_x && !along_y) throw DomainError("grid maximal sections need u = +-e1 or +-e2");
  double best = 0.0;
  if (along_x) {
    // Sections orthogonal to e1 are the grid columns.
    for (std::size_t ix = 0; ix < f.nx; ++ix) {
      double s = 0.0;
      for (std::size_t iy = 0; iy < f.ny; ++iy) s += trapezoid_weight(iy, f.ny) * f.at(ix, iy);
      best = std::max(best, s * f.dy);
    }
  } else {
    for (std::size_t iy = 0; iy < f.ny; ++iy) {
      double s = 0.0;
      for (std::size_t ix = 0; ix < f.nx; ++ix) s += trapezoid_weight(ix, f.nx) * f.at(ix, iy);
      best = std::max(best, s * f.dx);
    }
  }
  return best;
}

ConcavityReport check_dancs_uhrin(const GridFunction2D& f, const GridFunction2D& g, const DirectionUnit& u,
                                  double lambda, double gamma, const CheckTolerance& tol) {
  const double mf = grid_max_section(f, u);
  const double mg = grid_max_section(g, u);
  const double gap = std::abs(mf - mg) / std::max({mf, mg, 1e-300});
  if (gap > 1e-6) {
    auto r = ConcavityReport::make_vacuous("maximal sections differ");
    r.witness = {{"m_u_f", mf}, {"m_u_g", mg}, {"section_gap", gap}};
    return r;
  }
  const GridFunction2D h = supconv_gamma_2d(f, g, lambda, gamma);
  const double lhs = h.integral();
  const double rhs = (1.0 - lambda) * f.integral() + lambda * g.integral();
  const double lx = f.dx * static_cast<double>(f.nx - 1);
  const double ly = f.dy * static_cast<double>(f.ny - 1);
  const double slack = std::max(f.dx, f.dy) * (lx + ly) * (f.max() + g.max());
  auto r = integral_verdict(lhs, rhs, slack, tol, {{"lambda", lambda}, {"gamma", gamma}});
  r.witness["section_gap"] = gap;
  return r;
}

}  // namespace bmlab
