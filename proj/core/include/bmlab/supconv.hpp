#pragma once

#include <cstddef>
#include <vector>

#include "bmlab/report.hpp"
#include "bmlab/sets.hpp"

namespace bmlab {

/// Samples on the uniform grid x0 + i * step.
struct GridFunction1D {
  double x0 = 0.0;
  double step = 1.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double x(std::size_t i) const { return x0 + step * static_cast<double>(i); }
  double integral() const;  // trapezoid rule
  double max() const;
};

/// Minimal admissible h with h((1-l)x + l y) >= min(f(x), g(y)) over all grid
/// pairs, combinations binned to the nearest node. f and g must share a grid.
GridFunction1D supconv_min(const GridFunction1D& f, const GridFunction1D& g, double lambda);

/// Integral inequality int h >= (1-l) int f + l int g for h = supconv_min(f, g, l).
/// Vacuous unless max f = max g within 1e-9. The pass threshold adds
/// step * (max f + max g) for binning.
ConcavityReport check_henstock_macbeath(const GridFunction1D& f, const GridFunction1D& g, double lambda,
                                        const CheckTolerance& tol = {});

/// Row-major samples values[iy * nx + ix] at (x0 + ix dx, y0 + iy dy).
struct GridFunction2D {
  double x0 = 0.0;
  double y0 = 0.0;
  double dx = 1.0;
  double dy = 1.0;
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> values;

  double at(std::size_t ix, std::size_t iy) const { return values[iy * nx + ix]; }
  double integral() const;  // tensor trapezoid rule
  double max() const;
};

inline constexpr std::size_t kMaxSupconvSide = 64;

/// Minimal admissible h with h((1-l)x + l y) >= M_gamma(f(x), g(y); l) for
/// all grid pairs with f(x) g(y) > 0. Throws ResourceError beyond 64x64.
GridFunction2D supconv_gamma_2d(const GridFunction2D& f, const GridFunction2D& g, double lambda,
                                double gamma = -1.0);

/// Maximal section functional on the grid: the largest trapezoid line
/// integral over grid lines orthogonal to u. Only u = +-e1, +-e2.
double grid_max_section(const GridFunction2D& f, const DirectionUnit& u);

/// Integral inequality for h = supconv_gamma_2d(f, g, l, gamma). Vacuous unless
/// the grid maximal sections along u agree within 1e-6 relative. The pass
/// threshold adds max(dx, dy) * (Lx + Ly) * (max f + max g).
ConcavityReport check_dancs_uhrin(const GridFunction2D& f, const GridFunction2D& g, const DirectionUnit& u,
                                  double lambda, double gamma = -1.0, const CheckTolerance& tol = {});

}  // namespace bmlab
