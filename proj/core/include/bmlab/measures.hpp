#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bmlab/report.hpp"

namespace bmlab {

// One-dimensional density kinds.

struct Gaussian {
  double sigma = 1.0;
  double mean = 0.0;
};

/// e^{-rate |x|}, or rate/2 e^{-rate |x|} when normalized.
struct TwoSidedExponential {
  double rate = 1.0;
  bool normalize = false;
};

/// x^{1/gamma} on x >= 0, zero on the negative half-line.
struct PowerPlus {
  double gamma = 1.0;
};

/// Indicator of [lo, hi] (unnormalized).
struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};

/// Constant density 1 on the whole line.
struct Lebesgue {};

/// Piecewise-linear interpolation of (grid, values); undefined outside the grid hull.
struct Tabulated {
  std::vector<double> grid;
  std::vector<double> values;
};

struct MonotoneFlags {
  bool non_decreasing_left = false;
  bool non_increasing_right = false;
};

/// A nonnegative density on the line with mode and monotonicity metadata and
/// a declared gamma-concavity class.
class Density1D {
public:
  using Kind = std::variant<Gaussian, TwoSidedExponential, PowerPlus, Uniform, Lebesgue, Tabulated>;

  static Density1D gaussian(double sigma = 1.0, double mean = 0.0);
  static Density1D two_sided_exponential(double rate = 1.0, bool normalize = false);
  static Density1D power_plus(double gamma);
  static Density1D uniform(double lo, double hi);
  static Density1D lebesgue();
  /// Mode defaults to the first argmax of values. Monotone flags are
  /// computed from the table. gamma is the declared concavity class.
  static Density1D tabulated(std::vector<double> grid, std::vector<double> values,
                             std::optional<double> mode = std::nullopt,
                             double gamma = -std::numeric_limits<double>::infinity());

  /// Pointwise value. Throws DomainError for tabulated queries outside the grid hull.
  double operator()(double x) const;

  const Kind& kind() const { return kind_; }
  std::optional<double> mode() const { return mode_; }
  MonotoneFlags flags() const { return flags_; }
  double gamma_class() const { return gamma_; }

  /// Total mass in closed form; nullopt when the mass is infinite.
  std::optional<double> total_mass() const;

  /// Points where the density has a kink or jump; quadrature splits there.
  std::vector<double> breakpoints() const;

  /// Closed support hull [lo, hi] (may be infinite).
  std::pair<double, double> support() const;

  std::string name() const;

private:
  explicit Density1D(Kind k) : kind_(std::move(k)) {}

  Kind kind_;
  std::optional<double> mode_;
  MonotoneFlags flags_;
  double gamma_ = 0.0;
};

// Multi-dimensional density kinds.

struct ProductDensity {
  std::vector<Density1D> factors;
};

/// (2 pi)^{-n/2} e^{-|x|^2/2}.
struct GaussianStandard {
  std::size_t dimension = 1;
};

/// prod e^{-|x_i|}, or prod e^{-|x_i|}/2 when normalized.
struct ExponentialProduct {
  std::size_t dimension = 2;
  bool normalize = false;
};

/// An evaluable planar density with a declared gamma-concavity class.
struct Custom2D {
  std::string name;
  std::function<double(double, double)> fn;
  double gamma = -std::numeric_limits<double>::infinity();
  bool unconditional = false;
};

class DensityND {
public:
  using Kind = std::variant<ProductDensity, GaussianStandard, ExponentialProduct, Custom2D>;

  static DensityND product(std::vector<Density1D> factors);
  static DensityND gaussian_standard(std::size_t n);
  static DensityND exponential_product(std::size_t n, bool normalize = false);
  static DensityND custom_2d(std::string name, std::function<double(double, double)> fn,
                             double gamma, bool unconditional);
  /// Lebesgue measure on R^n as a product of constant factors.
  static DensityND lebesgue(std::size_t n);
  /// The planar density 1/(1 + x^2 + y^2), which is (-1)-concave.
  static DensityND inverse_quadratic();

  double operator()(std::span<const double> x) const;
  double operator()(double x, double y) const;

  std::size_t dimension() const;
  const Kind& kind() const { return kind_; }

  /// One-dimensional factors for separable kinds; nullopt for custom densities.
  std::optional<std::vector<Density1D>> factors() const;

  double gamma_class() const;
  bool is_unconditional() const;
  std::optional<double> total_mass() const;
  std::vector<double> breakpoints(std::size_t axis) const;
  std::string name() const;

private:
  explicit DensityND(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

/// Gamma-concavity class. Class g1 implies class g2 whenever g2 <= g1.
struct GammaClass {
  double gamma = 0.0;
  bool implies(GammaClass other) const { return other.gamma <= gamma; }
};

/// Inverts gamma = s / (1 - s n): s = gamma / (1 + n gamma).
/// gamma = +inf maps to 1/n and gamma = -1/n to -inf. Throws DomainError
/// for gamma < -1/n (sub-convex densities with no s-concavity class).
double borell_gamma_to_s(double gamma, int n);

/// gamma = s / (1 - s n) for s <= 1/n; s = 1/n maps to +inf, s = -inf to -1/n.
double borell_s_to_gamma(double s, int n);

struct UnimodalCheck {
  bool ok = false;
  std::optional<double> violation_at;
  std::string reason;
};

/// Sampled values must be non-decreasing up to the declared mode and
/// non-increasing after it, within absolute slack 1e-12. Densities without a
/// mode fail. Requires at least three grid points.
UnimodalCheck check_unimodal(const Density1D& d, std::span<const double> grid);

/// t -> phi(t) + phi(-t) non-increasing on the given nonnegative grid.
UnimodalCheck check_symmetrized_decreasing(const Density1D& d, std::span<const double> grid);

struct GammaTriple1D {
  double x = 0.0;
  double y = 0.0;
  double lambda = 0.0;
};

struct GammaTripleND {
  std::vector<double> x;
  std::vector<double> y;
  double lambda = 0.0;
};

/// Sampled check of f((1-l)x + l y) >= M_gamma(f(x), f(y); l) on triples with
/// f(x) f(y) > 0. Deficits are relative (divided by the larger side) and the
/// pass threshold is 1e-9. An empty effective sample set is vacuous.
ConcavityReport check_gamma_concavity(const Density1D& d, double gamma,
                                      std::span<const GammaTriple1D> samples);
ConcavityReport check_gamma_concavity(const DensityND& d, double gamma,
                                      std::span<const GammaTripleND> samples);

}  // namespace bmlab
