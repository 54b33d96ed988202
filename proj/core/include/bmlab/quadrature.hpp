#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <variant>

#include "bmlab/measures.hpp"
#include "bmlab/sets.hpp"

namespace bmlab {

struct QuadraturePolicy {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_depth = 40;
  // Number of offsets sampled by max_section before refinement.
  int section_grid = 512;

  /// Throws DomainError unless tolerances are positive, max_depth >= 10 and section_grid >= 3.
  void validate() const;
  /// Both tolerances divided by factor.
  QuadraturePolicy tightened(double factor) const;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  std::size_t evaluations = 0;
};

/// Globally adaptive Simpson rule with Richardson correction. The interval
/// [a, b] is first split at the given breakpoints; panels are bisected in
/// order of decreasing error estimate until the summed estimate is below
/// max(abs_tol, rel_tol |I|), a panel budget is exhausted, or every open panel
/// reached max_depth. The result reports non-convergence instead of throwing.
QuadResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                            const QuadraturePolicy& policy, std::span<const double> breakpoints = {});

/// adaptive_simpson that throws ConvergenceError on failure.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadraturePolicy& policy, std::span<const double> breakpoints = {});

using Density = std::variant<Density1D, DensityND>;

/// A density paired with a quadrature policy.
class MeasureEvaluator {
public:
  explicit MeasureEvaluator(Density1D d, QuadraturePolicy p = {});
  explicit MeasureEvaluator(DensityND d, QuadraturePolicy p = {});
  explicit MeasureEvaluator(Density d, QuadraturePolicy p = {});

  std::size_t dimension() const;
  const Density& density() const { return density_; }
  const QuadraturePolicy& policy() const { return policy_; }
  MeasureEvaluator with_policy(QuadraturePolicy p) const;
  std::string name() const;

  double density_at(std::span<const double> x) const;
  /// Factor i of a separable density (any 1-D density is its own factor).
  std::optional<Density1D> factor(std::size_t i) const;
  /// The density as an N-dimensional object (1-D densities become a one-factor product).
  DensityND as_nd() const;

  /// Dispatch to the representation-specific routine.
  double measure(const SetRep& s) const;

private:
  Density density_;
  QuadraturePolicy policy_;
};

/// Measure of a finite interval union under a 1-D density. The full line
/// returns the closed-form total mass, or throws InfiniteMeasure.
double measure_1d(const MeasureEvaluator& ev, const IntervalUnion& a);
double measure_1d(const Density1D& d, const IntervalUnion& a, const QuadraturePolicy& policy);

/// Product of per-coordinate masses under a separable density.
double measure_product(const MeasureEvaluator& ev, const ProductSet& a);

struct PolygonMeasure {
  double value = 0.0;
  bool degenerate = false;
};

/// Iterated quadrature: outer integral in x over the projection, inner
/// integral over the vertical chord.
PolygonMeasure measure_polygon(const MeasureEvaluator& ev, const ConvexPolygon& p);

/// Density integrated over the chord P ∩ {x·u = t}; 0 when the chord is empty.
double section_measure(const MeasureEvaluator& ev, const ConvexPolygon& p, const DirectionUnit& u,
                       double t);

struct SectionMax {
  double t = 0.0;
  double value = 0.0;
};

/// Grid scan over the projection range followed by golden-section refinement
/// around the best sample. Ties resolve to the smallest offset.
SectionMax max_section(const MeasureEvaluator& ev, const ConvexPolygon& p, const DirectionUnit& u);

}  // namespace bmlab
