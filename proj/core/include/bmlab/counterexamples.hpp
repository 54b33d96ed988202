#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "bmlab/concavity.hpp"

namespace bmlab {

/// Threshold above which a Gaussian violation in the plane is known to exist.
inline constexpr double kGaussianViolationThreshold = 1.0 - 2.0 / std::numbers::pi;

/// The s-concave measure x^{1/gamma} 1_{x >= 0} dx with gamma = s / (1 - s),
/// evaluated on A = [-a, a], B = [-b, b].
struct PowerFamilyInstance {
  double s = 0.5;
  double r = 1.0;
  double a = 0.5;
  double b = 1.0;

  /// Throws DomainError unless 0 < s < 1, r > s and 0 < a < b.
  void validate() const;
};

/// s a^{1/s}: the mass of [-a, a] (equivalently [0, a]).
double power_mass(double s, double a);

/// mu((1-l)A + lB) - M_r(mu(A), mu(B); l) in closed form.
double power_family_deficit(const PowerFamilyInstance& inst, double lambda);

/// Left side at l = 1/2 in the limit a -> 0, i.e. mu(B) / 2^{1/s}.
double power_family_limit(double s, double b);

struct PowerSearchResult {
  double a = 0.0;
  double deficit = 0.0;
  // Deficit below -1e-12.
  bool violation = false;
};

/// Minimizes the l = 1/2 deficit over a in (0, b): a log-spaced scan
/// followed by golden-section refinement. Requires 0 < s < 1, r > s, b > 0.
PowerSearchResult power_family_search(double s, double r, double b);

enum class SearchFamilyId { triangle, halfplane, symmetric_dilate };

const char* to_string(SearchFamilyId f);
SearchFamilyId parse_search_family(const std::string& name);

/// Documented parametric planar families, every member satisfying 0 in A ⊂ B.
///  - triangle: A is a triangle around 0 given in polar form, B = hull(A ∪ (cA + w)).
///  - halfplane: B is a centered box clipped by two halfplanes at positive
///    offsets; A is B intersected with a shrunken box and a further halfplane.
///  - symmetric-dilate: A and B are two dilates of one symmetric hexagon.
struct SearchFamily {
  SearchFamilyId family = SearchFamilyId::triangle;
  DensityND measure = DensityND::gaussian_standard(2);
  double s = 0.5;
  std::uint64_t seed = 1;
};

/// Number of parameters of a family (each ranging over [0, 1]).
std::size_t family_dimension(SearchFamilyId f);

struct SetPair {
  ConvexPolygon a;
  ConvexPolygon b;
};

/// Maps normalized parameters in [0, 1]^d to the family's sets. Throws
/// DomainError when the parameters produce a degenerate polygon.
SetPair family_sets(SearchFamilyId f, const std::vector<double>& params);

struct SearchOptions {
  std::size_t restarts = 8;
  // Quadrature used while searching; the winner is re-checked at the evaluator defaults.
  QuadraturePolicy search_policy{1e-8, 1e-6, 30, 64};
};

struct SearchResult {
  // l = 1/2 check of the winner, certified at 10x tightening, flagged exploratory.
  ConcavityReport report;
  // Full lambda scan of the winner.
  ConcavityReport full_scan;
  std::vector<double> params;
  SetPair sets;
  std::size_t evaluations = 0;
  std::size_t restart = 0;
};

/// Random restarts plus coordinate descent minimizing the l = 1/2 deficit
/// of the s-mean check; budget counts deficit evaluations. Deterministic for
/// a given seed and budget, independent of the worker count.
SearchResult violation_search(const SearchFamily& fam, std::size_t budget, const SearchOptions& opts = {});

}  // namespace bmlab
