#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bmlab/quadrature.hpp"
#include "bmlab/report.hpp"
#include "bmlab/sets.hpp"

namespace bmlab {

struct SMeanSpec {
  double s = 1.0;
  double lambda = 0.5;
};

/// ((1-l) a^s + l b^s)^(1/s) with the continuity conventions of power_mean.
double s_mean(double a, double b, SMeanSpec spec);

/// {0, 0.1, ..., 1}.
std::vector<double> default_lambda_grid();

/// lo, lo+step, ... up to hi inclusive (hi is appended when the last step
/// falls short of it by round-off).
std::vector<double> make_grid(double lo, double hi, double step);

/// n equally spaced points on [lo, hi].
std::vector<double> linspace(double lo, double hi, std::size_t n);

struct BmOptions {
  CheckTolerance tol{};
  // Golden-section refinement of lambda around the worst grid sample.
  bool refine_lambda = true;
  // Re-evaluate violations at 10x tighter quadrature tolerance.
  bool certify = true;
};

/// Scans mu((1-l)A + lB) - M_s(mu(A), mu(B); l) over the lambda grid. Vacuous
/// when mu(A) mu(B) = 0. Measure failures surface as EvaluationError carrying
/// the offending lambda.
ConcavityReport check_bm(const MeasureEvaluator& ev, const SetRep& a, const SetRep& b, double s,
                         std::span<const double> lambdas, const BmOptions& opts = {});

struct CurveDeficit {
  std::size_t index = 0;  // interior sample the deficit belongs to
  double deficit = 0.0;
  double scale = 0.0;     // largest |G| of the three samples, at least 1 when p = 0
};

/// Per-sample three-point deficits of the transformed curve G, as used by
/// check_curve_power_concavity.
std::vector<CurveDeficit> curve_deficits(std::span<const double> ts, std::span<const double> fs, double p);

/// Three-point p-concavity test on consecutive samples of a curve. For finite
/// p != 0 the transform is G = sign(p) F^p, for p = 0 it is log F; deficits
/// are G(t2) minus the linear interpolation of G(t1), G(t3). For p = +-inf the
/// deficit is F(t2) - M_p(F(t1), F(t3)). p <= 0 with a zero value is a DomainError.
ConcavityReport check_curve_power_concavity(std::span<const double> ts, std::span<const double> fs,
                                            double p, const CheckTolerance& tol = {});

/// F(t) = mu(tA) on a positive grid, tested for p-concavity. Vacuous unless 0 in A.
ConcavityReport scan_dilates(const MeasureEvaluator& ev, const SetRep& a, std::span<const double> ts,
                             double p, const CheckTolerance& tol = {});

/// t -> mu(e^t A) tested for log-concavity. Vacuous unless 0 in A.
ConcavityReport check_b_property(const MeasureEvaluator& ev, const SetRep& a,
                                 std::span<const double> ts, const CheckTolerance& tol = {});

struct RadialCheck {
  bool ok = true;
  std::size_t ray = 0;
  double t = 0.0;
};

/// phi(t x) non-increasing in t along each ray (slack 1e-12 absolute plus
/// 1e-12 relative). On failure the ray index and offending t are reported.
RadialCheck check_radial_monotone(const DensityND& d, std::span<const std::vector<double>> rays,
                                  std::span<const double> ts);

/// Deterministic random unit vectors in R^n (both signs of e_1 for n = 1).
std::vector<std::vector<double>> random_rays(std::size_t n, std::size_t count, std::uint64_t seed);

struct EquivPipelineOptions {
  std::vector<double> b_ts = linspace(-2.0, 2.0, 33);
  std::vector<double> dilate_ts = linspace(0.25, 3.0, 23);
  std::vector<double> radial_ts = linspace(0.0, 6.0, 121);
  std::size_t ray_count = 100;
  std::uint64_t seed = 1;
  CheckTolerance tol{};
};

struct EquivPipelineReport {
  bool radial_monotone = false;
  RadialCheck radial;
  ConcavityReport b_property;
  ConcavityReport dilates;
  // Radial monotonicity and the B-property both hold, so dilate concavity must.
  bool implication_applies = false;
  // Implication applies but the dilate scan reports a violation.
  bool contradiction = false;
  std::string note;
};

/// Runs the radial monotonicity check, the B-property check and the dilate
/// scan at p = 1/n, and records whether the implication instance holds.
EquivPipelineReport prop_equiv_pipeline(const MeasureEvaluator& ev, const SetRep& a,
                                        const EquivPipelineOptions& opts = {});

/// Arithmetic (s = 1) check for a unimodal 1-D density whose mode lies in
/// A ∩ B. Hypothesis failures are vacuous with a reason.
ConcavityReport check_prop_concave(const MeasureEvaluator& ev, const IntervalUnion& a,
                                   const IntervalUnion& b, std::span<const double> lambdas,
                                   const BmOptions& opts = {});

/// Arithmetic check for A = A1 x R under mu1 (x) mu2 with mu1 unimodal at 0
/// and mu2 finite, using ((1-l)A1 + l P_x(B)) x R for the combination.
/// Throws DomainError when mu2 has infinite mass.
ConcavityReport check_slab(const MeasureEvaluator& ev, const IntervalUnion& a1,
                           const ConvexPolygon& b, std::span<const double> lambdas,
                           const CheckTolerance& tol = {});

struct BonnesenOptions {
  BmOptions bm{};
  double section_rel_tol = 1e-6;
  std::size_t spot_samples = 400;
  std::uint64_t seed = 11;
};

/// Arithmetic check for polygons whose maximal sections along u carry equal
/// mass, under a density declared (-1)-concave and spot-checked.
ConcavityReport check_bonnesen_sections(const MeasureEvaluator& ev, const ConvexPolygon& a,
                                        const ConvexPolygon& b, const DirectionUnit& u,
                                        std::span<const double> lambdas,
                                        const BonnesenOptions& opts = {});

/// Scale c such that the maximal section of cB along u matches that of A
/// to relative precision rel_tol. Requires 0 in the interior of B so that the
/// maximal section grows monotonically with c.
double match_max_section_scale(const MeasureEvaluator& ev, const ConvexPolygon& a,
                               const ConvexPolygon& b, const DirectionUnit& u, double rel_tol = 1e-9);

}  // namespace bmlab
