#include "bmlab/report.hpp"

#include <algorithm>
#include <cmath>

namespace bmlab {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::violation: return "violation";
    case Verdict::vacuous: return "vacuous";
  }
  return "unknown";
}

ConcavityReport ConcavityReport::make_vacuous(std::string why) {
  ConcavityReport r;
  r.verdict = Verdict::vacuous;
  r.reason = std::move(why);
  return r;
}

void DeficitTracker::add(double lhs, double rhs, std::map<std::string, double> witness) {
  witness["lhs"] = lhs;
  witness["rhs"] = rhs;
  add_deficit(lhs - rhs, std::max(std::abs(lhs), std::abs(rhs)), std::move(witness));
}

void DeficitTracker::add_deficit(double deficit, double side_scale,
                                 std::map<std::string, double> witness) {
  ++count_;
  if (std::isfinite(side_scale)) side_max_ = std::max(side_max_, side_scale);
  // Strict comparison keeps the first sample among ties.
  if (deficit < worst_ || (count_ == 1)) {
    worst_ = deficit;
    witness_ = std::move(witness);
  }
}

ConcavityReport DeficitTracker::finish(const CheckTolerance& tol) const {
  if (count_ == 0) return ConcavityReport::make_vacuous("no admissible samples");
  ConcavityReport r;
  r.samples = count_;
  r.worst_deficit = worst_;
  r.witness = witness_;
  r.tolerance = tol.abs + tol.rel * side_max_;
  r.verdict = (worst_ < -r.tolerance) ? Verdict::violation : Verdict::pass;
  return r;
}

}  // namespace bmlab
