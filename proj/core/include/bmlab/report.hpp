#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bmlab {

enum class Verdict { pass, violation, vacuous };

const char* to_string(Verdict v);

/// Outcome of an inequality scan. A deficit is left side minus right side;
/// verdict is violation iff worst_deficit < -tolerance. Vacuous reports
/// carry a reason and a NaN deficit.
struct ConcavityReport {
  Verdict verdict = Verdict::vacuous;
  double worst_deficit = std::numeric_limits<double>::quiet_NaN();
  std::map<std::string, double> witness;
  std::size_t samples = 0;
  double tolerance = 0.0;
  std::string reason;
  // Set when a violation was re-evaluated at tightened quadrature tolerance.
  std::optional<bool> certified;
  // Search output that is reported, never asserted.
  bool exploratory = false;
  std::vector<std::string> notes;

  bool passed() const { return verdict == Verdict::pass; }
  bool violated() const { return verdict == Verdict::violation; }
  bool vacuous() const { return verdict == Verdict::vacuous; }

  static ConcavityReport make_vacuous(std::string why);
};

/// Tolerance of the form abs + rel * max(|sides|).
struct CheckTolerance {
  double abs = 1e-10;
  double rel = 1e-8;
};

/// Running minimum of deficits for a scan. The final tolerance uses the
/// largest side magnitude seen over the whole scan.
class DeficitTracker {
public:
  void add(double lhs, double rhs, std::map<std::string, double> witness);
  void add_deficit(double deficit, double side_scale, std::map<std::string, double> witness);

  std::size_t count() const { return count_; }
  ConcavityReport finish(const CheckTolerance& tol) const;

private:
  double worst_ = std::numeric_limits<double>::infinity();
  double side_max_ = 0.0;
  std::size_t count_ = 0;
  std::map<std::string, double> witness_;
};

}  // namespace bmlab
