#include "bmlab/means.hpp"

#include <algorithm>
#include <cmath>

namespace bmlab {

double power_mean(double a, double b, double lambda, double p) {
  if (lambda <= 0.0) return a;
  if (lambda >= 1.0) return b;
  if (p == kInf) return std::max(a, b);
  if (p == -kInf) return std::min(a, b);
  if (a == 0.0 || b == 0.0) {
    if (p <= 0.0) return 0.0;
    // p > 0: one term vanishes.
    const double other = (a == 0.0) ? b : a;
    const double w = (a == 0.0) ? lambda : 1.0 - lambda;
    return std::pow(w, 1.0 / p) * other;
  }
  if (p == 0.0) return std::exp((1.0 - lambda) * std::log(a) + lambda * std::log(b));
  // Factor out the larger argument so that large |p| does not overflow.
  const double m = std::max(a, b);
  const double ra = a / m;
  const double rb = b / m;
  const double inner = (1.0 - lambda) * std::pow(ra, p) + lambda * std::pow(rb, p);
  return m * std::pow(inner, 1.0 / p);
}

}  // namespace bmlab
