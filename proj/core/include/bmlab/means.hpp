#pragma once

#include <limits>

namespace bmlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Weighted power mean ((1-lambda) a^p + lambda b^p)^(1/p).
///
/// Limit cases follow continuity: p = 0 is the weighted geometric mean,
/// p = -inf the minimum and p = +inf the maximum. With a zero argument and
/// p <= 0 the mean is 0. At lambda = 0 (resp. 1) the result is a (resp. b)
/// exactly for every p.
double power_mean(double a, double b, double lambda, double p);

}  // namespace bmlab
