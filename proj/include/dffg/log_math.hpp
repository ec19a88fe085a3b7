#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace dffg {

/// Log of an exact zero factor. Propagates through sums: kLogZero + x == kLogZero.
inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

inline bool is_log_zero(double x) { return x == kLogZero; }

/// ln(e^a + e^b) without overflow; either argument may be kLogZero.
inline double log_add(double a, double b) {
  if (is_log_zero(a)) return b;
  if (is_log_zero(b)) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

inline double log_sum_exp(std::span<const double> xs) {
  double hi = kLogZero;
  for (double x : xs) hi = x > hi ? x : hi;
  if (is_log_zero(hi)) return kLogZero;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - hi);
  return hi + std::log(s);
}

/// ln cosh(x), stable for large |x|.
inline double log_cosh(double x) {
  x = std::fabs(x);
  return x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0);
}

}  // namespace dffg
