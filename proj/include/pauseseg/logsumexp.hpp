#ifndef PAUSESEG_LOGSUMEXP_HPP
#define PAUSESEG_LOGSUMEXP_HPP

#include <algorithm>
#include <cmath>
#include <span>

namespace pauseseg {

// Log-domain score of an impossible event. A large negative finite value
// instead of -inf keeps chained additions NaN-free.
inline constexpr double kLogZero = -1e30;

inline bool is_log_zero(double x) { return x <= kLogZero * 0.5; }

// log(exp(a) + exp(b))
inline double log_add(double a, double b) {
  if (is_log_zero(a)) return b;
  if (is_log_zero(b)) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

// log sum_i exp(xs[i]), max-shifted
inline double log_sum(std::span<const double> xs) {
  double m = kLogZero;
  for (double x : xs) m = std::max(m, x);
  if (is_log_zero(m)) return kLogZero;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace pauseseg

#endif  // PAUSESEG_LOGSUMEXP_HPP
