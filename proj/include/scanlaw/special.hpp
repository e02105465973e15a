#ifndef SCANLAW_SPECIAL_HPP
#define SCANLAW_SPECIAL_HPP

#include <cmath>
#include <limits>

namespace scanlaw {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Standard normal tail P[Z > x], relative accuracy ~1e-14 via erfc.
inline double normal_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// log(sum p_i exp(a_i)) with max-shift; weights need not be normalized.
template <class It>
double log_sum_exp_weighted(It first, It last, It wfirst) {
  double amax = -kInf;
  for (It it = first; it != last; ++it) amax = std::max(amax, *it);
  double s = 0;
  It w = wfirst;
  for (It it = first; it != last; ++it, ++w) s += *w * std::exp(*it - amax);
  return amax + std::log(s);
}

}  // namespace scanlaw

#endif  // SCANLAW_SPECIAL_HPP
