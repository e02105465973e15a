#ifndef SCANLAW_SCAN_HPP
#define SCANLAW_SCAN_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "scanlaw/distribution.hpp"

namespace scanlaw {

// Kahan-compensated prefix sums, s[0] = 0, s[k] = x_1 + ... + x_k.
struct PrefixSums {
  std::vector<double> s;

  PrefixSums() = default;
  explicit PrefixSums(std::span<const double> data) {
    s.resize(data.size() + 1);
    s[0] = 0;
    double acc = 0, carry = 0;
    for (std::size_t k = 0; k < data.size(); ++k) {
      double y = data[k] - carry;
      double t = acc + y;
      carry = (t - acc) - y;
      acc = t;
      s[k + 1] = acc;
    }
  }

  long n() const { return static_cast<long>(s.size()) - 1; }
};

struct ScanResult {
  double value = -kInf;
  long i = 0, j = 0;  // achieving interval (i, j], value = (s[j]-s[i])/sqrt(j-i)
  long length = 0;
  long h1 = 0, h2 = 0;

  json to_json() const {
    return json{{"value", value}, {"i", i}, {"j", j},
                {"length", length}, {"h1", h1}, {"h2", h2}};
  }
};

namespace detail {

// Mathematically equal candidates can differ by a few ulps between summation
// orders, so ties are recognized up to 4 eps relative and then broken by
// smallest i, then smallest j.
constexpr double kTieTol = 4 * 2.220446049250313e-16;

inline bool scan_better(double v, long i, long j, const ScanResult& best) {
  if (best.length == 0) return true;  // no candidate yet
  double tol = kTieTol * std::max(std::abs(v), std::abs(best.value));
  if (v - best.value > tol) return true;
  if (best.value - v > tol) return false;
  if (i != best.i) return i < best.i;
  return j < best.j;
}

inline void scan_lengths(const PrefixSums& ps, long h1, long h2, ScanResult& best) {
  const long n = ps.n();
  const double* s = ps.s.data();
  for (long l = h1; l <= h2; ++l) {
    double d = s[l] - s[0];
    for (long i = 1; i + l <= n; ++i) {
      double di = s[i + l] - s[i];
      if (di > d) d = di;
    }
    // earliest interval within tie tolerance of the per-length maximum
    double tol = kTieTol * std::abs(d);
    long bi = 0;
    for (long i = 0; i + l <= n; ++i) {
      if (d - (s[i + l] - s[i]) <= tol) {
        bi = i;
        d = s[i + l] - s[i];
        break;
      }
    }
    double v = d / std::sqrt(static_cast<double>(l));
    if (scan_better(v, bi, bi + l, best)) {
      best.value = v;
      best.i = bi;
      best.j = bi + l;
      best.length = l;
    }
  }
}

}  // namespace detail

// M_n(h1, h2): exact maximum of (S_j - S_i)/sqrt(j-i) over h1 <= j-i <= h2
inline ScanResult scan_restricted(const PrefixSums& ps, long h1, long h2) {
  const long n = ps.n();
  if (n < 1) raise(errc::argument, "scan needs nonempty data");
  if (!(1 <= h1 && h1 <= h2 && h2 <= n))
    raise(errc::argument, "window must satisfy 1 <= h1 <= h2 <= n");
  ScanResult best;
  best.h1 = h1;
  best.h2 = h2;
  detail::scan_lengths(ps, h1, h2, best);
  return best;
}

inline ScanResult scan_restricted(std::span<const double> data, long h1, long h2) {
  return scan_restricted(PrefixSums(data), h1, h2);
}

// scan over a union of length bands; bands must be disjoint and sorted
inline ScanResult scan_bands(const PrefixSums& ps,
                             const std::vector<std::pair<long, long>>& bands) {
  if (bands.empty()) raise(errc::argument, "no scan bands given");
  ScanResult best;
  best.h1 = bands.front().first;
  best.h2 = bands.back().second;
  for (const auto& [h1, h2] : bands) {
    if (!(1 <= h1 && h1 <= h2 && h2 <= ps.n())) raise(errc::argument, "bad scan band");
    detail::scan_lengths(ps, h1, h2, best);
  }
  return best;
}

// Reference implementation: exhaustive double loop with naive running sums.
// Kept independent of the prefix-sum path so it can serve as its oracle.
inline ScanResult scan_full(std::span<const double> data) {
  const long n = static_cast<long>(data.size());
  if (n < 1) raise(errc::argument, "scan needs nonempty data");
  ScanResult best;
  best.h1 = 1;
  best.h2 = n;
  for (long i = 0; i < n; ++i) {
    double sum = 0;
    for (long j = i + 1; j <= n; ++j) {
      sum += data[j - 1];
      double v = sum / std::sqrt(static_cast<double>(j - i));
      if (detail::scan_better(v, i, j, best)) {
        best.value = v;
        best.i = i;
        best.j = j;
        best.length = j - i;
      }
    }
  }
  return best;
}

// M_n^+ and M_n^-; the latter is the scan of the negated data
inline std::pair<ScanResult, ScanResult> scan_two_sided(std::span<const double> data, long h1,
                                                        long h2) {
  ScanResult plus = scan_restricted(data, h1, h2);
  std::vector<double> neg(data.size());
  for (std::size_t k = 0; k < data.size(); ++k) neg[k] = -data[k];
  ScanResult minus = scan_restricted(neg, h1, h2);
  return {plus, minus};
}

// T(u) = min{ n : M_n > u }, simulated by streaming draws from dist.
// With window_cap w only intervals of length <= w are examined; that is exact
// for the hitting regimes where long intervals are negligible, and the caller
// owns that assumption.
inline std::optional<long> hitting_time(const Distribution& dist, double u, std::uint64_t seed,
                                        long n_cap, std::optional<long> window_cap = std::nullopt,
                                        std::uint64_t stream = 0) {
  if (n_cap < 1) raise(errc::argument, "n_cap must be >= 1");
  Rng rng(seed, stream);
  const long w = window_cap.value_or(n_cap);
  std::vector<double> s(n_cap + 1);
  s[0] = 0;
  std::vector<double> inv_sqrt(w + 1);
  for (long l = 1; l <= w; ++l) inv_sqrt[l] = 1.0 / std::sqrt(static_cast<double>(l));
  double acc = 0, carry = 0;
  const long block = 4096;
  std::vector<double> buf(block);
  long produced = 0;
  for (long n = 1; n <= n_cap; ++n) {
    if (n - 1 >= produced) {
      long take = std::min(block, n_cap - produced);
      dist.sample_into(rng, std::span<double>(buf.data(), take));
      for (long t = 0; t < take; ++t) {
        double y = buf[t] - carry;
        double tt = acc + y;
        carry = (tt - acc) - y;
        acc = tt;
        s[produced + t + 1] = acc;
      }
      produced += take;
    }
    const double sn = s[n];
    long imin = std::max(0L, n - w);
    for (long i = n - 1; i >= imin; --i) {
      if ((sn - s[i]) * inv_sqrt[n - i] > u) return n;
    }
  }
  return std::nullopt;
}

}  // namespace scanlaw

#endif  // SCANLAW_SCAN_HPP
