#ifndef SCANLAW_LATTICE_DP_HPP
#define SCANLAW_LATTICE_DP_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "scanlaw/distribution.hpp"

namespace scanlaw {

// Exact distribution of the k-step sum of a finite-atom law, carried on the
// integer lattice S_k = k*base + span*N. Probabilities below 1e-300 are
// pruned at the edges.
class AtomWalkDP {
 public:
  explicit AtomWalkDP(const std::vector<Atom>& atoms) {
    if (atoms.empty()) raise(errc::argument, "walk DP needs atoms");
    auto lat = detail::lattice_from_atoms(atoms);
    if (!lat) raise(errc::argument, "atoms do not sit on a common lattice");
    span_ = lat->span;
    base_ = atoms.front().value;  // atoms sorted by value in AtomFamily order
    for (const Atom& a : atoms) base_ = std::min(base_, a.value);
    offsets_.reserve(atoms.size());
    probs_.reserve(atoms.size());
    for (const Atom& a : atoms) {
      double d = (a.value - base_) / span_;
      long n = std::lround(d);
      if (std::abs(d - n) > 1e-6) raise(errc::argument, "atom off the detected lattice");
      offsets_.push_back(n);
      probs_.push_back(a.prob);
    }
    pmf_ = {1.0};
    lo_ = 0;
    k_ = 0;
  }

  long k() const { return k_; }
  double span() const { return span_; }

  // value of lattice index n at the current step count
  double value_of(long n) const { return k_ * base_ + span_ * n; }

  void step() {
    long max_off = *std::max_element(offsets_.begin(), offsets_.end());
    std::vector<double> next(pmf_.size() + max_off, 0.0);
    for (std::size_t i = 0; i < pmf_.size(); ++i) {
      double p = pmf_[i];
      if (p == 0.0) continue;
      for (std::size_t a = 0; a < offsets_.size(); ++a)
        next[i + offsets_[a]] += p * probs_[a];
    }
    pmf_ = std::move(next);
    ++k_;
    prune();
  }

  void step_to(long k) {
    while (k_ < k) step();
  }

  // P[S_k > y] (strict) or P[S_k >= y]
  double tail(double y, bool strict) const {
    double t = (y - k_ * base_) / span_ - lo_;
    long n0 = first_index(t, strict);
    double s = 0;
    for (long n = std::max(n0, 0L); n < static_cast<long>(pmf_.size()); ++n) s += pmf_[n];
    return s;
  }

  double cdf_leq(double y) const { return total() - tail(y, /*strict=*/true); }

  double total() const {
    double s = 0;
    for (double p : pmf_) s += p;
    return s;
  }

  // Survival truncations for constrained walks: drop the complement mass.
  void keep_below(double bound, bool strict) {
    double t = (bound - k_ * base_) / span_ - lo_;
    long n0 = first_index(t, /*strict=*/!strict);  // first killed index
    for (long n = std::max(n0, 0L); n < static_cast<long>(pmf_.size()); ++n) pmf_[n] = 0;
    prune();
  }

  void keep_above(double bound, bool strict) {
    double t = (bound - k_ * base_) / span_ - lo_;
    long n0 = first_index(t, strict);  // first surviving index
    long stop = std::min<long>(std::max(n0, 0L), static_cast<long>(pmf_.size()));
    for (long n = 0; n < stop; ++n) pmf_[n] = 0;
    prune();
  }

 private:
  // smallest pmf index whose value exceeds (strict) / reaches (>=) threshold t
  static long first_index(double t, bool strict) {
    const double tol = 1e-9;
    return strict ? static_cast<long>(std::floor(t + tol)) + 1
                  : static_cast<long>(std::ceil(t - tol));
  }

  void prune() {
    std::size_t lead = 0;
    while (lead < pmf_.size() && pmf_[lead] < 1e-300) ++lead;
    std::size_t tail_keep = pmf_.size();
    while (tail_keep > lead && pmf_[tail_keep - 1] < 1e-300) --tail_keep;
    if (lead > 0 || tail_keep < pmf_.size()) {
      std::vector<double> next(pmf_.begin() + lead, pmf_.begin() + tail_keep);
      pmf_ = std::move(next);
      lo_ += lead;
    }
  }

  double span_ = 1;
  double base_ = 0;
  std::vector<long> offsets_;
  std::vector<double> probs_;
  std::vector<double> pmf_;
  long lo_ = 0;  // pmf_[0] corresponds to lattice index lo_
  long k_ = 0;
};

// Exact P[S_k / sqrt(k) > x] (or >=) for finite-atom laws.
inline double exact_walk_tail(const Distribution& dist, long k, double x, bool strict = true) {
  const auto* atoms = dist.atoms();
  if (!atoms) raise(errc::capability, "exact walk tail requires a finite-atom law");
  AtomWalkDP dp(*atoms);
  dp.step_to(k);
  return dp.tail(x * std::sqrt(static_cast<double>(k)), strict);
}

}  // namespace scanlaw

#endif  // SCANLAW_LATTICE_DP_HPP
