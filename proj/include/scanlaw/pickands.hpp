#ifndef SCANLAW_PICKANDS_HPP
#define SCANLAW_PICKANDS_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "scanlaw/cgf_analysis.hpp"
#include "scanlaw/distribution.hpp"
#include "scanlaw/lattice_dp.hpp"
#include "scanlaw/solvers.hpp"

namespace scanlaw {

// Two-sided walk attached to a tilt point t of the base law.
//
// Forward increments  Y   = t X - phi(t) with X ~ base; E e^Y = 1, E Y < 0.
// Backward increments Y_- have density e^y against the law of Y, which is the
// same as Y built from the t-tilted law of X; E e^{-Y_-} = 1, E Y_- > 0.
// The Spitzer factors below use P[W_k > 0] for the forward walk and
// P[W_{-k} >= 0] for the backward one, where the backward walk is reflected
// so that both walks drift to -infinity (the bookkeeping identity
// P[W_k = 0] = P[V_k = 0] keeps the strict/non-strict split consistent).
struct TiltedWalk {
  Distribution base;
  double t_star = 0;
  double phi_star = 0;
  double mean_forward = 0;            // E Y = -phi(t)
  double chernoff_rate = 0;           // r: P[W_k>0] and P[V_k<=0] are <= e^{-kr}
  bool nonnegative_drift = false;     // E Y >= 0 (degenerate tilt)
  std::optional<std::vector<Atom>> forward_atoms;   // X-atoms (original probs)
  std::optional<std::vector<Atom>> backward_atoms;  // X-atoms, probs p e^{t x - phi}
};

inline TiltedWalk tilt(const Distribution& base, double t) {
  TiltedWalk tw;
  tw.base = base;
  tw.t_star = t;
  tw.phi_star = base.cgf(t);
  tw.mean_forward = -tw.phi_star;
  tw.nonnegative_drift = !(tw.mean_forward < 0);

  if (const auto* atoms = base.atoms()) {
    tw.forward_atoms = *atoms;
    std::vector<Atom> back = *atoms;
    double total = 0;
    for (Atom& a : back) {
      a.prob *= std::exp(t * a.value - tw.phi_star);
      total += a.prob;
    }
    if (std::abs(total - 1) > 1e-10)
      raise(errc::consistency, "tilted probabilities sum to " + std::to_string(total));
    for (Atom& a : back) a.prob /= total;
    tw.backward_atoms = std::move(back);
  } else if (!base.has_tilted_sampler()) {
    raise(errc::capability, "no tilted sampler for family " + base.name());
  }

  // Chernoff rate of P[W_k > 0]: r = -min_{u in [0,1]} (phi(u t) - u phi(t)).
  // The same r bounds the backward series terms P[V_k <= 0].
  if (t > 0) {
    double u_min = golden_section_max(
        [&](double u) { return -(base.cgf(u * t) - u * tw.phi_star); }, 0.0, 1.0, 1e-12);
    tw.chernoff_rate = -(base.cgf(u_min * t) - u_min * tw.phi_star);
  }
  return tw;
}

inline TiltedWalk tilt_at_tstar(const Distribution& base) {
  auto ts = find_tstar(base);
  if (!ts) raise(errc::capability, "no interior psi maximum: the law is not logarithmic");
  return tilt(base, ts->t_star);
}

struct HStarEstimate {
  double value = 0;
  double std_error = 0;
  std::string method;
  bool degenerate = false;
  json diagnostics;

  json to_json() const {
    json j{{"value", value}, {"stderr", std_error}, {"method", method}};
    if (degenerate) j["degenerate"] = true;
    j["diagnostics"] = diagnostics;
    return j;
  }
};

namespace detail {

// sampler over a fixed atom table (cumulative probabilities)
struct AtomSampler {
  std::vector<double> cum;
  std::vector<double> val;
  explicit AtomSampler(const std::vector<Atom>& atoms) {
    double c = 0;
    for (const Atom& a : atoms) {
      c += a.prob;
      cum.push_back(c);
      val.push_back(a.value);
    }
    cum.back() = 1.0;
  }
  double operator()(Rng& rng) const {
    double u = rng.uniform();
    std::size_t i = std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
    return val[std::min(i, val.size() - 1)];
  }
};

// first index i >= 1 at which the running walk of increments t*x - phi
// violates the predicate; capped at limit+1
template <class Draw>
inline long first_violation(Draw&& draw, double t, double phi, long limit, bool stay_positive) {
  double w = 0;
  for (long i = 1; i <= limit; ++i) {
    w += t * draw() - phi;
    if (stay_positive ? (w <= 0) : (w > 0)) return i;
  }
  return limit + 1;
}

}  // namespace detail

// H* by the defining limit H*(B)/B = (1/B) E max_{k<=B} e^{W_k}.
//
// e^{max W} has a 1/x tail (e^{W_k} is a mean-one martingale), so the naive
// sample mean never sees the mass that makes E e^{L_B} grow like H* B. The
// estimator instead uses the exact first-argmax decomposition
//   E e^{L_B} = sum_{k=0..B} u_k d_{B-k},
//   u_k = P[tilted walk stays > 0 through k],  d_m = P[walk stays <= 0 through m],
// and counts, per replicate, the k in [0, B] whose front/back survival events
// hold. That count is an unbiased estimate of E e^{L_B} with variance O(B^2),
// one tilted and one forward path per replicate. The per-B values are then
// extrapolated as c0 + c1/B over the last three schedule points.
inline HStarEstimate hstar_direct(const TiltedWalk& tw, std::vector<long> schedule, long reps,
                                  std::uint64_t seed, int threads = 1) {
  if (tw.nonnegative_drift)
    raise(errc::consistency, "walk drift is nonnegative; H* requires E Y < 0");
  if (schedule.size() < 3) raise(errc::argument, "B schedule needs at least three points");
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (schedule[i] <= schedule[i - 1]) raise(errc::argument, "B schedule must increase");
  if (reps < 1000) raise(errc::argument, "reps >= 1000 required");

  const std::size_t nb = schedule.size();
  const long B_max = schedule.back();
  std::vector<double> per_path(reps * nb);
  std::optional<detail::AtomSampler> fwd_s, bwd_s;
  if (tw.forward_atoms) {
    fwd_s.emplace(*tw.forward_atoms);
    bwd_s.emplace(*tw.backward_atoms);
  }
  auto worker = [&](long lo, long hi) {
    std::vector<double> buf;
    for (long p = lo; p < hi; ++p) {
      Rng rng(seed, static_cast<std::uint64_t>(p) + 1);
      long tau_front, tau_back;
      if (fwd_s) {
        tau_front = detail::first_violation([&] { return (*bwd_s)(rng); }, tw.t_star,
                                            tw.phi_star, B_max, /*stay_positive=*/true);
        tau_back = detail::first_violation([&] { return (*fwd_s)(rng); }, tw.t_star,
                                           tw.phi_star, B_max, /*stay_positive=*/false);
      } else {
        buf.resize(1);
        auto draw_tilted = [&] {
          tw.base.sample_tilted_into(tw.t_star, rng, std::span<double>(buf.data(), 1));
          return buf[0];
        };
        auto draw_plain = [&] {
          tw.base.sample_into(rng, std::span<double>(buf.data(), 1));
          return buf[0];
        };
        tau_front = detail::first_violation(draw_tilted, tw.t_star, tw.phi_star, B_max, true);
        tau_back = detail::first_violation(draw_plain, tw.t_star, tw.phi_star, B_max, false);
      }
      for (std::size_t b = 0; b < nb; ++b) {
        long B = schedule[b];
        long k_hi = std::min(tau_front - 1, B);
        long k_lo = std::max(0L, B - (tau_back - 1));
        long count = std::max(0L, k_hi - k_lo + 1);
        per_path[p * nb + b] = static_cast<double>(count) / B;
      }
    }
  };
  if (threads <= 1) {
    worker(0, reps);
  } else {
    std::vector<std::thread> pool;
    long chunk = (reps + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      long lo = t * chunk, hi = std::min<long>(reps, lo + chunk);
      if (lo < hi) pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  // per-B means and standard errors for diagnostics
  std::vector<double> mean_b(nb, 0.0), se_b(nb, 0.0);
  for (long p = 0; p < reps; ++p)
    for (std::size_t b = 0; b < nb; ++b) mean_b[b] += per_path[p * nb + b];
  for (double& m : mean_b) m /= reps;
  for (long p = 0; p < reps; ++p)
    for (std::size_t b = 0; b < nb; ++b) {
      double d = per_path[p * nb + b] - mean_b[b];
      se_b[b] += d * d;
    }
  for (double& v : se_b) v = std::sqrt(v / (reps - 1.0) / reps);

  // extrapolate c0 + c1/B on the last three points, batched for the stderr
  auto extrapolate = [&](const std::vector<double>& means) {
    double S0 = 0, S1 = 0, S2 = 0, T0 = 0, T1 = 0;
    for (std::size_t b = nb - 3; b < nb; ++b) {
      double x = 1.0 / schedule[b], y = means[b];
      S0 += 1;
      S1 += x;
      S2 += x * x;
      T0 += y;
      T1 += x * y;
    }
    return (S2 * T0 - S1 * T1) / (S0 * S2 - S1 * S1);
  };

  const int n_batches = 16;
  std::vector<double> batch_vals;
  long per = reps / n_batches;
  for (int g = 0; g < n_batches; ++g) {
    long lo = g * per, hi = (g == n_batches - 1) ? reps : lo + per;
    std::vector<double> means(nb, 0.0);
    for (long p = lo; p < hi; ++p)
      for (std::size_t b = 0; b < nb; ++b) means[b] += per_path[p * nb + b];
    for (double& m : means) m /= (hi - lo);
    batch_vals.push_back(extrapolate(means));
  }
  double mean = 0;
  for (double v : batch_vals) mean += v;
  mean /= n_batches;
  double var = 0;
  for (double v : batch_vals) var += (v - mean) * (v - mean);
  var /= (n_batches - 1);

  HStarEstimate est;
  est.value = extrapolate(mean_b);
  est.std_error = std::sqrt(var / n_batches);
  est.method = "direct(B=" + std::to_string(schedule.back()) + ")";
  est.degenerate = est.value <= 0 || est.std_error == 0;
  if (est.value <= 0) est.value = 0;
  est.diagnostics = json::object();
  est.diagnostics["B"] = schedule;
  est.diagnostics["mean_per_B"] = mean_b;
  est.diagnostics["se_per_B"] = se_b;
  return est;
}

struct SpitzerConfig {
  long reps = 200000;         // Monte Carlo paths when no exact DP is possible
  double precision = 1e-4;    // acceptable truncation remainder
  bool force_monte_carlo = false;
};

// H* = R+ R- with
//   R+ = exp{-sum_{k<=K} P[W_k > 0]/k},  R- = exp{-sum_{k<=K} P[W_{-k} >= 0]/k},
// where P[W_{-k} >= 0] = P[V_k <= 0] for the tilted partial sums V_k.
// The truncation remainder sum_{k>K} e^{-kr}/k (both series) is added to the
// reported standard error.
inline HStarEstimate hstar_spitzer(const TiltedWalk& tw, long K, const SpitzerConfig& cfg,
                                   std::uint64_t seed) {
  if (K < 16) raise(errc::argument, "K >= 16 required");
  if (tw.nonnegative_drift)
    raise(errc::consistency, "walk drift is nonnegative; H* requires E Y < 0");

  const double r = tw.chernoff_rate;
  double remainder = kInf;
  if (r > 0) {
    double q = std::exp(-r);
    remainder = std::pow(q, K + 1) / ((K + 1) * (1 - q));
  }
  if (!(2 * remainder < cfg.precision))
    raise(errc::precision,
          "truncation remainder " + std::to_string(remainder) +
              " exceeds the requested precision; increase K");

  std::vector<double> p_fwd(K + 1, 0.0), p_bwd(K + 1, 0.0);
  bool exact = tw.forward_atoms && !cfg.force_monte_carlo;
  double mc_stderr = 0;

  if (exact) {
    AtomWalkDP fwd(*tw.forward_atoms);
    AtomWalkDP bwd(*tw.backward_atoms);
    const double c = tw.phi_star / tw.t_star;  // W_k > 0 iff S_k > k c
    for (long k = 1; k <= K; ++k) {
      fwd.step();
      bwd.step();
      p_fwd[k] = fwd.tail(k * c, /*strict=*/true);
      p_bwd[k] = bwd.cdf_leq(k * c);  // P[V_k <= 0] = P[S~_k <= k c]
    }
  } else {
    // one pass of path simulation per side; batched for an honest stderr
    const int n_batches = 16;
    const long reps = std::max<long>(cfg.reps, 1000);
    std::vector<double> batch_log(n_batches, 0.0);
    std::vector<long> cnt_fwd(K + 1, 0), cnt_bwd(K + 1, 0);
    std::vector<std::vector<long>> bf(n_batches, std::vector<long>(K + 1, 0)),
        bb(n_batches, std::vector<long>(K + 1, 0));
    std::vector<double> buf(K);
    for (long p = 0; p < reps; ++p) {
      int g = static_cast<int>(p % n_batches);
      Rng rf(seed, 2 * static_cast<std::uint64_t>(p) + 1);
      tw.base.sample_into(rf, buf);
      double w = 0;
      for (long k = 1; k <= K; ++k) {
        w += tw.t_star * buf[k - 1] - tw.phi_star;
        if (w > 0) {
          ++cnt_fwd[k];
          ++bf[g][k];
        }
      }
      Rng rb(seed, 2 * static_cast<std::uint64_t>(p) + 2);
      tw.base.sample_tilted_into(tw.t_star, rb, buf);
      double v = 0;
      for (long k = 1; k <= K; ++k) {
        v += tw.t_star * buf[k - 1] - tw.phi_star;
        if (v <= 0) {
          ++cnt_bwd[k];
          ++bb[g][k];
        }
      }
    }
    for (long k = 1; k <= K; ++k) {
      p_fwd[k] = static_cast<double>(cnt_fwd[k]) / reps;
      p_bwd[k] = static_cast<double>(cnt_bwd[k]) / reps;
    }
    // batch spread of log(R+ R-)
    std::vector<double> vals(n_batches);
    double meanv = 0;
    for (int g = 0; g < n_batches; ++g) {
      double lsum = 0;
      long nrep = reps / n_batches + ((g < reps % n_batches) ? 1 : 0);
      for (long k = 1; k <= K; ++k)
        lsum += (static_cast<double>(bf[g][k]) / nrep + static_cast<double>(bb[g][k]) / nrep) / k;
      vals[g] = lsum;
      meanv += lsum;
    }
    meanv /= n_batches;
    double var = 0;
    for (double v : vals) var += (v - meanv) * (v - meanv);
    var /= (n_batches - 1);
    mc_stderr = std::sqrt(var / n_batches);  // on the log scale
  }

  double log_rp = 0, log_rm = 0;
  for (long k = 1; k <= K; ++k) {
    log_rp -= p_fwd[k] / k;
    log_rm -= p_bwd[k] / k;
  }
  HStarEstimate est;
  est.value = std::exp(log_rp + log_rm);
  est.std_error = est.value * (2 * remainder + mc_stderr);
  est.method = std::string("spitzer(K=") + std::to_string(K) + (exact ? ", exact_dp)" : ", mc)");
  est.diagnostics = json::object();
  est.diagnostics["R_plus"] = std::exp(log_rp);
  est.diagnostics["R_minus"] = std::exp(log_rm);
  est.diagnostics["truncation_remainder"] = remainder;
  est.diagnostics["p_forward"] = std::vector<double>(p_fwd.begin() + 1, p_fwd.end());
  est.diagnostics["p_backward"] = std::vector<double>(p_bwd.begin() + 1, p_bwd.end());
  return est;
}

// P[for all k <= K: W_k < 0 and W_{-k} <= 0] by two independent survival DPs.
// Test hook for the factorization into R+ R-.
inline double joint_survival_dp(const TiltedWalk& tw, long K) {
  if (!tw.forward_atoms) raise(errc::capability, "joint survival DP needs a lattice walk");
  const double c = tw.phi_star / tw.t_star;
  AtomWalkDP fwd(*tw.forward_atoms);
  AtomWalkDP bwd(*tw.backward_atoms);
  for (long k = 1; k <= K; ++k) {
    fwd.step();
    fwd.keep_below(k * c, /*strict=*/true);  // survive W_k < 0
    bwd.step();
    bwd.keep_above(k * c, /*strict=*/false);  // survive V_k >= 0, i.e. W_{-k} <= 0
  }
  return fwd.total() * bwd.total();
}

}  // namespace scanlaw

#endif  // SCANLAW_PICKANDS_HPP
