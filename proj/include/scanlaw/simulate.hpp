#ifndef SCANLAW_SIMULATE_HPP
#define SCANLAW_SIMULATE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "scanlaw/limit_laws.hpp"
#include "scanlaw/scan.hpp"

namespace scanlaw {

enum class WindowPolicy { full, theory, explicit_window };

inline const char* window_policy_name(WindowPolicy p) {
  switch (p) {
    case WindowPolicy::full: return "full";
    case WindowPolicy::theory: return "theory";
    case WindowPolicy::explicit_window: return "explicit";
  }
  return "?";
}

struct SimConfig {
  long n = 1000;
  long reps = 1000;
  WindowPolicy policy = WindowPolicy::theory;
  long h1 = 0, h2 = 0;  // explicit policy only
  std::uint64_t seed = 0;
  int threads = 1;
  long audit_stride = 100;  // theory policy: re-scan every audit_stride-th replicate
};

namespace detail {

inline std::vector<std::pair<long, long>> merge_bands(std::vector<std::pair<long, long>> bands,
                                                      long n) {
  for (auto& b : bands) {
    b.first = std::max(1L, b.first);
    b.second = std::min(n, b.second);
  }
  std::sort(bands.begin(), bands.end());
  std::vector<std::pair<long, long>> out;
  for (const auto& b : bands) {
    if (b.second < b.first) continue;
    if (!out.empty() && b.first <= out.back().second + 1)
      out.back().second = std::max(out.back().second, b.second);
    else
      out.push_back(b);
  }
  if (out.empty()) raise(errc::argument, "window policy produced no valid bands");
  return out;
}

// safety-margin windows around the case's optimal lengths; short lengths up
// to log n are always kept
inline std::vector<std::pair<long, long>> theory_bands(const CaseReport& rep, long n,
                                                       double widen = 1.0) {
  double L = std::log(static_cast<double>(n));
  std::vector<std::pair<long, long>> bands;
  bands.push_back({1, static_cast<long>(std::ceil(widen * L))});
  switch (rep.tag) {
    case CaseTag::superlogarithmic: {
      double lp = std::pow(L, rep.superlog->p_exponent);
      double astar = rep.superlog->a_star;
      bands.push_back({static_cast<long>(std::floor(astar / (16 * widen) * lp)),
                       static_cast<long>(std::ceil(astar * 16 * widen * lp))});
      break;
    }
    case CaseTag::logarithmic: {
      // Theta(a) has scale 1/beta* on the sqrt(log n) axis; cover 4 sigma
      double half = std::max(8.0, 5.0 / rep.log_case->beta_star);
      double c = rep.log_case->d_star * L, w = half * widen * std::sqrt(L);
      bands.push_back({static_cast<long>(std::floor(c - w)), static_cast<long>(std::ceil(c + w))});
      break;
    }
    case CaseTag::sublogarithmic:
      bands.back().second = static_cast<long>(std::ceil(4 * widen * L));
      break;
    case CaseTag::gaussian:
      bands.back().second = static_cast<long>(std::ceil(32 * widen * L));
      break;
    default:
      raise(errc::capability, "no theory window for an indeterminate case");
  }
  return merge_bands(std::move(bands), n);
}

}  // namespace detail

struct SimulationSummary {
  long n = 0;
  long reps = 0;
  std::string policy;
  std::vector<std::pair<long, long>> bands;
  std::vector<double> values;       // M_n per replicate
  std::vector<long> argmax_lengths;
  std::optional<double> ks;         // against the attached limit law, when available
  double u_fraction = 0;            // fraction of replicates with M_n = max single step
  long audit_checked = 0;
  long audit_disagreements = 0;
  std::uint64_t seed = 0;

  json to_json() const {
    json j{{"n", n},
           {"reps", reps},
           {"policy", policy},
           {"values", values},
           {"argmax_lengths", argmax_lengths},
           {"u_fraction", u_fraction},
           {"audit_checked", audit_checked},
           {"audit_disagreements", audit_disagreements},
           {"seed", seed}};
    json jb = json::array();
    for (auto& b : bands) jb.push_back({b.first, b.second});
    j["bands"] = jb;
    if (ks) j["ks"] = *ks;
    return j;
  }
};

// sup-norm distance between the empirical CDF of samples and cdf
template <class Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf) {
  if (samples.empty()) raise(errc::argument, "ks_statistic needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double f = cdf(samples[i]);
    d = std::max(d, std::max(f - i / n, (i + 1) / n - f));
  }
  return d;
}

inline SimulationSummary run_mn_experiment(const Distribution& dist, const CaseReport& rep,
                                           const SimConfig& cfg) {
  if (cfg.reps < 100) raise(errc::argument, "reps >= 100 required");
  if (cfg.n < 8) raise(errc::argument, "n >= 8 required");

  std::vector<std::pair<long, long>> bands, audit_bands;
  switch (cfg.policy) {
    case WindowPolicy::full:
      if (cfg.n > 20000)
        raise(errc::resource,
              "full scan at n > 2e4 is quadratic; use the theory window policy");
      bands = {{1, cfg.n}};
      break;
    case WindowPolicy::theory:
      bands = detail::theory_bands(rep, cfg.n);
      audit_bands = detail::theory_bands(rep, cfg.n, 2.0);
      break;
    case WindowPolicy::explicit_window:
      bands = detail::merge_bands({{cfg.h1, cfg.h2}}, cfg.n);
      break;
  }

  SimulationSummary out;
  out.n = cfg.n;
  out.reps = cfg.reps;
  out.policy = window_policy_name(cfg.policy);
  out.bands = bands;
  out.seed = cfg.seed;
  out.values.resize(cfg.reps);
  out.argmax_lengths.resize(cfg.reps);
  std::vector<unsigned char> u_hit(cfg.reps, 0), audited(cfg.reps, 0), disagreed(cfg.reps, 0);

  auto worker = [&](long lo, long hi) {
    std::vector<double> data(cfg.n);
    for (long r = lo; r < hi; ++r) {
      Rng rng(cfg.seed, static_cast<std::uint64_t>(r) + 1);
      dist.sample_into(rng, data);
      PrefixSums ps(data);
      ScanResult sr = scan_bands(ps, bands);
      out.values[r] = sr.value;
      out.argmax_lengths[r] = sr.length;
      double umax = data[0];
      for (double x : data) umax = std::max(umax, x);
      u_hit[r] = sr.value <= umax * (1 + 1e-12) + 1e-12 ? 1 : 0;
      if (!audit_bands.empty() && r % cfg.audit_stride == 0) {
        audited[r] = 1;
        ScanResult wide = scan_bands(ps, audit_bands);
        if (std::abs(wide.value - sr.value) > 1e-9 * std::max(1.0, std::abs(sr.value)))
          disagreed[r] = 1;
      }
    }
  };
  if (cfg.threads <= 1) {
    worker(0, cfg.reps);
  } else {
    std::vector<std::thread> pool;
    long chunk = (cfg.reps + cfg.threads - 1) / cfg.threads;
    for (int t = 0; t < cfg.threads; ++t) {
      long lo = t * chunk, hi = std::min<long>(cfg.reps, lo + chunk);
      if (lo < hi) pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  long uc = 0;
  for (auto v : u_hit) uc += v;
  out.u_fraction = static_cast<double>(uc) / cfg.reps;
  for (long r = 0; r < cfg.reps; ++r) {
    out.audit_checked += audited[r];
    out.audit_disagreements += disagreed[r];
  }

  // KS distance against the attached limit law when it is computable
  bool has_law = (rep.tag == CaseTag::superlogarithmic) ||
                 (rep.tag == CaseTag::logarithmic && rep.log_case->theta_total);
  if (has_law) {
    GumbelLaw law = make_gumbel_law(rep, cfg.n);
    out.ks = ks_statistic(out.values, [&](double m) { return law.cdf_msq(m * m); });
  }
  return out;
}

struct LengthProfile {
  std::vector<double> bin_edges;
  std::vector<long> counts;
  double rescaled_median = 0;
  std::string scale;

  json to_json() const {
    return json{{"bin_edges", bin_edges},
                {"counts", counts},
                {"rescaled_median", rescaled_median},
                {"scale", scale}};
  }
};

// histogram of argmax lengths on the case's natural scale
inline LengthProfile argmax_length_profile(const SimulationSummary& summary,
                                           const CaseReport& rep, long n) {
  if (summary.values.empty() || summary.argmax_lengths.empty())
    raise(errc::argument, "summary holds no replicates");
  if (summary.n != n) raise(errc::argument, "summary was generated for a different n");
  double L = std::log(static_cast<double>(n));
  LengthProfile prof;
  std::vector<double> rescaled(summary.argmax_lengths.size());
  switch (rep.tag) {
    case CaseTag::superlogarithmic: {
      double lp = std::pow(L, rep.superlog->p_exponent);
      prof.scale = "length / log^p n";
      for (std::size_t i = 0; i < rescaled.size(); ++i)
        rescaled[i] = summary.argmax_lengths[i] / lp;
      break;
    }
    case CaseTag::logarithmic: {
      prof.scale = "(length - d* log n) / sqrt(log n)";
      double c = rep.log_case->d_star * L, w = std::sqrt(L);
      for (std::size_t i = 0; i < rescaled.size(); ++i)
        rescaled[i] = (summary.argmax_lengths[i] - c) / w;
      break;
    }
    default: {
      prof.scale = "length";
      for (std::size_t i = 0; i < rescaled.size(); ++i)
        rescaled[i] = static_cast<double>(summary.argmax_lengths[i]);
      break;
    }
  }
  std::vector<double> sorted(rescaled);
  std::sort(sorted.begin(), sorted.end());
  std::size_t mid = sorted.size() / 2;
  prof.rescaled_median =
      sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);

  const int nbins = 40;
  double lo = sorted.front(), hi = sorted.back();
  if (hi <= lo) hi = lo + 1;
  prof.bin_edges.resize(nbins + 1);
  prof.counts.assign(nbins, 0);
  for (int b = 0; b <= nbins; ++b) prof.bin_edges[b] = lo + (hi - lo) * b / nbins;
  for (double v : rescaled) {
    int b = std::min<int>(nbins - 1, static_cast<int>((v - lo) / (hi - lo) * nbins));
    prof.counts[std::max(0, b)]++;
  }
  return prof;
}

}  // namespace scanlaw

#endif  // SCANLAW_SIMULATE_HPP
