#ifndef SCANLAW_CGF_ANALYSIS_HPP
#define SCANLAW_CGF_ANALYSIS_HPP

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "scanlaw/distribution.hpp"
#include "scanlaw/solvers.hpp"

namespace scanlaw {

// ---------------------------------------------------------------------------
// psi(t) = 2 phi(t) / t^2, the profile whose supremum decides the case

inline double psi(const Distribution& dist, double t) {
  if (!(t > 0)) raise(errc::domain, "psi requires t > 0");
  if (t < 1e-3) {
    // 2 phi(t)/t^2 = 1 + k3 t/3 + k4 t^2/12 + k5 t^3/60 + k6 t^4/360;
    // the direct quotient loses ~t^-2 * 1e-17 to cancellation here
    return 1.0 + t * (dist.cumulant(3) / 3.0 +
                      t * (dist.cumulant(4) / 12.0 +
                           t * (dist.cumulant(5) / 60.0 + t * dist.cumulant(6) / 360.0)));
  }
  return 2.0 * dist.cgf(t) / (t * t);
}

// ---------------------------------------------------------------------------
// Legendre-Fenchel rate I(s) = sup_{t>=0} (st - phi(t))

struct RateEval {
  double s = 0;
  double value = 0;      // I(s)
  double maximizer = 0;  // the t solving phi'(t) = s
  double d1 = 0;         // I'(s) = maximizer
  double d2 = 0;         // I''(s) = 1/phi''(maximizer)
};

namespace detail {

// Taylor inverse of phi' near 0: t(s) = s + a2 s^2 + a3 s^3 + a4 s^4
struct RateSeries {
  double a2, a3, a4;
  explicit RateSeries(const Distribution& d) {
    double k3 = d.cumulant(3), k4 = d.cumulant(4), k5 = d.cumulant(5);
    a2 = -k3 / 2;
    a3 = k3 * k3 / 2 - k4 / 6;
    a4 = -5.0 / 8 * k3 * k3 * k3 + 5.0 / 12 * k3 * k4 - k5 / 24;
  }
};

}  // namespace detail

inline RateEval rate(const Distribution& dist, double s) {
  if (!(s >= 0)) raise(errc::domain, "rate requires s >= 0");
  const double s_inf = dist.s_sup();
  if (s >= s_inf)
    raise(errc::rate_infinite,
          "I(s) = +inf for s >= s_sup = " + std::to_string(s_inf));
  if (s == 0) return RateEval{0, 0, 0, 0, 1.0};

  if (s < 1e-4) {
    // cancellation control near 0 via the cumulant expansion of I
    detail::RateSeries c(dist);
    double t = s + c.a2 * s * s + c.a3 * s * s * s + c.a4 * s * s * s * s;
    double value = s * s / 2 + c.a2 * s * s * s / 3 + c.a3 * s * s * s * s / 4 +
                   c.a4 * s * s * s * s * s / 5;
    return RateEval{s, value, t, t, 1.0 / dist.cgf_d2(t)};
  }

  // bracket the root of phi'(t) = s
  double lo = 0;
  double hi;
  const double t_hi = dist.t_hi();
  if (std::isfinite(t_hi)) {
    hi = t_hi;
    double step = t_hi / 2;
    while (step > 1e-300 && !(dist.cgf_d1(hi - step) > s)) step /= 2;
    if (step <= 1e-300) raise(errc::numeric, "failed to bracket phi'(t) = s near domain end");
    hi -= step;
  } else {
    hi = std::max(1.0, s);
    while (dist.cgf_d1(hi) < s) {
      hi *= 2;
      if (hi > 1e9) raise(errc::numeric, "failed to bracket phi'(t) = s");
    }
  }
  double t = newton_increasing([&](double x) { return dist.cgf_d1(x) - s; },
                               [&](double x) { return dist.cgf_d2(x); },
                               std::min(s, hi), lo, hi, 0.0, 1e-13 * std::max(1.0, s));
  return RateEval{s, s * t - dist.cgf(t), t, t, 1.0 / dist.cgf_d2(t)};
}

// ---------------------------------------------------------------------------
// Cramer series lambda(y) = y^-3 (y^2/2 - I(y))

inline double cramer_lambda(const Distribution& dist, double y) {
  if (!(y > 0)) raise(errc::domain, "cramer_lambda requires y > 0");
  if (y >= dist.s_sup()) raise(errc::rate_infinite, "y beyond right support endpoint");
  if (y < 5e-3) {
    // y^2/2 - I(y) cancels to ~1e-17 absolute, so divide the series instead
    double k3 = dist.cumulant(3), k4 = dist.cumulant(4), k5 = dist.cumulant(5);
    double l0 = k3 / 6;
    double l1 = (k4 - 3 * k3 * k3) / 24;
    double l2 = (k5 - 10 * k3 * k4 + 15 * k3 * k3 * k3) / 120;
    return l0 + l1 * y + l2 * y * y;
  }
  return (y * y / 2 - rate(dist, y).value) / (y * y * y);
}

// ---------------------------------------------------------------------------
// (q, kappa) of phi(t) = t^2/2 - kappa t^q + o(t^q)

struct QKappa {
  int q;
  double kappa;
};

inline std::optional<QKappa> try_extract_qkappa(const Distribution& dist) {
  for (int j = 3; j <= 8; ++j) {
    double kj = dist.cumulant(j);
    if (std::abs(kj) > 1e-10) {
      double fact = 1;
      for (int i = 2; i <= j; ++i) fact *= i;
      return QKappa{j, -kj / fact};
    }
  }
  return std::nullopt;
}

namespace detail {

// least-squares polynomial fit, returns the constant coefficient
inline double polyfit_c0(const std::vector<double>& xs, const std::vector<double>& ys, int deg) {
  const int m = deg + 1;
  std::vector<double> S(2 * m, 0.0), b(m, 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double p = 1;
    for (int d = 0; d < 2 * m; ++d) {
      S[d] += p;
      if (d < m) b[d] += p * ys[i];
      p *= xs[i];
    }
  }
  std::vector<std::vector<double>> A(m, std::vector<double>(m));
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) A[r][c] = S[r + c];
  for (int c = 0; c < m; ++c) {
    int piv = c;
    for (int r = c + 1; r < m; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    std::swap(A[c], A[piv]);
    std::swap(b[c], b[piv]);
    for (int r = c + 1; r < m; ++r) {
      double f = A[r][c] / A[c][c];
      for (int cc = c; cc < m; ++cc) A[r][cc] -= f * A[c][cc];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(m);
  for (int r = m - 1; r >= 0; --r) {
    double v = b[r];
    for (int cc = r + 1; cc < m; ++cc) v -= A[r][cc] * x[cc];
    x[r] = v / A[r][r];
  }
  return x[0];
}

}  // namespace detail

// Independent route: least-squares fit of (I(s)-s^2/2)/s^q = kappa + c1 s + ...
// on s = 2^-k. Dual to the cumulant route via the conjugate Taylor pair.
inline double qkappa_via_rate_fit(const Distribution& dist, int q) {
  std::vector<double> svals, yvals;
  for (int k = 2; k <= 9; ++k) {
    double s = std::ldexp(1.0, -k);
    if (s >= 0.9 * dist.s_sup()) continue;
    double I = rate(dist, s).value;
    svals.push_back(s);
    yvals.push_back((I - s * s / 2) / std::pow(s, q));
  }
  if (svals.size() < 5) raise(errc::numeric, "not enough points for rate-fit of kappa");
  return detail::polyfit_c0(svals, yvals, 3);
}

inline QKappa extract_qkappa(const Distribution& dist) {
  auto qk = try_extract_qkappa(dist);
  if (!qk)
    raise(errc::capability,
          "cumulants 3..8 all vanish: gaussian or undetectable tail order");
  double fitted = qkappa_via_rate_fit(dist, qk->q);
  if (std::abs(fitted - qk->kappa) > 1e-3 * std::max(1.0, std::abs(qk->kappa)))
    raise(errc::consistency, "cumulant and rate-fit routes disagree on kappa");
  return *qk;
}

// ---------------------------------------------------------------------------
// maximizer of psi

struct PsiGridConfig {
  double t_min = 1e-4;
  double t_max_cap = 50.0;
  int points = 4096;
  double boundary_margin = 1e-3;  // stay this relative distance from t_hi
  double tol_ratio = 1e-6;        // m* must exceed 1 + tol_ratio
};

struct TStarResult {
  double t_star;
  double m_star;
  bool multiple_maxima = false;     // second local max within tolerance of the global
  std::vector<double> rival_maxima; // grid locations of the near-global rivals
};

namespace detail {

inline std::vector<double> psi_grid_points(const Distribution& dist, const PsiGridConfig& cfg) {
  double t_max = cfg.t_max_cap;
  if (std::isfinite(dist.t_hi())) t_max = std::min(t_max, dist.t_hi() * (1 - cfg.boundary_margin));
  std::vector<double> ts(cfg.points);
  double la = std::log(cfg.t_min), lb = std::log(t_max);
  for (int i = 0; i < cfg.points; ++i)
    ts[i] = std::exp(la + (lb - la) * i / (cfg.points - 1));
  return ts;
}

}  // namespace detail

inline std::optional<TStarResult> find_tstar(const Distribution& dist,
                                             const PsiGridConfig& cfg = {}) {
  auto ts = detail::psi_grid_points(dist, cfg);
  const int n = static_cast<int>(ts.size());
  std::vector<double> ps(n);
  for (int i = 0; i < n; ++i) ps[i] = psi(dist, ts[i]);

  int imax = 0;
  for (int i = 1; i < n; ++i)
    if (ps[i] > ps[imax]) imax = i;
  if (imax <= 1 || imax >= n - 2) return std::nullopt;  // no interior maximum

  double t_star = golden_section_max([&](double t) { return psi(dist, t); },
                                     ts[imax - 1], ts[imax + 1], 1e-14);
  // Newton polish on the stationarity equation t phi'(t) = 2 phi(t)
  for (int it = 0; it < 8; ++it) {
    double g = t_star * dist.cgf_d1(t_star) - 2 * dist.cgf(t_star);
    double dg = t_star * dist.cgf_d2(t_star) - dist.cgf_d1(t_star);
    if (dg == 0) break;
    double step = g / dg;
    double cand = t_star - step;
    if (!(cand > ts[imax - 1] && cand < ts[imax + 1])) break;
    t_star = cand;
    if (std::abs(step) < 1e-15 * t_star) break;
  }
  double m_star = psi(dist, t_star);
  if (!(m_star > 1 + cfg.tol_ratio)) return std::nullopt;

  double resid = std::abs(t_star * dist.cgf_d1(t_star) - 2 * dist.cgf(t_star));
  if (resid > 1e-8 * std::max(1.0, 2 * dist.cgf(t_star))) return std::nullopt;

  // flag rival local maxima within tolerance of the global value
  TStarResult out{t_star, m_star, false, {}};
  int last_hit = imax;
  for (int i = 1; i + 1 < n; ++i) {
    if (ps[i] >= ps[i - 1] && ps[i] >= ps[i + 1] &&
        ps[i] >= m_star - 1e-6 * std::max(1.0, m_star) && std::abs(i - imax) > 3 &&
        std::abs(i - last_hit) > 3) {
      out.multiple_maxima = true;
      out.rival_maxima.push_back(ts[i]);
      last_hit = i;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// case report

enum class CaseTag { gaussian, superlogarithmic, logarithmic, sublogarithmic, indeterminate };

inline const char* case_tag_name(CaseTag t) {
  switch (t) {
    case CaseTag::gaussian: return "gaussian";
    case CaseTag::superlogarithmic: return "superlogarithmic";
    case CaseTag::logarithmic: return "logarithmic";
    case CaseTag::sublogarithmic: return "sublogarithmic";
    case CaseTag::indeterminate: return "indeterminate";
  }
  return "?";
}

struct SuperlogPayload {
  int q;
  double kappa;
  double p_exponent;   // q/(q-2)
  double a_star;       // argmax of Lambda_{q,kappa}(a)
  double lambda_total; // integral of Lambda_{q,kappa}(a) over (0, inf)
};

struct LogPayload {
  double t_star;
  double m_star;
  double s_star;
  double sigma_star;
  double beta_star;
  double d_star;
  std::optional<double> h_star;       // attached from the Pickands estimators
  std::optional<double> theta_total;  // sqrt(m*) H*^2 / (sqrt(2) beta* sigma*)
};

struct SublogPayload {
  std::optional<double> alpha;  // in [1,2) when known
  std::optional<double> D;      // > 0 when known
};

struct CaseReport {
  CaseTag tag = CaseTag::indeterminate;
  std::optional<SuperlogPayload> superlog;
  std::optional<LogPayload> log_case;
  std::optional<SublogPayload> sublog;
  std::string diagnostics;
  bool unique_max_warning = false;  // grid showed a rival local maximum

  json to_json() const {
    json j;
    j["case"] = case_tag_name(tag);
    if (superlog) {
      j["q"] = superlog->q;
      j["kappa"] = superlog->kappa;
      j["p_exponent"] = superlog->p_exponent;
      j["a_star"] = superlog->a_star;
      j["lambda_total"] = superlog->lambda_total;
    }
    if (log_case) {
      j["t_star"] = log_case->t_star;
      j["m_star"] = log_case->m_star;
      j["s_star"] = log_case->s_star;
      j["sigma_star"] = log_case->sigma_star;
      j["beta_star"] = log_case->beta_star;
      j["d_star"] = log_case->d_star;
      if (log_case->h_star) j["h_star"] = *log_case->h_star;
      if (log_case->theta_total) j["theta_total"] = *log_case->theta_total;
    }
    if (sublog) {
      if (sublog->alpha) j["alpha"] = *sublog->alpha;
      if (sublog->D) j["D"] = *sublog->D;
    }
    if (!diagnostics.empty()) j["diagnostics"] = diagnostics;
    if (unique_max_warning) j["unique_max_warning"] = true;
    return j;
  }
};

// The closed form of int_0^inf Lambda_{q,kappa}(a) da. Note: substituting
// v = 1/a gives (1/(2 sqrt pi)) Gamma(q/(q-2)) (kappa 2^{q/2})^{-2/(q-2)},
// i.e. Gamma(q/(q-2)) (2 kappa)^{-2/(q-2)} / (4 sqrt pi).
inline double lambda_total_closed_form(int q, double kappa) {
  double p = static_cast<double>(q) / (q - 2);
  return std::tgamma(p) * std::pow(2 * kappa, -2.0 / (q - 2)) / (4 * std::sqrt(M_PI));
}

inline double a_star_closed_form(int q, double kappa) {
  return std::pow(2.0, (q - 4.0) / (q - 2.0)) * std::pow(kappa * (q - 2), 2.0 / (q - 2.0));
}

inline LogPayload log_constants(const Distribution& dist, double t_star, double m_star) {
  double phi = dist.cgf(t_star);
  double resid = std::abs(t_star * dist.cgf_d1(t_star) - 2 * phi);
  if (resid > 1e-6 * std::max(1.0, std::abs(2 * phi)))
    raise(errc::consistency, "t_star is not a stationary point of psi (residual " +
                                 std::to_string(resid) + ")");
  LogPayload out;
  out.t_star = t_star;
  out.m_star = m_star;
  out.s_star = dist.cgf_d1(t_star);
  double sigma2 = dist.cgf_d2(t_star);
  out.sigma_star = std::sqrt(sigma2);
  double beta2 = std::pow(out.s_star, 4) / (8 * m_star) * (1 / sigma2 - 1 / m_star);
  if (!(beta2 > 0))
    raise(errc::consistency, "beta_star^2 must be positive, got " + std::to_string(beta2));
  out.beta_star = std::sqrt(beta2);
  out.d_star = 1.0 / phi;
  return out;
}

inline void attach_hstar(CaseReport& report, double h_star) {
  if (report.tag != CaseTag::logarithmic || !report.log_case)
    raise(errc::capability, "H* applies to the logarithmic case only");
  auto& lc = *report.log_case;
  lc.h_star = h_star;
  lc.theta_total = std::sqrt(lc.m_star) * h_star * h_star /
                   (std::sqrt(2.0) * lc.beta_star * lc.sigma_star);
}

inline CaseReport classify(const Distribution& dist, const PsiGridConfig& cfg = {}) {
  CaseReport rep;
  auto ts = detail::psi_grid_points(dist, cfg);
  const int n = static_cast<int>(ts.size());
  std::vector<double> ps(n);
  for (int i = 0; i < n; ++i) ps[i] = psi(dist, ts[i]);

  bool cumulants_vanish = true;
  for (int j = 3; j <= 8; ++j)
    if (std::abs(dist.cumulant(j)) > 1e-10) cumulants_vanish = false;
  double psi_dev = 0;
  for (double v : ps) psi_dev = std::max(psi_dev, std::abs(v - 1));
  if (cumulants_vanish && psi_dev <= 1e-9) {
    rep.tag = CaseTag::gaussian;
    return rep;
  }

  if (auto tstar = find_tstar(dist, cfg)) {
    if (tstar->multiple_maxima) {
      rep.tag = CaseTag::indeterminate;
      std::string locs = "t ~ " + std::to_string(tstar->t_star);
      for (double t : tstar->rival_maxima) locs += ", " + std::to_string(t);
      rep.diagnostics = "psi shows multiple near-global interior maxima at " + locs;
      rep.unique_max_warning = true;
      return rep;
    }
    rep.tag = CaseTag::logarithmic;
    rep.log_case = log_constants(dist, tstar->t_star, tstar->m_star);
    return rep;
  }

  double psi_max = *std::max_element(ps.begin(), ps.end());
  double psi_tail_max = 0;  // sup over the grid away from 0
  for (int i = 0; i < n; ++i)
    if (ts[i] >= 1.0) psi_tail_max = std::max(psi_tail_max, ps[i]);
  bool tail_rising = ps[n - 1] > ps[n - 8];

  if (psi_max <= 1 + 1e-9 && psi_tail_max < 1 - 1e-6 && !tail_rising) {
    auto qk = try_extract_qkappa(dist);
    if (qk && qk->kappa > 0) {
      rep.tag = CaseTag::superlogarithmic;
      rep.superlog = SuperlogPayload{
          qk->q, qk->kappa, static_cast<double>(qk->q) / (qk->q - 2),
          a_star_closed_form(qk->q, qk->kappa), lambda_total_closed_form(qk->q, qk->kappa)};
      return rep;
    }
    rep.tag = CaseTag::indeterminate;
    rep.diagnostics = "psi < 1 on the grid but no detectable cumulant of order 3..8";
    return rep;
  }

  if ((tail_rising && ps[n - 1] > 1 + 1e-6) ||
      (std::isfinite(dist.t_hi()) && ps[n - 1] > 1 + 1e-6)) {
    rep.tag = CaseTag::sublogarithmic;
    SublogPayload sp;
    if (auto tail = dist.sublog_tail()) {
      sp.alpha = tail->first;
      sp.D = tail->second;
    }
    rep.sublog = sp;
    return rep;
  }

  rep.tag = CaseTag::indeterminate;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "psi profile not classifiable: max %.6g, tail max %.6g, tail %s",
                psi_max, psi_tail_max, tail_rising ? "rising" : "flat");
  rep.diagnostics = buf;
  return rep;
}

// ---------------------------------------------------------------------------
// duality identities at (t*, s*)

struct DualityReport {
  double r_sstar;      // |s* - phi'(t*)|
  double r_tstar;      // |t* - I'(s*)|
  double r_curvature;  // |I''(s*) phi''(t*) - 1|
  double r_value;      // |phi(t*) - I(s*)|
  double r_half;       // |I(s*) - s* t* / 2|
  bool pass(double tol = 1e-6) const {
    return r_sstar < tol && r_tstar < tol && r_curvature < tol && r_value < tol && r_half < tol;
  }
  json to_json() const {
    auto fmt = [](double v) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.16e", v);
      return std::string(buf);
    };
    return json{{"r_sstar", fmt(r_sstar)},
                {"r_tstar", fmt(r_tstar)},
                {"r_curvature", fmt(r_curvature)},
                {"r_value", fmt(r_value)},
                {"r_half", fmt(r_half)}};
  }
};

inline DualityReport duality_report(const Distribution& dist, const CaseReport& rep) {
  if (rep.tag != CaseTag::logarithmic || !rep.log_case)
    raise(errc::capability, "duality report is defined for the logarithmic case");
  const auto& lc = *rep.log_case;
  RateEval re = rate(dist, lc.s_star);
  DualityReport d;
  d.r_sstar = std::abs(lc.s_star - dist.cgf_d1(lc.t_star));
  d.r_tstar = std::abs(lc.t_star - re.d1);
  d.r_curvature = std::abs(re.d2 * dist.cgf_d2(lc.t_star) - 1);
  d.r_value = std::abs(dist.cgf(lc.t_star) - re.value);
  d.r_half = std::abs(re.value - lc.s_star * lc.t_star / 2);
  return d;
}

}  // namespace scanlaw

#endif  // SCANLAW_CGF_ANALYSIS_HPP
