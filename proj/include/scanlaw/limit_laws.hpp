#ifndef SCANLAW_LIMIT_LAWS_HPP
#define SCANLAW_LIMIT_LAWS_HPP

#include <cmath>
#include <string>

#include "scanlaw/cgf_analysis.hpp"
#include "scanlaw/solvers.hpp"

namespace scanlaw {

// Limit law of (1/2) M_n^2 in Gumbel form:
//   P[(1/2) M_n^2 <= location + tau_scale * tau] -> exp(-mass e^-tau).
// The two equivalent centerings log(n log^{(q-6)/(2(q-2))} n) and
// log(n log^{3/2-p} n) coincide because 3/2 - q/(q-2) = (q-6)/(2(q-2));
// the first form is used throughout.
struct GumbelLaw {
  CaseTag tag;
  double mass;       // Lambda_{q,kappa} or Theta*
  double location;   // centering of (1/2) M_n^2
  double tau_scale;  // 1 in the superlogarithmic case, m* in the logarithmic one
  long n;

  double cdf_msq(double x) const {
    return std::exp(-mass * std::exp(-(x / 2 - location) / tau_scale));
  }

  json to_json() const {
    return json{{"case_tag", case_tag_name(tag)},
                {"mass", mass},
                {"location", location},
                {"tau_scale", tau_scale},
                {"n", n}};
  }
};

struct GumbelLocation {
  double location;
  double tau_scale;
};

inline GumbelLocation gumbel_location(const CaseReport& rep, long n) {
  if (n < 3) raise(errc::argument, "n >= 3 required so log log n is defined");
  double logn = std::log(static_cast<double>(n));
  if (rep.tag == CaseTag::superlogarithmic && rep.superlog) {
    double q = rep.superlog->q;
    double alpha = (q - 6) / (2 * (q - 2));
    return {logn + alpha * std::log(logn), 1.0};
  }
  if (rep.tag == CaseTag::logarithmic && rep.log_case)
    return {rep.log_case->m_star * logn, rep.log_case->m_star};
  raise(errc::capability, "gumbel centering requires a superlogarithmic or logarithmic case");
}

inline GumbelLaw make_gumbel_law(const CaseReport& rep, long n) {
  GumbelLocation loc = gumbel_location(rep, n);
  double mass;
  if (rep.tag == CaseTag::superlogarithmic) {
    mass = rep.superlog->lambda_total;
  } else {
    if (!rep.log_case->theta_total)
      raise(errc::capability,
            "Theta* is unset: attach an H* estimate before evaluating the law");
    mass = *rep.log_case->theta_total;
  }
  return GumbelLaw{rep.tag, mass, loc.location, loc.tau_scale, n};
}

inline double limit_cdf_msq(double x, const CaseReport& rep, long n) {
  return make_gumbel_law(rep, n).cdf_msq(x);
}

enum class PValueScale { m_squared, m_linear };

// P[M_n > m] under the limit law. The m_linear flag uses the equivalent
// parameterization 2 sqrt(a_n) (M_n - sqrt(a_n)) with a_n = 2 * location.
inline double pvalue_m(double m, const CaseReport& rep, long n,
                       PValueScale scale = PValueScale::m_squared) {
  if (!(m > 0)) raise(errc::argument, "pvalue_m requires m > 0");
  GumbelLaw law = make_gumbel_law(rep, n);
  double x;
  if (scale == PValueScale::m_squared) {
    x = m * m;
  } else {
    double an = 2 * law.location;
    double tau2 = 2 * std::sqrt(an) * (m - std::sqrt(an));  // ~ m^2 - a_n
    x = an + tau2;
  }
  return 1.0 - law.cdf_msq(x);
}

// scale-contribution density: Lambda_{q,kappa}(a) or Theta(a)
inline double intensity(const CaseReport& rep, double a) {
  if (rep.tag == CaseTag::superlogarithmic && rep.superlog) {
    if (!(a > 0)) raise(errc::domain, "superlogarithmic intensity needs a > 0");
    double q = rep.superlog->q, kappa = rep.superlog->kappa;
    return std::exp(-kappa * std::pow(2.0, q / 2) * std::pow(a, -(q - 2) / 2)) /
           (2 * std::sqrt(M_PI) * a * a);
  }
  if (rep.tag == CaseTag::logarithmic && rep.log_case) {
    const auto& lc = *rep.log_case;
    if (!lc.h_star) raise(errc::capability, "Theta(a) needs an attached H*");
    double h = *lc.h_star;
    return std::sqrt(lc.m_star) * h * h / (2 * std::sqrt(M_PI) * lc.sigma_star) *
           std::exp(-lc.beta_star * lc.beta_star * a * a / 2);
  }
  raise(errc::capability, "intensity is defined for superlogarithmic/logarithmic cases");
}

inline double intensity_integral(const CaseReport& rep, double a1, double a2,
                                 double abstol = 1e-11) {
  if (!(a1 <= a2)) raise(errc::argument, "need A1 <= A2");
  if (a1 == a2) return 0.0;
  QuadratureResult qr;
  if (rep.tag == CaseTag::superlogarithmic) {
    if (a1 < 0) raise(errc::domain, "superlogarithmic scales require A1 >= 0");
    // substitute a = e^u; the integrand decays like e^-u on the right and
    // doubly exponentially on the left
    double u_hi = std::min(std::log(std::max(a2, 1e-300)), 36.0);
    double u_lo = a1 > 0 ? std::log(a1) : -1e9;
    auto f = [&](double u) {
      double a = std::exp(u);
      return intensity(rep, a) * a;
    };
    if (u_lo < -40) {
      double lo = -5;
      while (lo > -2000 && f(lo) > 1e-280) lo -= 5;
      u_lo = std::max(u_lo, lo);
    }
    if (u_hi <= u_lo) return 0.0;
    qr = integrate_adaptive(f, u_lo, u_hi, abstol);
  } else if (rep.tag == CaseTag::logarithmic) {
    const auto& lc = *rep.log_case;
    if (!lc.h_star) raise(errc::capability, "Theta(a) needs an attached H*");
    // gaussian factor kills |a| > ~sqrt(1500)/beta*
    double cap = std::sqrt(1500.0) / lc.beta_star;
    double lo = std::max(a1, -cap), hi = std::min(a2, cap);
    if (hi <= lo) return 0.0;
    auto f = [&](double u) {
      double t = std::tan(u), c = std::cos(u);
      return intensity(rep, t) / (c * c);
    };
    qr = integrate_adaptive(f, std::atan(lo), std::atan(hi), abstol);
  } else {
    raise(errc::capability, "intensity integral needs a superlogarithmic or logarithmic case");
  }
  if (!qr.converged)
    raise(errc::numeric, "quadrature did not reach the requested tolerance (achieved " +
                             std::to_string(qr.abserr) + ")");
  return qr.value;
}

struct OptimalLength {
  std::string form;
  double p_exponent = 0;  // superlogarithmic
  double peak = 0;        // a* (superlog), 0 on the sqrt(log n) scale (log)
  double center = 0;      // d* log n (log case)
  std::string note;

  json to_json() const {
    json j{{"form", form}};
    if (p_exponent != 0) j["p_exponent"] = p_exponent;
    j["peak"] = peak;
    if (center != 0) j["center"] = center;
    if (!note.empty()) j["note"] = note;
    return j;
  }
};

inline OptimalLength optimal_length(const CaseReport& rep, long n) {
  double logn = std::log(static_cast<double>(std::max(n, 3L)));
  switch (rep.tag) {
    case CaseTag::superlogarithmic: {
      OptimalLength o;
      o.form = "a * log^p n";
      o.p_exponent = rep.superlog->p_exponent;
      o.peak = rep.superlog->a_star;
      o.center = rep.superlog->a_star * std::pow(logn, o.p_exponent);
      return o;
    }
    case CaseTag::logarithmic: {
      OptimalLength o;
      o.form = "d* log n + a sqrt(log n)";
      o.peak = 0;
      o.center = rep.log_case->d_star * logn;
      return o;
    }
    case CaseTag::sublogarithmic: {
      OptimalLength o;
      o.form = "O(1)";
      o.peak = 1;
      o.note = "intervals of length 1 dominate under the regular-tail assumption";
      return o;
    }
    case CaseTag::gaussian: {
      OptimalLength o;
      o.form = "a * log n";
      o.note = "gaussian-case law constant not provided here";
      return o;
    }
    default:
      raise(errc::capability, "optimal length undefined for an indeterminate case");
  }
}

struct HittingLaw {
  double survival;       // P[normalized T(u) > y] ~ exp(-mass y)
  double normalization;  // the factor multiplying T(u) at this u
  double mass;
};

inline HittingLaw hitting_cdf(double y, double u, const CaseReport& rep) {
  if (!(y > 0) || !(u > 0)) raise(errc::argument, "hitting_cdf needs y > 0, u > 0");
  if (rep.tag == CaseTag::superlogarithmic) {
    double q = rep.superlog->q;
    double alpha = 0.5 * (q - 6) / (q - 2);
    double norm = std::pow(2.0, -alpha) * std::pow(u, 2 * alpha) * std::exp(-u * u / 2);
    double mass = rep.superlog->lambda_total;
    return {std::exp(-mass * y), norm, mass};
  }
  if (rep.tag == CaseTag::logarithmic) {
    if (!rep.log_case->theta_total)
      raise(errc::capability, "Theta* is unset: attach an H* estimate first");
    double norm = std::exp(-u * u / (2 * rep.log_case->m_star));
    double mass = *rep.log_case->theta_total;
    return {std::exp(-mass * y), norm, mass};
  }
  raise(errc::capability, "hitting law requires a superlogarithmic or logarithmic case");
}

}  // namespace scanlaw

#endif  // SCANLAW_LIMIT_LAWS_HPP
