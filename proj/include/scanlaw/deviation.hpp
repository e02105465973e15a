#ifndef SCANLAW_DEVIATION_HPP
#define SCANLAW_DEVIATION_HPP

#include <cmath>

#include "scanlaw/cgf_analysis.hpp"
#include "scanlaw/distribution.hpp"

namespace scanlaw {

// query for P[S_k / sqrt(k) > x]
struct TailQuery {
  long k;
  double x;
};

// eq-cramer form uses the Mills prefactor 1/(sqrt(2 pi) x); eq-cramer1 uses
// the exact normal tail times the Cramer-series correction
enum class CramerForm { mills, phi_bar };

struct TailApprox {
  double value = 0;
  bool clt_flag = false;        // x small, prefactor outside its regime
  bool regime_warning = false;  // x not o(sqrt k) (enforced guide: x < k^0.49)
};

inline TailApprox cramer_tail(const Distribution& dist, const TailQuery& q,
                              CramerForm form = CramerForm::mills) {
  if (q.k < 1 || !(q.x > 0)) raise(errc::argument, "cramer_tail needs k >= 1, x > 0");
  TailApprox out;
  double rk = std::sqrt(static_cast<double>(q.k));
  double s = q.x / rk;
  if (q.x >= std::pow(static_cast<double>(q.k), 0.49)) out.regime_warning = true;
  if (q.x < 1.0) out.clt_flag = true;
  if (form == CramerForm::mills) {
    double I = rate(dist, s).value;
    out.value = std::exp(-q.k * I) / (std::sqrt(2 * M_PI) * q.x);
  } else {
    double lam = cramer_lambda(dist, s);
    out.value = normal_tail(q.x) * std::exp(q.x * q.x * q.x / rk * lam);
  }
  return out;
}

inline double bahadur_rao_tail(const Distribution& dist, const TailQuery& q) {
  if (q.k < 1 || !(q.x > 0)) raise(errc::argument, "bahadur_rao_tail needs k >= 1, x > 0");
  if (dist.lattice())
    raise(errc::capability,
          "Bahadur-Rao prefactor assumes a non-lattice law; " + dist.name() + " is lattice");
  double alpha = q.x / std::sqrt(static_cast<double>(q.k));
  RateEval r = rate(dist, alpha);
  double sigma = std::sqrt(dist.cgf_d2(r.maximizer));
  return std::exp(-q.k * r.value) / (std::sqrt(2 * M_PI * q.k) * r.d1 * sigma);
}

// rigorous bound exp(-k I(x/sqrt k)); never an approximation
inline double chernoff_bound(const Distribution& dist, const TailQuery& q) {
  if (q.k < 1 || !(q.x > 0)) raise(errc::argument, "chernoff_bound needs k >= 1, x > 0");
  double s = q.x / std::sqrt(static_cast<double>(q.k));
  double s_inf = dist.s_sup();
  double tol = 1e-12 * std::max(1.0, std::abs(s_inf));
  if (std::isfinite(s_inf) && s >= s_inf - tol) {
    if (s > s_inf + tol) return 0.0;  // impossible event, I = +inf
    // boundary: I(s_inf) = -log P[X = s_inf] for atom laws
    if (const auto* atoms = dist.atoms()) {
      double p_top = atoms->back().prob;
      return std::exp(q.k * std::log(p_top));
    }
    return 0.0;
  }
  return std::exp(-q.k * rate(dist, s).value);
}

}  // namespace scanlaw

#endif  // SCANLAW_DEVIATION_HPP
