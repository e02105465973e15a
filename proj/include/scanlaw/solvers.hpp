#ifndef SCANLAW_SOLVERS_HPP
#define SCANLAW_SOLVERS_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>

#include "scanlaw/errors.hpp"
#include "scanlaw/special.hpp"

namespace scanlaw {

// Root of a strictly increasing f on (lo, hi) by Newton with bisection
// safeguard. f must be finite on the open interval; the bracket is grown/
// shrunk by the caller.
template <class F, class DF>
double newton_increasing(F f, DF df, double x0, double lo, double hi,
                         double xtol = 0, double ftol = 1e-13, int max_iter = 200) {
  double x = std::min(std::max(x0, lo), hi);
  double flo = -kInf, fhi = kInf;  // values implied by monotonicity
  for (int it = 0; it < max_iter; ++it) {
    double fx = f(x);
    if (std::abs(fx) <= ftol) return x;
    if (fx > 0) { hi = x; fhi = fx; } else { lo = x; flo = fx; }
    double d = df(x);
    double step = d > 0 ? fx / d : kNaN;
    double xn = x - step;
    if (!(xn > lo && xn < hi) || !std::isfinite(xn)) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) <= xtol * (1 + std::abs(x))) return xn;
    x = xn;
  }
  (void)flo; (void)fhi;
  return x;
}

// Golden-section maximum of a unimodal f on [a, b].
template <class F>
double golden_section_max(F f, double a, double b, double tol = 1e-12, int max_iter = 300) {
  const double invphi = (std::sqrt(5.0) - 1) / 2;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter && (b - a) > tol * (1 + std::abs(a) + std::abs(b)); ++it) {
    if (f1 < f2) {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + invphi * (b - a); f2 = f(x2);
    } else {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - invphi * (b - a); f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

namespace detail {

// Gauss-Kronrod 15-point nodes/weights on [-1,1] (7-point Gauss embedded).
struct GK15 {
  static constexpr double xgk[8] = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr double wgk[8] = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr double wg[4] = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
};

template <class F>
void gk15(F& f, double a, double b, double& result, double& abserr) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fc = f(c);
  double resg = fc * GK15::wg[3];
  double resk = fc * GK15::wgk[7];
  for (int j = 0; j < 7; ++j) {
    double x = h * GK15::xgk[j];
    double f1 = f(c - x), f2 = f(c + x);
    resk += GK15::wgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += GK15::wg[j / 2] * (f1 + f2);
  }
  result = resk * h;
  abserr = std::abs((resk - resg) * h) * 1.5;
}

}  // namespace detail

struct QuadratureResult {
  double value = 0;
  double abserr = 0;
  bool converged = true;
};

// Adaptive bisection with GK15 panels; absolute tolerance target.
template <class F>
QuadratureResult integrate_adaptive(F f, double a, double b, double abstol = 1e-11,
                                    int max_depth = 48) {
  struct Frame { double a, b; int depth; };
  QuadratureResult out;
  std::function<void(double, double, int, double)> recurse =
      [&](double lo, double hi, int depth, double tol) {
        double v, e;
        detail::gk15(f, lo, hi, v, e);
        if (e <= tol || depth >= max_depth) {
          out.value += v;
          out.abserr += e;
          if (e > tol) out.converged = false;
          return;
        }
        double mid = 0.5 * (lo + hi);
        recurse(lo, mid, depth + 1, tol / 2);
        recurse(mid, hi, depth + 1, tol / 2);
      };
  recurse(a, b, 0, abstol);
  return out;
}

}  // namespace scanlaw

#endif  // SCANLAW_SOLVERS_HPP
