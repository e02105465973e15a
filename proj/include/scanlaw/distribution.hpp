#ifndef SCANLAW_DISTRIBUTION_HPP
#define SCANLAW_DISTRIBUTION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "scanlaw/errors.hpp"
#include "scanlaw/rng.hpp"
#include "scanlaw/special.hpp"

namespace scanlaw {

using json = nlohmann::json;

struct Atom {
  double value;
  double prob;
};

// Support contained in span*Z + offset, offset canonicalized into [0, span).
struct Lattice {
  double span;
  double offset;
};

namespace detail {

inline double real_gcd(double a, double b, double tol) {
  a = std::abs(a);
  b = std::abs(b);
  while (b > tol) {
    double r = std::fmod(a, b);
    if (r > b - tol) r = 0;  // fmod landed just under b
    a = b;
    b = r;
  }
  return a;
}

inline std::optional<Lattice> lattice_from_atoms(const std::vector<Atom>& atoms) {
  if (atoms.size() < 2) return Lattice{1.0, atoms.empty() ? 0.0 : std::fmod(atoms[0].value, 1.0)};
  const double tol = 1e-12;
  double g = 0;
  for (std::size_t i = 1; i < atoms.size(); ++i)
    g = real_gcd(g, atoms[i].value - atoms[0].value, tol);
  if (g <= tol) return std::nullopt;
  double off = std::fmod(atoms[0].value, g);
  if (off < 0) off += g;
  if (off > g - tol) off = 0;
  return Lattice{g, off};
}

// kappa_n from raw moments: k_n = m_n - sum_{j=1}^{n-1} C(n-1,j-1) k_j m_{n-j}
inline std::vector<double> cumulants_from_moments(const std::vector<double>& m) {
  const std::size_t n = m.size();  // m[j] = E X^{j+1}
  std::vector<double> k(n);
  std::vector<std::vector<double>> binom(n + 1, std::vector<double>(n + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) {
    binom[i][0] = 1;
    for (std::size_t j = 1; j <= i; ++j)
      binom[i][j] = binom[i - 1][j - 1] + (j <= i - 1 ? binom[i - 1][j] : 0);
  }
  for (std::size_t order = 1; order <= n; ++order) {
    double v = m[order - 1];
    for (std::size_t j = 1; j < order; ++j)
      v -= binom[order - 1][j - 1] * k[j - 1] * m[order - j - 1];
    k[order - 1] = v;
  }
  return k;
}

}  // namespace detail

// One member of the catalog. All implementations are standardized to
// E X = 0, Var X = 1 at construction time.
class Family {
 public:
  virtual ~Family() = default;

  virtual std::string name() const = 0;
  virtual double cgf(double t) const = 0;
  virtual double cgf_d1(double t) const = 0;
  virtual double cgf_d2(double t) const = 0;
  virtual double cumulant(int order) const = 0;

  // open cgf domain (t_lo, t_hi); catalog laws have t_lo = -inf
  virtual double t_lo() const { return -kInf; }
  virtual double t_hi() const { return kInf; }
  // right endpoint of the support (s_infinity)
  virtual double s_sup() const = 0;

  virtual std::optional<Lattice> lattice() const = 0;
  virtual const std::vector<Atom>* atoms() const { return nullptr; }

  virtual void sample_into(Rng& rng, std::span<double> out) const = 0;
  virtual bool has_tilted_sampler() const { return false; }
  virtual void sample_tilted_into(double /*t*/, Rng& /*rng*/, std::span<double> /*out*/) const {
    raise(errc::capability, "tilted sampling not available for family " + name());
  }

  // (alpha, D) of lim x^-alpha log P[X>x] = -D, when the catalog knows it
  virtual std::optional<std::pair<double, double>> sublog_tail() const { return std::nullopt; }
};

// ---------------------------------------------------------------------------
// finite-support laws share the log-sum-exp cgf machinery

class AtomFamily : public Family {
 public:
  AtomFamily(std::string name, std::vector<Atom> atoms) : name_(std::move(name)) {
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.value < b.value; });
    atoms_ = std::move(atoms);
    cum_.resize(atoms_.size());
    double c = 0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      c += atoms_[i].prob;
      cum_[i] = c;
    }
    cum_.back() = 1.0;
    // raw moments, exact
    std::vector<double> mom(16, 0.0);
    for (const Atom& a : atoms_) {
      double p = a.value;
      for (std::size_t j = 0; j < mom.size(); ++j) {
        mom[j] += a.prob * p;
        p *= a.value;
      }
    }
    cumulants_ = detail::cumulants_from_moments(mom);
  }

  std::string name() const override { return name_; }

  double cgf(double t) const override {
    double amax = -kInf;
    for (const Atom& a : atoms_) amax = std::max(amax, t * a.value + std::log(a.prob));
    double s = 0;
    for (const Atom& a : atoms_) s += std::exp(t * a.value + std::log(a.prob) - amax);
    return amax + std::log(s);
  }

  double cgf_d1(double t) const override { return tilted_stats(t).first; }
  double cgf_d2(double t) const override { return tilted_stats(t).second; }

  double cumulant(int order) const override {
    if (order < 1 || order > static_cast<int>(cumulants_.size()))
      raise(errc::capability, "cumulant order " + std::to_string(order) + " unsupported");
    return cumulants_[order - 1];
  }

  double s_sup() const override { return atoms_.back().value; }
  std::optional<Lattice> lattice() const override { return detail::lattice_from_atoms(atoms_); }
  const std::vector<Atom>* atoms() const override { return &atoms_; }

  void sample_into(Rng& rng, std::span<double> out) const override {
    for (double& x : out) x = draw(rng.uniform(), cum_);
  }

  bool has_tilted_sampler() const override { return true; }

  void sample_tilted_into(double t, Rng& rng, std::span<double> out) const override {
    const double phi = cgf(t);
    std::vector<double> tc(atoms_.size());
    double c = 0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      c += atoms_[i].prob * std::exp(t * atoms_[i].value - phi);
      tc[i] = c;
    }
    tc.back() = 1.0;
    for (double& x : out) x = draw(rng.uniform(), tc);
  }

 private:
  double draw(double u, const std::vector<double>& c) const {
    std::size_t i = std::lower_bound(c.begin(), c.end(), u) - c.begin();
    return atoms_[std::min(i, atoms_.size() - 1)].value;
  }

  // mean and variance under the exponentially tilted weights
  std::pair<double, double> tilted_stats(double t) const {
    double amax = -kInf;
    for (const Atom& a : atoms_) amax = std::max(amax, t * a.value + std::log(a.prob));
    double w = 0, wx = 0, wxx = 0;
    for (const Atom& a : atoms_) {
      double e = std::exp(t * a.value + std::log(a.prob) - amax);
      w += e;
      wx += e * a.value;
      wxx += e * a.value * a.value;
    }
    double mean = wx / w;
    return {mean, std::max(0.0, wxx / w - mean * mean)};
  }

  std::string name_;
  std::vector<Atom> atoms_;
  std::vector<double> cum_;
  std::vector<double> cumulants_;
};

// ---------------------------------------------------------------------------

class GaussianFamily : public Family {
 public:
  std::string name() const override { return "gaussian"; }
  double cgf(double t) const override { return 0.5 * t * t; }
  double cgf_d1(double t) const override { return t; }
  double cgf_d2(double) const override { return 1.0; }
  double cumulant(int order) const override {
    if (order < 1) raise(errc::capability, "bad cumulant order");
    return order == 2 ? 1.0 : 0.0;
  }
  double s_sup() const override { return kInf; }
  std::optional<Lattice> lattice() const override { return std::nullopt; }
  void sample_into(Rng& rng, std::span<double> out) const override {
    for (double& x : out) x = rng.gaussian();
  }
  bool has_tilted_sampler() const override { return true; }
  void sample_tilted_into(double t, Rng& rng, std::span<double> out) const override {
    for (double& x : out) x = t + rng.gaussian();
  }
};

// uniform on [-sqrt(3), sqrt(3)]
class UniformFamily : public Family {
 public:
  std::string name() const override { return "uniform_pm_sqrt3"; }

  double cgf(double t) const override {
    double th = kRoot3 * t;
    double a = std::abs(th);
    if (a < 0.5) {
      // log(sinh x / x) = x^2/6 - x^4/180 + x^6/2835 - x^8/37800 + ...
      double x2 = th * th;
      return x2 * (1.0 / 6 + x2 * (-1.0 / 180 + x2 * (1.0 / 2835 + x2 * (-1.0 / 37800))));
    }
    return a + std::log1p(-std::exp(-2 * a)) - std::log(2 * a);
  }

  double cgf_d1(double t) const override {
    double th = kRoot3 * t;
    if (std::abs(th) < 0.25) {
      double x2 = th * th;
      // coth x - 1/x
      double c = th * (1.0 / 3 + x2 * (-1.0 / 45 + x2 * (2.0 / 945 + x2 * (-1.0 / 4725 + x2 * (2.0 / 93555)))));
      return kRoot3 * c;
    }
    return kRoot3 * (1.0 / std::tanh(th) - 1.0 / th);
  }

  double cgf_d2(double t) const override {
    double th = kRoot3 * t;
    if (std::abs(th) < 0.25) {
      double x2 = th * th;
      // 1/x^2 - csch^2 x
      double c = 1.0 / 3 + x2 * (-1.0 / 15 + x2 * (2.0 / 189 + x2 * (-1.0 / 675)));
      return 3.0 * c;
    }
    double s = std::sinh(th);
    return 3.0 * (1.0 / (th * th) - 1.0 / (s * s));
  }

  double cumulant(int order) const override {
    // kappa_{2k} = 12^k B_{2k} / (2k), odd cumulants vanish
    static const double bern[10] = {1.0 / 6,   -1.0 / 30,    1.0 / 42,      -1.0 / 30,    5.0 / 66,
                                    -691.0 / 2730, 7.0 / 6, -3617.0 / 510, 43867.0 / 798, -174611.0 / 330};
    if (order < 1 || order > 20) raise(errc::capability, "cumulant order unsupported");
    if (order % 2 == 1) return 0.0;
    int k = order / 2;
    return std::pow(12.0, k) * bern[k - 1] / order;
  }

  double s_sup() const override { return kRoot3; }
  std::optional<Lattice> lattice() const override { return std::nullopt; }
  void sample_into(Rng& rng, std::span<double> out) const override {
    for (double& x : out) x = kRoot3 * (2 * rng.uniform() - 1);
  }
  bool has_tilted_sampler() const override { return true; }
  void sample_tilted_into(double t, Rng& rng, std::span<double> out) const override {
    double th = kRoot3 * t;
    if (std::abs(th) < 1e-10) {
      sample_into(rng, out);
      return;
    }
    // inverse CDF of the tilted uniform on [-sqrt3, sqrt3]
    for (double& x : out) {
      double u = rng.uniform();
      double z = std::log((1 - u) * std::exp(-th) + u * std::exp(th)) / th;  // in [-1,1]
      x = kRoot3 * z;
    }
  }

 private:
  static constexpr double kRoot3 = 1.7320508075688772;
};

// standardized exponential X = E - 1, E ~ Exp(1)
class ExponentialFamily : public Family {
 public:
  std::string name() const override { return "exponential_std"; }
  double cgf(double t) const override { return -t - std::log1p(-t); }
  double cgf_d1(double t) const override { return t / (1 - t); }
  double cgf_d2(double t) const override { return 1.0 / ((1 - t) * (1 - t)); }
  double cumulant(int order) const override {
    if (order < 1 || order > 20) raise(errc::capability, "cumulant order unsupported");
    if (order == 1) return 0.0;
    double f = 1;
    for (int j = 2; j < order; ++j) f *= j;  // (order-1)!
    return f;
  }
  double t_hi() const override { return 1.0; }
  double s_sup() const override { return kInf; }
  std::optional<Lattice> lattice() const override { return std::nullopt; }
  void sample_into(Rng& rng, std::span<double> out) const override {
    for (double& x : out) x = rng.exponential() - 1;
  }
  bool has_tilted_sampler() const override { return true; }
  void sample_tilted_into(double t, Rng& rng, std::span<double> out) const override {
    if (t >= 1) raise(errc::domain, "tilt parameter beyond cgf domain (t_sup = 1)");
    for (double& x : out) x = rng.exponential() / (1 - t) - 1;
  }
  std::optional<std::pair<double, double>> sublog_tail() const override {
    return std::make_pair(1.0, 1.0);
  }
};

// standardized Poisson X = (N - rate)/sqrt(rate)
class PoissonFamily : public Family {
 public:
  explicit PoissonFamily(double rate) : rate_(rate), root_(std::sqrt(rate)) {
    if (!(rate > 0) || rate > 500)
      raise(errc::schema, "poisson rate must be in (0, 500]");
  }
  std::string name() const override { return "poisson_std"; }
  double cgf(double t) const override { return rate_ * std::expm1(t / root_) - t * root_; }
  double cgf_d1(double t) const override { return root_ * std::expm1(t / root_); }
  double cgf_d2(double t) const override { return std::exp(t / root_); }
  double cumulant(int order) const override {
    if (order < 1 || order > 20) raise(errc::capability, "cumulant order unsupported");
    if (order == 1) return 0.0;
    return std::pow(rate_, 1.0 - order / 2.0);
  }
  double s_sup() const override { return kInf; }
  std::optional<Lattice> lattice() const override {
    double span = 1.0 / root_;
    double off = std::fmod(-root_, span);
    if (off < 0) off += span;
    return Lattice{span, off};
  }
  void sample_into(Rng& rng, std::span<double> out) const override {
    for (double& x : out) x = (draw_poisson(rng, rate_) - rate_) / root_;
  }
  bool has_tilted_sampler() const override { return true; }
  void sample_tilted_into(double t, Rng& rng, std::span<double> out) const override {
    double lam = rate_ * std::exp(t / root_);
    for (double& x : out) x = (draw_poisson(rng, lam) - rate_) / root_;
  }

 private:
  static double draw_poisson(Rng& rng, double lam) {
    // inversion by sequential search; rate capped at construction
    double u = rng.uniform();
    double p = std::exp(-lam), c = p;
    double k = 0;
    while (u > c && k < 100000) {
      k += 1;
      p *= lam / k;
      c += p;
    }
    return k;
  }

  double rate_;
  double root_;
};

// F^{*m}(z sqrt m): law of (X_1 + ... + X_m)/sqrt(m) for X_i ~ base
class BinomialConvolutionFamily : public Family {
 public:
  BinomialConvolutionFamily(std::shared_ptr<const Family> base, int m)
      : base_(std::move(base)), m_(m), root_(std::sqrt(static_cast<double>(m))) {
    if (m < 1) raise(errc::schema, "convolution power m must be >= 1");
    if (const auto* a = base_->atoms(); a && a->size() <= 64 && m <= 16) {
      std::vector<Atom> acc{{0.0, 1.0}};
      for (int i = 0; i < m_; ++i) acc = convolve(acc, *a);
      for (Atom& at : acc) at.value /= root_;
      atoms_ = std::move(acc);
    }
  }

  std::string name() const override {
    return "binomial_convolution(" + base_->name() + ", " + std::to_string(m_) + ")";
  }
  double cgf(double t) const override { return m_ * base_->cgf(t / root_); }
  double cgf_d1(double t) const override { return root_ * base_->cgf_d1(t / root_); }
  double cgf_d2(double t) const override { return base_->cgf_d2(t / root_); }
  double cumulant(int order) const override {
    return base_->cumulant(order) * std::pow(static_cast<double>(m_), 1.0 - order / 2.0);
  }
  double t_lo() const override { return base_->t_lo() * root_; }
  double t_hi() const override { return base_->t_hi() * root_; }
  double s_sup() const override { return base_->s_sup() * root_; }
  std::optional<Lattice> lattice() const override {
    if (!atoms_.empty()) return detail::lattice_from_atoms(atoms_);
    if (auto lat = base_->lattice()) {
      double span = lat->span / root_;
      double off = std::fmod(m_ * lat->offset / root_, span);
      if (off < 0) off += span;
      return Lattice{span, off};
    }
    return std::nullopt;
  }
  const std::vector<Atom>* atoms() const override { return atoms_.empty() ? nullptr : &atoms_; }

  void sample_into(Rng& rng, std::span<double> out) const override {
    std::vector<double> buf(m_);
    for (double& x : out) {
      base_->sample_into(rng, buf);
      double s = 0;
      for (double v : buf) s += v;
      x = s / root_;
    }
  }
  bool has_tilted_sampler() const override { return base_->has_tilted_sampler(); }
  void sample_tilted_into(double t, Rng& rng, std::span<double> out) const override {
    std::vector<double> buf(m_);
    for (double& x : out) {
      base_->sample_tilted_into(t / root_, rng, buf);
      double s = 0;
      for (double v : buf) s += v;
      x = s / root_;
    }
  }

 private:
  static std::vector<Atom> convolve(const std::vector<Atom>& a, const std::vector<Atom>& b) {
    std::vector<Atom> out;
    out.reserve(a.size() * b.size());
    for (const Atom& x : a)
      for (const Atom& y : b) out.push_back({x.value + y.value, x.prob * y.prob});
    std::sort(out.begin(), out.end(),
              [](const Atom& l, const Atom& r) { return l.value < r.value; });
    std::vector<Atom> merged;
    for (const Atom& at : out) {
      if (!merged.empty() &&
          std::abs(at.value - merged.back().value) <= 1e-12 * (1 + std::abs(at.value)))
        merged.back().prob += at.prob;
      else
        merged.push_back(at);
    }
    return merged;
  }

  std::shared_ptr<const Family> base_;
  int m_;
  double root_;
  std::vector<Atom> atoms_;
};

// (B + delta * U)/sqrt(1 + delta^2) with U ~ uniform_pm_sqrt3 independent of B.
// Smooths a lattice base into a nonlattice law with an analytic cgf.
class JitterFamily : public Family {
 public:
  JitterFamily(std::shared_ptr<const Family> base, double delta)
      : base_(std::move(base)), delta_(delta), c_(std::sqrt(1 + delta * delta)) {
    if (!(delta > 0)) raise(errc::schema, "jitter delta must be > 0");
  }

  std::string name() const override {
    return "jitter(" + base_->name() + ", " + std::to_string(delta_) + ")";
  }
  double cgf(double t) const override {
    return base_->cgf(t / c_) + uni_.cgf(delta_ * t / c_);
  }
  double cgf_d1(double t) const override {
    return base_->cgf_d1(t / c_) / c_ + uni_.cgf_d1(delta_ * t / c_) * delta_ / c_;
  }
  double cgf_d2(double t) const override {
    return base_->cgf_d2(t / c_) / (c_ * c_) +
           uni_.cgf_d2(delta_ * t / c_) * delta_ * delta_ / (c_ * c_);
  }
  double cumulant(int order) const override {
    return (base_->cumulant(order) + std::pow(delta_, order) * uni_.cumulant(order)) /
           std::pow(c_, order);
  }
  double t_lo() const override { return base_->t_lo() * c_; }
  double t_hi() const override { return base_->t_hi() * c_; }
  double s_sup() const override { return (base_->s_sup() + delta_ * uni_.s_sup()) / c_; }
  std::optional<Lattice> lattice() const override { return std::nullopt; }

  void sample_into(Rng& rng, std::span<double> out) const override {
    std::vector<double> u(out.size());
    base_->sample_into(rng, out);
    uni_.sample_into(rng, u);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (out[i] + delta_ * u[i]) / c_;
  }
  bool has_tilted_sampler() const override { return base_->has_tilted_sampler(); }
  void sample_tilted_into(double t, Rng& rng, std::span<double> out) const override {
    // e^{t(b + delta u)/c} factorizes over the independent components
    std::vector<double> u(out.size());
    base_->sample_tilted_into(t / c_, rng, out);
    uni_.sample_tilted_into(delta_ * t / c_, rng, u);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (out[i] + delta_ * u[i]) / c_;
  }

 private:
  std::shared_ptr<const Family> base_;
  UniformFamily uni_;
  double delta_;
  double c_;
};

// ---------------------------------------------------------------------------

// Immutable, cheap to copy, safe to share across threads. Sampling takes an
// explicit Rng; there is no hidden generator state.
class Distribution {
 public:
  Distribution() = default;
  Distribution(std::shared_ptr<const Family> fam, json source)
      : fam_(std::move(fam)), source_(std::move(source)) {}

  const std::string name() const { return fam_->name(); }

  double cgf(double t) const {
    check_domain(t);
    return fam_->cgf(t);
  }
  double cgf_d1(double t) const {
    check_domain(t);
    return fam_->cgf_d1(t);
  }
  double cgf_d2(double t) const {
    check_domain(t);
    return fam_->cgf_d2(t);
  }

  double cumulant(int order) const { return fam_->cumulant(order); }

  double t_lo() const { return fam_->t_lo(); }
  double t_hi() const { return fam_->t_hi(); }
  double s_sup() const { return fam_->s_sup(); }

  std::optional<Lattice> lattice() const { return fam_->lattice(); }
  const std::vector<Atom>* atoms() const { return fam_->atoms(); }
  std::optional<std::pair<double, double>> sublog_tail() const { return fam_->sublog_tail(); }

  void sample_into(Rng& rng, std::span<double> out) const { fam_->sample_into(rng, out); }
  bool has_tilted_sampler() const { return fam_->has_tilted_sampler(); }
  void sample_tilted_into(double t, Rng& rng, std::span<double> out) const {
    fam_->sample_tilted_into(t, rng, out);
  }

  // the parsed spec, re-emitted verbatim in reports
  const json& spec_json() const { return source_; }

 private:
  void check_domain(double t) const {
    if (!(t > fam_->t_lo() && t < fam_->t_hi()))
      raise(errc::domain, "t = " + std::to_string(t) + " outside cgf domain (" +
                              std::to_string(fam_->t_lo()) + ", " +
                              std::to_string(fam_->t_hi()) + ") of " + fam_->name());
  }

  std::shared_ptr<const Family> fam_;
  json source_;
};

// sample(dist, seed, count): deterministic i.i.d. draws from the standardized law
inline std::vector<double> sample(const Distribution& dist, std::uint64_t seed,
                                  std::size_t count, std::uint64_t stream = 0) {
  if (count < 1) raise(errc::argument, "count must be >= 1");
  std::vector<double> out(count);
  Rng rng(seed, stream);
  dist.sample_into(rng, out);
  return out;
}

namespace detail {

inline std::shared_ptr<const Family> build_family(const json& spec);

inline std::vector<Atom> standardized_atoms(std::vector<Atom> atoms) {
  double psum = 0, mu = 0;
  for (const Atom& a : atoms) {
    if (!(a.prob >= 0)) raise(errc::schema, "atom probabilities must be >= 0");
    psum += a.prob;
  }
  if (std::abs(psum - 1.0) > 1e-12) raise(errc::schema, "atom probabilities must sum to 1");
  for (Atom& a : atoms) a.prob /= psum;
  for (const Atom& a : atoms) mu += a.prob * a.value;
  double var = 0;
  for (const Atom& a : atoms) var += a.prob * (a.value - mu) * (a.value - mu);
  if (var <= 0) raise(errc::degenerate, "law has zero variance, cannot standardize");
  double sd = std::sqrt(var);
  for (Atom& a : atoms) a.value = (a.value - mu) / sd;
  return atoms;
}

inline std::shared_ptr<const Family> build_family(const json& spec) {
  if (!spec.is_object() || !spec.contains("family") || !spec["family"].is_string())
    raise(errc::schema, "distribution spec must be {\"family\": ..., \"params\": {...}}");
  const std::string family = spec["family"].get<std::string>();
  const json params = spec.value("params", json::object());

  if (family == "gaussian") return std::make_shared<GaussianFamily>();
  if (family == "uniform_pm_sqrt3") return std::make_shared<UniformFamily>();
  if (family == "exponential_std") return std::make_shared<ExponentialFamily>();
  if (family == "poisson_std") return std::make_shared<PoissonFamily>(params.value("rate", 1.0));
  if (family == "bernoulli_symmetric")
    return std::make_shared<AtomFamily>("bernoulli_symmetric",
                                        std::vector<Atom>{{-1.0, 0.5}, {1.0, 0.5}});
  if (family == "bernoulli") {
    if (!params.contains("p")) raise(errc::schema, "bernoulli requires params.p");
    double p = params["p"].get<double>();
    if (!(p > 0 && p < 1)) raise(errc::schema, "bernoulli p must be in (0,1)");
    // Y in {+1,-1}, P[Y=1]=p, standardized by (Y - (2p-1))/sqrt(4p(1-p))
    double sigma = std::sqrt(4 * p * (1 - p));
    return std::make_shared<AtomFamily>(
        "bernoulli(" + std::to_string(p) + ")",
        std::vector<Atom>{{(-1 - (2 * p - 1)) / sigma, 1 - p}, {(1 - (2 * p - 1)) / sigma, p}});
  }
  if (family == "tabulated") {
    if (!params.contains("atoms") || !params["atoms"].is_array())
      raise(errc::schema, "tabulated requires params.atoms = [[value, prob], ...]");
    std::vector<Atom> atoms;
    for (const auto& row : params["atoms"]) {
      if (!row.is_array() || row.size() != 2) raise(errc::schema, "atom rows are [value, prob]");
      atoms.push_back({row[0].get<double>(), row[1].get<double>()});
    }
    if (atoms.size() < 2) raise(errc::schema, "tabulated law needs at least two atoms");
    return std::make_shared<AtomFamily>("tabulated", standardized_atoms(std::move(atoms)));
  }
  if (family == "binomial_convolution") {
    if (!params.contains("base")) raise(errc::schema, "binomial_convolution requires params.base");
    int m = params.value("m", 2);
    return std::make_shared<BinomialConvolutionFamily>(build_family(params["base"]), m);
  }
  if (family == "jitter") {
    if (!params.contains("base")) raise(errc::schema, "jitter requires params.base");
    double delta = params.value("delta", 0.1);
    return std::make_shared<JitterFamily>(build_family(params["base"]), delta);
  }
  raise(errc::schema, "unknown family '" + family + "'");
}

}  // namespace detail

inline Distribution make_distribution(const json& spec) {
  return Distribution(detail::build_family(spec), spec);
}

inline Distribution make_distribution(const std::string& spec_text) {
  json spec = json::parse(spec_text, nullptr, false);
  if (spec.is_discarded()) raise(errc::schema, "invalid JSON distribution spec");
  return make_distribution(spec);
}

}  // namespace scanlaw

#endif  // SCANLAW_DISTRIBUTION_HPP
