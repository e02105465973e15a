#include <doctest.h>

#include <cmath>

#include "scanlaw/cgf_analysis.hpp"

using namespace scanlaw;

namespace {

Distribution dist(const char* text) { return make_distribution(std::string(text)); }

// closed-form rate of the standardized Bernoulli(p):
// I(s) = p(1+gs)log(1+gs) + (1-p)(1-s/g)log(1-s/g), g = sqrt((1-p)/p)
double bernoulli_rate_closed_form(double p, double s) {
  double g = std::sqrt((1 - p) / p);
  double a = 1 + g * s, b = 1 - s / g;
  double ta = a > 0 ? p * a * std::log(a) : 0.0;
  double tb = b > 0 ? (1 - p) * b * std::log(b) : 0.0;
  return ta + tb;
}

}  // namespace

TEST_SUITE("cgf_analysis") {

TEST_CASE("psi profile") {
  auto g = dist(R"({"family":"gaussian"})");
  for (double t : {0.01, 0.5, 3.0, 17.0}) CHECK(psi(g, t) == doctest::Approx(1.0).epsilon(1e-14));

  auto bs = dist(R"({"family":"bernoulli_symmetric"})");
  CHECK(psi(bs, 1.0) == doctest::Approx(2 * std::log(std::cosh(1.0))).epsilon(1e-13));
  CHECK(psi(bs, 1.0) < 1.0);
  CHECK(psi(bs, 1e-9) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(psi(bs, 0.0), Error);
}

TEST_CASE("rate: gaussian closed form") {
  auto g = dist(R"({"family":"gaussian"})");
  auto r = rate(g, 2.0);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.maximizer == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.d1 == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.d2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rate: bernoulli closed form across p and s") {
  for (double p : {0.1, 0.25, 0.5, 0.62, 0.9}) {
    json spec = {{"family", "bernoulli"}, {"params", {{"p", p}}}};
    auto d = make_distribution(spec);
    double s_inf = d.s_sup();
    CHECK(s_inf == doctest::Approx(std::sqrt((1 - p) / p)).epsilon(1e-12));
    for (int i = 1; i <= 40; ++i) {
      double s = 0.9 * s_inf * i / 40.0;
      auto r = rate(d, s);
      CAPTURE(p);
      CAPTURE(s);
      CHECK(std::abs(r.value - bernoulli_rate_closed_form(p, s)) < 1e-10);
      // maximizer solves phi'(t) = s and equals I'(s)
      CHECK(d.cgf_d1(r.maximizer) == doctest::Approx(s).epsilon(1e-9));
      CHECK(r.d1 == r.maximizer);
    }
  }
}

TEST_CASE("rate: boundary and value properties") {
  auto b = dist(R"({"family":"bernoulli","params":{"p":0.3}})");
  CHECK_THROWS_AS(rate(b, b.s_sup()), Error);
  try {
    rate(b, b.s_sup() + 1);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::rate_infinite);
  }
  CHECK(rate(b, 0.0).value == 0.0);
  for (double s = 0.1; s < b.s_sup(); s += 0.2) CHECK(rate(b, s).value >= 0.0);
}

TEST_CASE("legendre-fenchel biconjugacy spot check") {
  auto b = dist(R"({"family":"bernoulli","params":{"p":0.3}})");
  for (double t : {0.3, 0.8, 1.4}) {
    // sup_s (st - I(s)) should recover phi(t)
    double best = -1e300;
    double s_inf = b.s_sup();
    for (int i = 1; i < 4000; ++i) {
      double s = s_inf * i / 4000.0 * 0.999;
      best = std::max(best, s * t - rate(b, s).value);
    }
    CHECK(best == doctest::Approx(b.cgf(t)).epsilon(1e-6));
  }
}

TEST_CASE("cramer series") {
  auto g = dist(R"({"family":"gaussian"})");
  CHECK(cramer_lambda(g, 1.0) == doctest::Approx(0.0).epsilon(1e-12));

  auto bs = dist(R"({"family":"bernoulli_symmetric"})");
  double I = 0.75 * std::log(1.5) + 0.25 * std::log(0.5);
  CHECK(cramer_lambda(bs, 0.5) == doctest::Approx((0.125 - I) / 0.125).epsilon(1e-10));
  CHECK(cramer_lambda(bs, 0.5) == doctest::Approx(-0.046496287529).epsilon(1e-8));

  // y -> 0 limit is kappa3/6; for bernoulli(0.75) this is -(2p-1)/(3 sigma)
  auto b75 = dist(R"({"family":"bernoulli","params":{"p":0.75}})");
  double want = -0.5 / (3 * std::sqrt(0.75));
  CHECK(cramer_lambda(b75, 1e-6) == doctest::Approx(want).epsilon(1e-6));
  // series branch agrees with the direct quotient at the switch point
  double y = 4.99e-3;
  double direct = (y * y / 2 - rate(b75, y).value) / (y * y * y);
  CHECK(cramer_lambda(b75, y) == doctest::Approx(direct).epsilon(1e-6));
}

TEST_CASE("extract_qkappa on the catalog") {
  auto bs = extract_qkappa(dist(R"({"family":"bernoulli_symmetric"})"));
  CHECK(bs.q == 4);
  CHECK(bs.kappa == doctest::Approx(1.0 / 12).epsilon(1e-10));

  auto u = extract_qkappa(dist(R"({"family":"uniform_pm_sqrt3"})"));
  CHECK(u.q == 4);
  CHECK(u.kappa == doctest::Approx(1.0 / 20).epsilon(1e-10));

  auto b75 = extract_qkappa(dist(R"({"family":"bernoulli","params":{"p":0.75}})"));
  CHECK(b75.q == 3);
  CHECK(b75.kappa == doctest::Approx(0.5 / (3 * std::sqrt(0.75))).epsilon(1e-10));

  CHECK_THROWS_AS(extract_qkappa(dist(R"({"family":"gaussian"})")), Error);
}

TEST_CASE("qkappa rate-fit route agrees with the cumulant route") {
  const char* specs[] = {
      R"({"family":"bernoulli_symmetric"})",
      R"({"family":"uniform_pm_sqrt3"})",
      R"({"family":"bernoulli","params":{"p":0.75}})",
      R"({"family":"bernoulli","params":{"p":0.6}})",
  };
  for (const char* s : specs) {
    auto d = dist(s);
    auto qk = try_extract_qkappa(d);
    REQUIRE(qk.has_value());
    double fitted = qkappa_via_rate_fit(d, qk->q);
    CAPTURE(s);
    CHECK(std::abs(fitted - qk->kappa) < 1e-4 * std::max(1.0, std::abs(qk->kappa)));
  }
}

TEST_CASE("find_tstar: absence") {
  CHECK_FALSE(find_tstar(dist(R"({"family":"gaussian"})")).has_value());
  CHECK_FALSE(find_tstar(dist(R"({"family":"bernoulli_symmetric"})")).has_value());
  CHECK_FALSE(find_tstar(dist(R"({"family":"uniform_pm_sqrt3"})")).has_value());
  CHECK_FALSE(find_tstar(dist(R"({"family":"exponential_std"})")).has_value());
}

TEST_CASE("find_tstar: bernoulli(0.3) against a dense brute-force grid") {
  auto b = dist(R"({"family":"bernoulli","params":{"p":0.3}})");
  auto res = find_tstar(b);
  REQUIRE(res.has_value());
  CHECK(res->m_star > 1.0);
  CHECK_FALSE(res->multiple_maxima);

  double best_m = 0, best_t = 0;
  const int N = 1000000;
  for (int i = 1; i <= N; ++i) {
    double t = 20.0 * i / N;
    double m = 2 * b.cgf(t) / (t * t);
    if (m > best_m) {
      best_m = m;
      best_t = t;
    }
  }
  CHECK(res->m_star == doctest::Approx(best_m).epsilon(1e-8));
  CHECK(res->t_star == doctest::Approx(best_t).epsilon(1e-4));
  // stationarity: t phi'(t) = 2 phi(t)
  CHECK(res->t_star * b.cgf_d1(res->t_star) ==
        doctest::Approx(2 * b.cgf(res->t_star)).epsilon(1e-10));
}

TEST_CASE("log_constants identities and failure modes") {
  auto b = dist(R"({"family":"bernoulli","params":{"p":0.3}})");
  auto ts = find_tstar(b);
  REQUIRE(ts.has_value());
  auto lc = log_constants(b, ts->t_star, ts->m_star);
  CHECK(lc.s_star == doctest::Approx(ts->t_star * ts->m_star).epsilon(1e-10));
  CHECK(lc.d_star * b.cgf(ts->t_star) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lc.m_star > 1.0);
  CHECK(lc.beta_star > 0.0);
  CHECK_FALSE(lc.h_star.has_value());

  CHECK_THROWS_AS(log_constants(b, ts->t_star + 0.1, ts->m_star), Error);
}

TEST_CASE("classify: the catalog table") {
  auto r1 = classify(dist(R"({"family":"bernoulli_symmetric"})"));
  CHECK(r1.tag == CaseTag::superlogarithmic);
  REQUIRE(r1.superlog.has_value());
  CHECK(r1.superlog->q == 4);
  CHECK(r1.superlog->kappa == doctest::Approx(1.0 / 12).epsilon(1e-8));
  CHECK(r1.superlog->p_exponent == doctest::Approx(2.0));
  CHECK(r1.superlog->a_star == doctest::Approx(1.0 / 6).epsilon(1e-12));
  // corrected closed form of the total intensity (see README on the
  // Lambda normalization): Gamma(2) (2k)^{-1} / (4 sqrt(pi)) = 1.5/sqrt(pi)
  CHECK(r1.superlog->lambda_total == doctest::Approx(1.5 / std::sqrt(M_PI)).epsilon(1e-12));

  auto r2 = classify(dist(R"({"family":"bernoulli","params":{"p":0.75}})"));
  CHECK(r2.tag == CaseTag::superlogarithmic);
  CHECK(r2.superlog->q == 3);
  CHECK(r2.superlog->p_exponent == doctest::Approx(3.0));

  auto r3 = classify(dist(R"({"family":"bernoulli","params":{"p":0.3}})"));
  CHECK(r3.tag == CaseTag::logarithmic);
  REQUIRE(r3.log_case.has_value());
  CHECK(r3.log_case->m_star > 1);

  CHECK(classify(dist(R"({"family":"gaussian"})")).tag == CaseTag::gaussian);

  auto r4 = classify(dist(R"({"family":"exponential_std"})"));
  CHECK(r4.tag == CaseTag::sublogarithmic);
  REQUIRE(r4.sublog.has_value());
  CHECK(*r4.sublog->alpha == doctest::Approx(1.0));
  CHECK(*r4.sublog->D == doctest::Approx(1.0));

  auto r5 = classify(dist(R"({"family":"poisson_std","params":{"rate":1.0}})"));
  CHECK(r5.tag == CaseTag::sublogarithmic);
  CHECK_FALSE(r5.sublog->alpha.has_value());

  auto r6 = classify(dist(R"({"family":"uniform_pm_sqrt3"})"));
  CHECK(r6.tag == CaseTag::superlogarithmic);
  CHECK(r6.superlog->kappa == doctest::Approx(1.0 / 20).epsilon(1e-8));
}

TEST_CASE("classify: exponential tail constant fit oracle") {
  // standardized exponential survival is exp(-(x+1)): -log P / x -> 1
  for (double x : {20.0, 60.0, 200.0}) {
    double surv = -(x + 1);
    CHECK(-surv / x == doctest::Approx(1.0).epsilon(0.06));
  }
}

TEST_CASE("classify is convolution-invariant") {
  for (int m : {2, 3, 4}) {
    json spec = {{"family", "binomial_convolution"},
                 {"params", {{"m", m}, {"base", {{"family", "bernoulli"}, {"params", {{"p", 0.3}}}}}}}};
    auto rep = classify(make_distribution(spec));
    CAPTURE(m);
    CHECK(rep.tag == CaseTag::logarithmic);
    json spec2 = {{"family", "binomial_convolution"},
                  {"params", {{"m", m}, {"base", {{"family", "bernoulli"}, {"params", {{"p", 0.75}}}}}}}};
    auto rep2 = classify(make_distribution(spec2));
    CHECK(rep2.tag == CaseTag::superlogarithmic);
    CHECK(rep2.superlog->q == 3);
  }
}

TEST_CASE("classify: bernoulli family sweep across the boundary p = 1/2") {
  // p < 1/2 tilts the third cumulant positive (logarithmic), p > 1/2 negative
  // (superlogarithmic, q = 3); margins keep clear of the near-gaussian zone
  for (int i = 1; i <= 8; ++i) {
    double p = 0.05 * i;  // 0.05 .. 0.40
    json spec = {{"family", "bernoulli"}, {"params", {{"p", p}}}};
    auto rep = classify(make_distribution(spec));
    CAPTURE(p);
    CHECK(rep.tag == CaseTag::logarithmic);
    CHECK_FALSE(rep.unique_max_warning);
  }
  for (int i = 12; i <= 19; ++i) {
    double p = 0.05 * i;  // 0.60 .. 0.95
    json spec = {{"family", "bernoulli"}, {"params", {{"p", p}}}};
    auto rep = classify(make_distribution(spec));
    CAPTURE(p);
    CHECK(rep.tag == CaseTag::superlogarithmic);
    CHECK(rep.superlog->q == 3);
  }
}

TEST_CASE("classify: composed families inherit the base regime") {
  // convolution power of a continuous superlogarithmic base
  json conv_u = {{"family", "binomial_convolution"},
                 {"params", {{"m", 3}, {"base", {{"family", "uniform_pm_sqrt3"}}}}}};
  auto ru = classify(make_distribution(conv_u));
  CHECK(ru.tag == CaseTag::superlogarithmic);
  CHECK(ru.superlog->q == 4);

  // jitter keeps the sign of the third cumulant, so the regime survives
  json jit75 = {{"family", "jitter"},
                {"params", {{"delta", 0.1}, {"base", {{"family", "bernoulli"}, {"params", {{"p", 0.75}}}}}}}};
  auto rj = classify(make_distribution(jit75));
  CHECK(rj.tag == CaseTag::superlogarithmic);
  CHECK(rj.superlog->q == 3);
}

TEST_CASE("classify: jittered bernoulli is logarithmic and nonlattice") {
  auto jit = dist(R"({"family":"jitter","params":{"delta":0.1,"base":{"family":"bernoulli","params":{"p":0.3}}}})");
  auto rep = classify(jit);
  CHECK(rep.tag == CaseTag::logarithmic);
  CHECK_FALSE(jit.lattice().has_value());
}

TEST_CASE("duality report residuals") {
  for (double p : {0.2, 0.3}) {
    json spec = {{"family", "bernoulli"}, {"params", {{"p", p}}}};
    auto d = make_distribution(spec);
    auto rep = classify(d);
    REQUIRE(rep.tag == CaseTag::logarithmic);
    auto dr = duality_report(d, rep);
    CAPTURE(p);
    CHECK(dr.r_sstar < 1e-6);
    CHECK(dr.r_tstar < 1e-6);
    CHECK(dr.r_curvature < 1e-6);
    CHECK(dr.r_value < 1e-6);
    CHECK(dr.r_half < 1e-6);
    CHECK(dr.pass());
  }
  auto g = dist(R"({"family":"gaussian"})");
  CHECK_THROWS_AS(duality_report(g, classify(g)), Error);
}

TEST_CASE("dual subgaussianity conditions agree at grid resolution") {
  // sup psi < 1 away from 0  <=>  inf I(s)/(s^2/2) > 1 away from 0
  const char* specs[] = {
      R"({"family":"bernoulli","params":{"p":0.75}})",  // superlog: both hold
      R"({"family":"bernoulli_symmetric"})",            // superlog: both hold
      R"({"family":"bernoulli","params":{"p":0.3}})",   // log: both fail
  };
  for (const char* s : specs) {
    auto d = dist(s);
    double eps = 0.05;
    double sup_psi = 0;
    for (double t = eps; t < 6; t += 0.01) sup_psi = std::max(sup_psi, psi(d, t));
    double inf_ratio = kInf;
    for (double sv = eps; sv < 0.95 * d.s_sup(); sv += 0.01)
      inf_ratio = std::min(inf_ratio, rate(d, sv).value / (sv * sv / 2));
    CAPTURE(s);
    CHECK((sup_psi < 1) == (inf_ratio > 1));
  }
}

TEST_CASE("case report serialization uses the contract field names") {
  auto rep = classify(dist(R"({"family":"bernoulli_symmetric"})"));
  json j = rep.to_json();
  CHECK(j["case"] == "superlogarithmic");
  CHECK(j.contains("q"));
  CHECK(j.contains("kappa"));
  CHECK(j.contains("p_exponent"));
  CHECK(j.contains("a_star"));
  CHECK(j.contains("lambda_total"));

  auto rep2 = classify(dist(R"({"family":"bernoulli","params":{"p":0.3}})"));
  json j2 = rep2.to_json();
  for (const char* k : {"t_star", "m_star", "s_star", "sigma_star", "beta_star", "d_star"})
    CHECK(j2.contains(k));
  CHECK_FALSE(j2.contains("h_star"));
  attach_hstar(rep2, 0.5);
  json j3 = rep2.to_json();
  CHECK(j3["h_star"] == 0.5);
  CHECK(j3.contains("theta_total"));
}

}  // TEST_SUITE
