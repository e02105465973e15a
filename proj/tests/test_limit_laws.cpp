#include <doctest.h>

#include <cmath>

#include "scanlaw/limit_laws.hpp"

using namespace scanlaw;

namespace {

Distribution dist(const char* text) { return make_distribution(std::string(text)); }

CaseReport superlog_report(int q, double kappa) {
  CaseReport rep;
  rep.tag = CaseTag::superlogarithmic;
  rep.superlog = SuperlogPayload{q, kappa, static_cast<double>(q) / (q - 2),
                                 a_star_closed_form(q, kappa),
                                 lambda_total_closed_form(q, kappa)};
  return rep;
}

}  // namespace

TEST_SUITE("limit_laws") {

TEST_CASE("the two documented centerings are algebraically identical") {
  for (int q : {3, 4, 5, 7, 8}) {
    double lhs = (q - 6.0) / (2.0 * (q - 2));
    double p = static_cast<double>(q) / (q - 2);
    CHECK(lhs == doctest::Approx(1.5 - p).epsilon(1e-15));
  }
}

TEST_CASE("gumbel_location") {
  auto rep = superlog_report(4, 1.0 / 12);
  auto loc = gumbel_location(rep, 10000);
  double logn = std::log(1e4);
  CHECK(loc.location == doctest::Approx(logn - 0.5 * std::log(logn)).epsilon(1e-12));
  CHECK(loc.location == doctest::Approx(8.1001769688).epsilon(1e-9));
  CHECK(loc.tau_scale == 1.0);

  // q = 6 kills the iterated-log term exactly
  auto rep6 = superlog_report(6, 0.05);
  CHECK(gumbel_location(rep6, 5000).location == doctest::Approx(std::log(5000.0)).epsilon(1e-14));

  // logarithmic case: m* log n with tau scale m*
  CaseReport lg;
  lg.tag = CaseTag::logarithmic;
  lg.log_case = LogPayload{0.5, 1.2, 0.6, 0.9, 0.4, 1.0, std::nullopt, std::nullopt};
  auto l2 = gumbel_location(lg, static_cast<long>(std::exp(10.0)) + 1);
  CHECK(l2.location / l2.tau_scale ==
        doctest::Approx(std::log(std::floor(std::exp(10.0)) + 1)).epsilon(1e-6));

  CaseReport gauss;
  gauss.tag = CaseTag::gaussian;
  CHECK_THROWS_AS(gumbel_location(gauss, 100), Error);
  CHECK_THROWS_AS(gumbel_location(rep, 2), Error);
}

TEST_CASE("limit_cdf_msq boundary behavior") {
  auto rep = superlog_report(4, 1.0 / 12);
  long n = 10000;
  auto law = make_gumbel_law(rep, n);
  // tau = 0 gives exp(-Lambda)
  CHECK(law.cdf_msq(2 * law.location) == doctest::Approx(std::exp(-rep.superlog->lambda_total)));
  CHECK(law.cdf_msq(-1e9) == doctest::Approx(0.0));
  CHECK(law.cdf_msq(1e9) == doctest::Approx(1.0));
  // bernoulli_symmetric at tau = 1 with the corrected total intensity
  double lam = 1.5 / std::sqrt(M_PI);
  CHECK(limit_cdf_msq(2 * (law.location + 1), rep, n) ==
        doctest::Approx(std::exp(-lam * std::exp(-1.0))).epsilon(1e-10));
}

TEST_CASE("limit_cdf_msq is monotone and spans (0,1)") {
  auto rep = superlog_report(3, 0.19245008972987526);
  auto law = make_gumbel_law(rep, 100000);
  double prev = 0;
  for (int i = 0; i <= 10000; ++i) {
    double x = -50 + 0.02 * i;
    double v = law.cdf_msq(x);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(law.cdf_msq(-50) < 1e-12);
  CHECK(law.cdf_msq(150) > 1 - 1e-10);
}

TEST_CASE("theta* gating: p-values fail loudly without H*") {
  auto b = dist(R"({"family":"bernoulli","params":{"p":0.3}})");
  auto rep = classify(b);
  REQUIRE(rep.tag == CaseTag::logarithmic);
  CHECK_THROWS_AS(limit_cdf_msq(10.0, rep, 1000), Error);
  attach_hstar(rep, 0.5);
  CHECK(limit_cdf_msq(10.0, rep, 1000) > 0.0);
}

TEST_CASE("pvalue_m transfer between scales") {
  auto rep = superlog_report(4, 1.0 / 12);
  long n = 10000;
  auto law = make_gumbel_law(rep, n);
  double m0 = std::sqrt(2 * law.location);
  CHECK(pvalue_m(m0, rep, n) ==
        doctest::Approx(1 - std::exp(-rep.superlog->lambda_total)).epsilon(1e-12));
  // huge threshold: p ~ mass * exp(-tau), within 1% when p < 0.01
  double m_big = std::sqrt(2 * (law.location + 7));
  double p = pvalue_m(m_big, rep, n);
  CHECK(p < 0.01);
  CHECK(p == doctest::Approx(rep.superlog->lambda_total * std::exp(-7.0)).epsilon(0.01));
  // tiny threshold: p -> 1
  CHECK(pvalue_m(1e-6, rep, n) == doctest::Approx(1.0).epsilon(1e-10));
  // the two parameterizations agree at first order near the centering
  double m1 = m0 + 0.3 / (2 * std::sqrt(2 * law.location));
  double pa = pvalue_m(m1, rep, n, PValueScale::m_squared);
  double pb = pvalue_m(m1, rep, n, PValueScale::m_linear);
  CHECK(pa == doctest::Approx(pb).epsilon(0.005));
}

TEST_CASE("intensity: superlogarithmic profile") {
  auto rep = superlog_report(4, 1.0 / 12);
  // at the peak a* = 1/6: (18/sqrt(pi)) e^-2
  double peak = intensity(rep, 1.0 / 6);
  CHECK(peak == doctest::Approx(18.0 / std::sqrt(M_PI) * std::exp(-2.0)).epsilon(1e-12));
  // vanishes at both ends
  CHECK(intensity(rep, 1e-6) < 1e-100);
  CHECK(intensity(rep, 1e8) < 1e-10);
  CHECK_THROWS_AS(intensity(rep, 0.0), Error);
  CHECK_THROWS_AS(intensity(rep, -1.0), Error);

  // golden-section argmax matches the closed form a*
  double a_hat = golden_section_max([&](double a) { return intensity(rep, a); }, 1e-3, 10.0, 1e-13);
  CHECK(a_hat == doctest::Approx(rep.superlog->a_star).epsilon(1e-8));
}

TEST_CASE("intensity: logarithmic profile peaks at zero") {
  auto b = dist(R"({"family":"bernoulli","params":{"p":0.3}})");
  auto rep = classify(b);
  attach_hstar(rep, 0.5);
  const auto& lc = *rep.log_case;
  double h = 0.5;
  double want = std::sqrt(lc.m_star) * h * h / (2 * std::sqrt(M_PI) * lc.sigma_star);
  CHECK(intensity(rep, 0.0) == doctest::Approx(want).epsilon(1e-12));
  CHECK(intensity(rep, 1.0) < intensity(rep, 0.0));
  CHECK(intensity(rep, -1.0) == doctest::Approx(intensity(rep, 1.0)).epsilon(1e-12));
}

TEST_CASE("intensity integral matches the closed forms") {
  // superlogarithmic: total mass Gamma(p) (2 kappa)^{-2/(q-2)} / (4 sqrt(pi))
  struct QK { int q; double kappa; };
  for (QK qk : {QK{4, 1.0 / 12}, QK{4, 1.0 / 20}, QK{3, 0.19245008972987526}}) {
    auto rep = superlog_report(qk.q, qk.kappa);
    double numeric = intensity_integral(rep, 0.0, kInf, 1e-11);
    CAPTURE(qk.q);
    CAPTURE(qk.kappa);
    CHECK(std::abs(numeric - rep.superlog->lambda_total) < 1e-8);
  }

  // logarithmic: gaussian integral sqrt(m*) H*^2 / (sqrt(2) beta* sigma*)
  auto b = dist(R"({"family":"bernoulli","params":{"p":0.3}})");
  auto rep = classify(b);
  attach_hstar(rep, 0.5);
  double numeric = intensity_integral(rep, -kInf, kInf, 1e-12);
  CHECK(std::abs(numeric - *rep.log_case->theta_total) < 1e-10);

  // degenerate interval
  CHECK(intensity_integral(rep, 1.0, 1.0) == 0.0);
}

TEST_CASE("optimal_length descriptors") {
  CHECK(optimal_length(superlog_report(3, 0.19), 1000).p_exponent == doctest::Approx(3.0));
  auto o4 = optimal_length(superlog_report(4, 1.0 / 12), 1000);
  CHECK(o4.p_exponent == doctest::Approx(2.0));
  CHECK(o4.peak == doctest::Approx(1.0 / 6).epsilon(1e-12));

  auto b = dist(R"({"family":"bernoulli","params":{"p":0.3}})");
  auto rep = classify(b);
  auto ol = optimal_length(rep, 100000);
  CHECK(ol.center == doctest::Approx(rep.log_case->d_star * std::log(1e5)).epsilon(1e-10));

  auto e = classify(dist(R"({"family":"exponential_std"})"));
  CHECK(optimal_length(e, 1000).form == "O(1)");
}

TEST_CASE("hitting law normalizations") {
  auto rep = superlog_report(4, 1.0 / 12);
  double mass = rep.superlog->lambda_total;
  auto h = hitting_cdf(1.0 / mass, 5.0, rep);
  CHECK(h.survival == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  // q=4: alpha = -1/2, normalization 2^{1/2} u^{-1} e^{-u^2/2}
  CHECK(h.normalization ==
        doctest::Approx(std::sqrt(2.0) / 5.0 * std::exp(-12.5)).epsilon(1e-12));
  CHECK(hitting_cdf(1e-12, 5.0, rep).survival == doctest::Approx(1.0));

  auto b = dist(R"({"family":"bernoulli","params":{"p":0.3}})");
  auto lrep = classify(b);
  attach_hstar(lrep, 0.5);
  auto h2 = hitting_cdf(2.0, 4.0, lrep);
  CHECK(h2.normalization ==
        doctest::Approx(std::exp(-16.0 / (2 * lrep.log_case->m_star))).epsilon(1e-12));
  CHECK(h2.survival == doctest::Approx(std::exp(-*lrep.log_case->theta_total * 2)).epsilon(1e-12));
}

}  // TEST_SUITE
