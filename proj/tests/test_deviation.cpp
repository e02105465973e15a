#include <doctest.h>

#include <cmath>
#include <vector>

#include "scanlaw/deviation.hpp"
#include "scanlaw/lattice_dp.hpp"

using namespace scanlaw;

namespace {
Distribution dist(const char* text) { return make_distribution(std::string(text)); }
}

TEST_SUITE("deviation_tails") {

TEST_CASE("lattice DP reproduces binomial probabilities exactly") {
  auto bs = dist(R"({"family":"bernoulli_symmetric"})");
  AtomWalkDP dp(*bs.atoms());
  dp.step_to(10);
  CHECK(dp.total() == doctest::Approx(1.0).epsilon(1e-13));
  // P[S_10 = 10] = 2^-10; P[S_10 >= 10] equals it, P[S_10 > 10] = 0
  CHECK(dp.tail(10.0, false) == doctest::Approx(std::pow(2.0, -10)).epsilon(1e-12));
  CHECK(dp.tail(10.0, true) == doctest::Approx(0.0));
  // P[S_10 > 0] = (1 - P[S=0])/2 by symmetry; P[S=0] = C(10,5)/2^10
  double p0 = 252.0 / 1024.0;
  CHECK(dp.tail(0.0, true) == doctest::Approx((1 - p0) / 2).epsilon(1e-12));
  CHECK(dp.tail(0.0, false) == doctest::Approx((1 - p0) / 2 + p0).epsilon(1e-12));
}

TEST_CASE("cramer_tail: gaussian closed form") {
  auto g = dist(R"({"family":"gaussian"})");
  auto r = cramer_tail(g, {100, 3.0});
  CHECK(r.value == doctest::Approx(std::exp(-4.5) / (std::sqrt(2 * M_PI) * 3)).epsilon(1e-12));
  CHECK(r.value == doctest::Approx(0.0014773).epsilon(1e-4));
  CHECK_FALSE(r.clt_flag);
  CHECK_FALSE(r.regime_warning);

  // eq-cramer1 form: lambda = 0 for the gaussian, so the value is the exact tail
  auto r2 = cramer_tail(g, {100, 3.0}, CramerForm::phi_bar);
  CHECK(r2.value == doctest::Approx(normal_tail(3.0)).epsilon(1e-13));
}

TEST_CASE("cramer_tail: flags at the regime edges") {
  auto g = dist(R"({"family":"gaussian"})");
  auto tiny = cramer_tail(g, {1000000, 1e-8});
  CHECK(tiny.clt_flag);
  CHECK(std::isfinite(tiny.value));
  CHECK(tiny.value > 1.0);  // Mills prefactor blows up as x -> 0

  auto big = cramer_tail(g, {100, 9.9});
  CHECK(big.regime_warning);
}

TEST_CASE("cramer_tail vs exact binomial tail") {
  auto bs = dist(R"({"family":"bernoulli_symmetric"})");
  // spec-level sanity: k=400, x=2; exact oracle is P[S_400 >= 40]
  double approx = cramer_tail(bs, {400, 2.0}).value;
  double exact = exact_walk_tail(bs, 400, 2.0, /*strict=*/false);
  CHECK(std::abs(approx / exact - 1) < 0.15);
}

TEST_CASE("bahadur_rao: gaussian equals normal tail up to 10%") {
  auto g = dist(R"({"family":"gaussian"})");
  double v = bahadur_rao_tail(g, {100, 10.0});
  CHECK(v == doctest::Approx(std::exp(-50.0) / std::sqrt(2 * M_PI * 100)).epsilon(1e-12));
  CHECK(std::abs(v / normal_tail(10.0) - 1) < 0.10);
}

TEST_CASE("bahadur_rao: lattice laws are rejected") {
  auto bs = dist(R"({"family":"bernoulli_symmetric"})");
  try {
    bahadur_rao_tail(bs, {100, 2.0});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::capability);
  }
}

TEST_CASE("bahadur_rao vs importance-sampling oracle (uniform law)") {
  auto u = dist(R"({"family":"uniform_pm_sqrt3"})");
  const long k = 200;
  const double x = std::sqrt(200.0) * 0.5;  // alpha = 0.5
  double br = bahadur_rao_tail(u, {k, x});

  // exponential-tilt importance sampling at the optimal tilt t = I'(alpha)
  double alpha = 0.5;
  RateEval r = rate(u, alpha);
  double t = r.maximizer, phi = u.cgf(t);
  const int reps = 200000;
  Rng rng(20240707, 0);
  std::vector<double> step(k);
  double sum = 0, sum2 = 0;
  double y = x * std::sqrt(static_cast<double>(k));
  for (int i = 0; i < reps; ++i) {
    u.sample_tilted_into(t, rng, step);
    double s = 0;
    for (double v : step) s += v;
    double w = s > y ? std::exp(-t * s + k * phi) : 0.0;
    sum += w;
    sum2 += w * w;
  }
  double est = sum / reps;
  double se = std::sqrt((sum2 / reps - est * est) / reps);
  // Bahadur-Rao itself carries an O(1/k) bias, so allow 3 SE plus 1.5%
  CHECK(std::abs(br - est) < 3 * se + 0.015 * est);
}

TEST_CASE("chernoff_bound values") {
  auto g = dist(R"({"family":"gaussian"})");
  CHECK(chernoff_bound(g, {4, 2.0}) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));

  auto bs = dist(R"({"family":"bernoulli_symmetric"})");
  // x/sqrt(k) = 1 = s_sup: I(1) = log 2 and the bound is exactly P[ten +1 steps]
  CHECK(chernoff_bound(bs, {10, std::sqrt(10.0)}) ==
        doctest::Approx(std::pow(2.0, -10)).epsilon(1e-12));
  // beyond the support the event is impossible
  CHECK(chernoff_bound(bs, {10, 2 * std::sqrt(10.0)}) == 0.0);
}

TEST_CASE("chernoff_bound dominates the exact tail (lattice families, k <= 64)") {
  for (const char* spec : {R"({"family":"bernoulli_symmetric"})",
                           R"({"family":"bernoulli","params":{"p":0.3}})",
                           R"({"family":"bernoulli","params":{"p":0.75}})"}) {
    auto d = dist(spec);
    for (long k : {1L, 4L, 16L, 64L}) {
      AtomWalkDP dp(*d.atoms());
      dp.step_to(k);
      double s_hi = std::min(d.s_sup(), 4.0);
      for (int i = 1; i <= 20; ++i) {
        double x = s_hi * std::sqrt(static_cast<double>(k)) * i / 20.0;
        double bound = chernoff_bound(d, {k, x});
        double exact = dp.tail(x * std::sqrt(static_cast<double>(k)), true);
        CAPTURE(spec);
        CAPTURE(k);
        CAPTURE(x);
        CHECK(bound >= exact * (1 - 1e-12));
      }
    }
  }
}

TEST_CASE("cramer ratio approaches 1 with k at fixed x/k^0.3") {
  auto bs = dist(R"({"family":"bernoulli_symmetric"})");
  double ratios[2];
  int idx = 0;
  for (long k : {100L, 10000L}) {
    double x = std::pow(static_cast<double>(k), 0.3);
    double approx = cramer_tail(bs, {k, x}).value;
    double exact = exact_walk_tail(bs, k, x, true);
    ratios[idx++] = approx / exact;
  }
  CHECK(std::abs(ratios[1] - 1) < std::abs(ratios[0] - 1));
  CHECK(ratios[1] > 0.8);
  CHECK(ratios[1] < 1.25);
}

}  // TEST_SUITE
