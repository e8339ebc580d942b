#include <doctest.h>

#include <cmath>
#include <limits>

#include "dgdtrack/errors.hpp"
#include "dgdtrack/theory.hpp"
#include "support/oracles.hpp"

using namespace dgdtrack;

namespace {

TheoryInputs reference_inputs(int E) {
  TheoryInputs in;
  in.mu = 0.01;
  in.L = 0.1;
  in.eta = 0.05;
  in.E = E;
  in.n_agents = 30;
  in.dim = 50;
  in.c_max = 10.0;
  in.lambda2 = 0.95;
  in.init_dist = 40.0;
  return in;
}

// S(t+1) = alpha S(t) + alpha/(t+1); an independent path to the same sums.
std::vector<double> rolled_S(double alpha, long t_max) {
  std::vector<double> s(t_max + 1, 0.0);
  for (long t = 1; t < t_max; ++t) s[t + 1] = alpha * s[t] + alpha / static_cast<double>(t + 1);
  return s;
}

std::vector<double> rolled_S_gamma(double alpha, double gamma, long t_max) {
  std::vector<double> s(t_max + 1, 0.0);
  for (long t = 1; t < t_max; ++t)
    s[t + 1] = alpha * s[t] + alpha * (1 - gamma) / (1 - std::pow(gamma, static_cast<double>(t + 1)));
  return s;
}

}  // namespace

TEST_CASE("contraction factor at reference parameters") {
  CHECK(contraction_factor(0.05, 0.01, 5) == doctest::Approx(0.99750249875031246875).epsilon(1e-15));
  CHECK(contraction_factor(0.05, 0.01, 10) == doctest::Approx(0.99501123501311712828).epsilon(1e-15));
  CHECK(contraction_factor(0.05, 0.01, 1) == 0.9995);
  CHECK(contraction_factor(0.05, 0.01, 10) < contraction_factor(0.05, 0.01, 5));
  CHECK(contraction_factor(0.06, 0.01, 5) < contraction_factor(0.05, 0.01, 5));
  CHECK_THROWS_AS(contraction_factor(0.05, 0.01, 0), ParameterError);
}

TEST_CASE("uniform constants") {
  SUBCASE("alpha = 1/3 gives t0 = 1 and an empty sum") {
    const auto c = uniform_constants(1.0 / 3.0);
    CHECK(c.t0 == 1);
    CHECK(uniform_drift_sum(1.0 / 3.0, 1) == 0.0);
    CHECK(c.A == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("alpha near zero") {
    const auto c = uniform_constants(1e-6);
    CHECK(c.t0 == 1);
    CHECK(c.A == doctest::Approx(2e-6 / (1 - 1e-6)).epsilon(1e-14));
  }
  SUBCASE("hand values") {
    const auto a9 = uniform_constants(0.9);
    // The double nearest 0.9 is slightly above it, so 2a/(1-a) = 18.000000000000004.
    CHECK(a9.t0 == 19);
    CHECK(a9.A == doctest::Approx(18.0).epsilon(1e-12));
    const auto a5 = uniform_constants(0.5);
    CHECK(a5.t0 == 2);
    CHECK(uniform_drift_sum(0.5, 2) == 0.25);
    CHECK(a5.A == doctest::Approx(2.0).epsilon(1e-15));
  }
  SUBCASE("reference parameters") {
    CHECK(uniform_constants(contraction_factor(0.05, 0.01, 1)).t0 == 3999);
    CHECK(uniform_constants(contraction_factor(0.05, 0.01, 5)).t0 == 799);
    CHECK(uniform_constants(contraction_factor(0.05, 0.01, 10)).t0 == 399);
  }
  CHECK_THROWS_AS(uniform_constants(0.0), ParameterError);
  CHECK_THROWS_AS(uniform_constants(1.0), ParameterError);
}

TEST_CASE("discounted constants") {
  const auto a = discounted_constants(0.9, 0.7);
  CHECK(a.t0 == 6);
  CHECK(a.A_gamma == doctest::Approx(18.0).epsilon(1e-12));
  CHECK(a.floor == doctest::Approx(2.7).epsilon(1e-12));

  const auto b = discounted_constants(0.5, 0.3);
  CHECK(b.t0 == 1);
  CHECK(b.A_gamma == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(b.floor == doctest::Approx(0.7).epsilon(1e-15));

  const double a5 = contraction_factor(0.05, 0.01, 5);
  const auto p = discounted_constants(a5, 0.7);
  CHECK(p.floor == doctest::Approx(119.82006001499850).epsilon(1e-12));
  CHECK(p.t0 == 16);
  CHECK(discounted_constants(contraction_factor(0.05, 0.01, 1), 0.7).t0 == 20);
  CHECK(discounted_constants(contraction_factor(0.05, 0.01, 10), 0.7).t0 == 14);

  CHECK(discounted_constants(1e-9, 0.5).floor == doctest::Approx(0.5e-9).epsilon(1e-6));
  CHECK_THROWS_AS(discounted_constants(0.9, 1.0), ParameterError);
  CHECK_THROWS_AS(discounted_constants(1.0, 0.5), ParameterError);
}

TEST_CASE("brute-force sums satisfy the envelopes on the full grid") {
  const long t_max = 10000;
  for (double alpha : {0.5, 0.9, 0.99, std::pow(0.9995, 5)}) {
    const auto u = uniform_constants(alpha);
    const auto s = rolled_S(alpha, t_max);
    for (long t = u.t0; t <= t_max; ++t) CHECK_MESSAGE(s[t] <= u.A / t * (1 + 1e-12), "alpha=", alpha, " t=", t);
    for (long t : {1L, 2L, 17L, 500L, 9999L})
      CHECK(uniform_drift_sum(alpha, t) == doctest::Approx(testing::brute_S(alpha, t)).epsilon(1e-12));

    for (double gamma : {0.3, 0.7, 0.95}) {
      const auto c = discounted_constants(alpha, gamma);
      const auto sg = rolled_S_gamma(alpha, gamma, t_max);
      for (long t = c.t0; t <= t_max; ++t)
        CHECK(sg[t] <= c.A_gamma * (1 - gamma) / (1 - std::pow(gamma, static_cast<double>(t))) * (1 + 1e-12));
      CHECK(std::abs(sg[t_max] - c.floor) <= 1e-6 * std::max(1.0, c.floor));
      for (long t : {1L, 3L, 250L, 9999L})
        CHECK(discounted_drift_sum(alpha, gamma, t) ==
              doctest::Approx(testing::brute_S_gamma(alpha, gamma, t)).epsilon(1e-12));
    }
  }
}

TEST_CASE("theory constants from raw inputs") {
  const TheoryConstants tc = theory_constants(reference_inputs(5));
  CHECK(tc.kappa == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(tc.C == doctest::Approx(10.0 * std::sqrt(50.0)).epsilon(1e-15));
  CHECK(tc.G == doctest::Approx(2 * 0.1 * 10 * std::sqrt(50.0) * std::sqrt(300.0)).epsilon(1e-14));
  CHECK(tc.G == doctest::Approx(244.94897427831781).epsilon(1e-14));
  CHECK(tc.Lambda == doctest::Approx(20.0).epsilon(1e-13));
  CHECK(tc.bias_term() == doctest::Approx(0.05 * 10 * 20 * tc.G).epsilon(1e-13));
  CHECK(tc.fixed_point_norm_bound() == doctest::Approx(tc.C * std::sqrt(300.0)).epsilon(1e-15));

  TheoryInputs single = reference_inputs(5);
  single.n_agents = 1;
  single.lambda2 = 1.0;
  const TheoryConstants one = theory_constants(single);
  CHECK(std::isinf(one.Lambda));
  CHECK(one.bias_term() == 0.0);

  TheoryInputs bad = reference_inputs(5);
  bad.lambda2 = 1.0;
  CHECK_THROWS_AS(theory_constants(bad), ParameterError);
  bad = reference_inputs(5);
  bad.L = 0.001;
  CHECK_THROWS_AS(theory_constants(bad), ParameterError);
}

TEST_CASE("bound evaluation agrees with an independent recomputation") {
  for (int E : {1, 5, 10}) {
    const TheoryInputs in = reference_inputs(E);
    const TheoryConstants tc = theory_constants(in);
    const auto u = uniform_constants(tc.alpha);
    // Raw recomputation.
    const double alpha = std::pow(1 - in.eta * in.mu, E);
    const double kappa = in.L / in.mu;
    const double G = 2 * in.L * in.c_max * std::sqrt(in.dim * in.n_agents * kappa);
    const double Lambda = 1 / (1 - in.lambda2);
    const long t0 = std::max(1L, static_cast<long>(std::ceil(2 * alpha / (1 - alpha))));
    const double A = std::max(t0 * testing::brute_S(alpha, t0), 2 * alpha / (1 - alpha));
    for (long t : {t0, 2 * t0, 10 * t0, 1000 * t0}) {
      const double raw = std::pow(alpha, t) * in.init_dist + 2 * G / in.mu * A / t + in.eta * kappa * Lambda * G;
      CHECK(bound_uniform(tc, u.A, u.t0, t) == doctest::Approx(raw).epsilon(1e-12));
    }
    const auto d = discounted_constants(tc.alpha, 0.7);
    const long t0d = std::max(1L, static_cast<long>(std::ceil(std::log((1 - alpha) / (1 + alpha - 1.4 * alpha)) /
                                                              std::log(0.7))));
    CHECK(d.t0 == t0d);
    const double Ag = std::max((1 - std::pow(0.7, t0d)) * testing::brute_S_gamma(alpha, 0.7, t0d) / 0.3,
                               2 * alpha / (1 - alpha));
    for (long t : {t0d, t0d + 1, 300L}) {
      const double raw = std::pow(alpha, t) * in.init_dist + 2 * G / in.mu * Ag * 0.3 / (1 - std::pow(0.7, t)) +
                         in.eta * kappa * Lambda * G;
      CHECK(bound_discounted(tc, d.A_gamma, d.t0, 0.7, t) == doctest::Approx(raw).epsilon(1e-12));
    }
  }
}

TEST_CASE("bounds are only asserted from t0 onwards") {
  const TheoryConstants tc = theory_constants(reference_inputs(5));
  const auto u = uniform_constants(tc.alpha);
  CHECK_THROWS_AS(bound_uniform(tc, u.A, u.t0, u.t0 - 1), DomainError);
  const TrackingBound b(tc, WeightScheme::uniform());
  CHECK(b.t0() == 799);
  CHECK_FALSE(b.certified_at(300));
  CHECK_THROWS_AS(b(300), DomainError);
  CHECK(b.terms(300).total() > 0.0);
}

TEST_CASE("asymptotics and monotonicity") {
  const TheoryConstants tc = theory_constants(reference_inputs(5));
  const TrackingBound u(tc, WeightScheme::uniform());
  CHECK(u.limit() == tc.bias_term());
  CHECK(u.ate() == tc.bias_term());
  CHECK(std::abs(u(100000000) - u.limit()) < 1e-3 * u.limit());
  const double mid_1 = u.terms(1000000).tracking;
  const double mid_2 = u.terms(2000000).tracking;
  CHECK(mid_2 == doctest::Approx(mid_1 / 2).epsilon(1e-12));

  const TrackingBound d(tc, WeightScheme::discounted(0.7));
  CHECK(d(1000000) == doctest::Approx(d.limit()).epsilon(1e-12));
  CHECK(d.limit() == doctest::Approx(2 * tc.G / tc.mu * d.summation_constant() * 0.3 + tc.bias_term()).epsilon(1e-15));
  CHECK(d.ate() == doctest::Approx(2 * tc.G / tc.mu * 119.82006001499850 + tc.bias_term()).epsilon(1e-12));
  for (const TrackingBound* b : {&u, &d}) {
    double prev = (*b)(b->t0());
    for (std::int64_t t = b->t0() + 1; t < b->t0() + 5000; ++t) {
      const double cur = (*b)(t);
      CHECK(cur <= prev);
      prev = cur;
    }
  }
}

TEST_CASE("drift envelopes") {
  const double G = 244.94897427831781;
  CHECK(drift_bound_uniform(G, 0.01, 1) == doctest::Approx(G / 0.01).epsilon(1e-15));
  CHECK(drift_bound_uniform(G, 0.01, 100000000) < 1e-2);
  CHECK(drift_bound_discounted(G, 0.01, 0.7, 1) == doctest::Approx(2 * G / 0.01 * 0.3 / 0.51).epsilon(1e-14));
  CHECK(drift_bound_discounted(G, 0.01, 0.7, 10000) == doctest::Approx(2 * G / 0.01 * 0.3).epsilon(1e-15));
}
