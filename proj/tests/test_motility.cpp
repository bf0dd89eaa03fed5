#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "motilab/motility.hpp"

using namespace motilab;

TEST_CASE("closed-form derivatives at reference points") {
  auto e1 = MotilityFunction::exponential(1.0).eval(0.0);
  CHECK(e1.g == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(e1.g1 == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(e1.g2 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(e1.g3 == doctest::Approx(-1.0).epsilon(1e-15));

  auto c = MotilityFunction::constant(0.5).eval(3.0);
  CHECK(c.g == 0.5);
  CHECK(c.g1 == 0.0);
  CHECK(c.g2 == 0.0);
  CHECK(c.g3 == 0.0);

  // (1+s)^{-1}: derivatives at 0 are -1, 2, -6.
  auto ip = MotilityFunction::inverse_power(1.0, 1.0).eval(0.0);
  CHECK(ip.g == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ip.g1 == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(ip.g2 == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(ip.g3 == doctest::Approx(-6.0).epsilon(1e-15));
}

TEST_CASE("analytic derivatives agree with central differences") {
  // Each order is differenced from the analytic order below it, so only
  // one truncation error enters per check.
  std::vector<MotilityFunction> fams = {
      MotilityFunction::exponential(0.1),
      MotilityFunction::exponential(1.0),
      MotilityFunction::inverse_power(1.0, 1.0),
      MotilityFunction::inverse_power(0.5, 2.0),
      MotilityFunction::constant(0.7),
  };
  const double ss[] = {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0};
  for (const auto& m : fams) {
    for (double s : ss) {
      double h = 1e-4 * std::max(1.0, s);
      auto d = m.eval(s);
      auto dp = m.eval(s + h);
      auto dm = m.eval(s - h);
      double fd1 = (dp.g - dm.g) / (2.0 * h);
      double fd2 = (dp.g1 - dm.g1) / (2.0 * h);
      double fd3 = (dp.g2 - dm.g2) / (2.0 * h);
      double scale1 = std::max(std::fabs(d.g1), 1e-12);
      double scale2 = std::max(std::fabs(d.g2), 1e-12);
      double scale3 = std::max(std::fabs(d.g3), 1e-12);
      CHECK(std::fabs(fd1 - d.g1) / scale1 <= 1e-6);
      CHECK(std::fabs(fd2 - d.g2) / scale2 <= 1e-6);
      CHECK(std::fabs(fd3 - d.g3) / scale3 <= 1e-6);
    }
  }
}

TEST_CASE("value and value_many agree with eval") {
  std::vector<MotilityFunction> fams = {
      MotilityFunction::exponential(0.3),
      MotilityFunction::inverse_power(1.0, 1.5),
      MotilityFunction::constant(2.0),
  };
  std::vector<double> s(101);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = 0.05 * double(i);
  std::vector<double> out(s.size());
  for (const auto& m : fams) {
    m.value_many(s.data(), out.data(), s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(out[i] == doctest::Approx(m.eval(s[i]).g).epsilon(1e-13));
      CHECK(m.value(s[i]) == doctest::Approx(m.eval(s[i]).g).epsilon(1e-15));
    }
  }
}

TEST_CASE("audit: exponential(0.1) against mu=1 passes with mu0=0.2") {
  // For gamma=e^{-alpha s}: -2g'+g''s = e^{-alpha s}(2a + a^2 s) peaks at
  // s=0 with value 2a; g'^2/g = a^2 e^{-alpha s} peaks at 0 with a^2.
  auto a = audit_hypotheses(MotilityFunction::exponential(0.1), 1.0, 50.0,
                            1000000);
  CHECK(a.pass());
  CHECK(a.mu0_hat == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(a.c_gamma_hat == doctest::Approx(0.01).epsilon(1e-9));
  CHECK(a.margin == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(a.gamma_min == doctest::Approx(std::exp(-5.0)).epsilon(1e-12));
  CHECK(!a.sup_at_boundary);
  CHECK(a.positivity_ok);
}

TEST_CASE("audit: constant motility passes for any mu") {
  for (double mu : {0.5, 1.0, 10.0}) {
    auto a = audit_hypotheses(MotilityFunction::constant(1.0), mu, 50.0, 1000);
    CHECK(a.pass());
    CHECK(a.mu0_hat == 0.0);
    CHECK(a.c_gamma_hat == 0.0);
  }
}

TEST_CASE("audit: exponential(1) fails the growth bound against mu=1") {
  auto a = audit_hypotheses(MotilityFunction::exponential(1.0), 1.0, 50.0,
                            1000000);
  CHECK(!a.pass());
  CHECK(a.mu0_hat == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(!a.growth_ok);
  CHECK(a.sign_checks_ok);
  CHECK(a.positivity_ok);
}

TEST_CASE("audit flags a supremum sitting on the range boundary") {
  // Linear gamma = 2 - s on [0,1]: signs hold, and g'^2/g = 1/(2-s) is
  // increasing, so its grid maximum lands on s_max.
  auto lin = MotilityFunction::custom("linear", [](double s) {
    return MotilityDerivs{2.0 - s, -1.0, 0.0, 0.0};
  });
  auto a = audit_hypotheses(lin, 3.0, 1.0, 2000);
  CHECK(a.pass());
  CHECK(a.mu0_hat == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(a.sup_at_boundary);
  CHECK(a.c_gamma_hat == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("audit suprema are monotone in s_max") {
  auto lin = MotilityFunction::custom("linear", [](double s) {
    return MotilityDerivs{2.0 - s, -1.0, 0.0, 0.0};
  });
  double prev_mu0 = -1.0, prev_cg = -1.0;
  for (double smax : {0.25, 0.5, 1.0}) {
    auto a = audit_hypotheses(lin, 3.0, smax, 2000);
    CHECK(a.mu0_hat >= prev_mu0);
    CHECK(a.c_gamma_hat >= prev_cg);
    prev_mu0 = a.mu0_hat;
    prev_cg = a.c_gamma_hat;
  }
}

TEST_CASE("audit reports sign violations with the offending location") {
  auto grow = MotilityFunction::custom("growing", [](double s) {
    return MotilityDerivs{1.0 + s, 1.0, 0.0, 0.0};
  });
  auto a = audit_hypotheses(grow, 1.0, 2.0, 1000);
  CHECK(!a.sign_checks_ok);
  CHECK(a.first_violation_s == 0.0);
  CHECK(!a.pass());
}

TEST_CASE("invalid arguments are rejected") {
  CHECK_THROWS_AS(MotilityFunction::exponential(0.0), std::invalid_argument);
  CHECK_THROWS_AS(MotilityFunction::exponential(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(MotilityFunction::inverse_power(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(MotilityFunction::constant(0.0), std::invalid_argument);
  CHECK_THROWS_AS(MotilityFunction::exponential(1.0).eval(-0.1),
                  std::domain_error);
  CHECK_THROWS_AS(MotilityFunction::exponential(1.0).value(-1e-9),
                  std::domain_error);
  auto m = MotilityFunction::exponential(1.0);
  CHECK_THROWS_AS(audit_hypotheses(m, 1.0, -1.0, 2000), std::invalid_argument);
  CHECK_THROWS_AS(audit_hypotheses(m, 1.0, 10.0, 10), std::invalid_argument);
}
