#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "motilab/envelope.hpp"
#include "motilab/format.hpp"

using namespace motilab;

namespace {

double logistic_closed_form(double u0, double mu, double t) {
  double e = std::exp(mu * t);
  return u0 * e / (1.0 - u0 + u0 * e);
}

MotilityFunction linear_growing_motility() {
  return MotilityFunction::custom("growing", [](double s) {
    return MotilityDerivs{1.0 + s, 1.0, 0.0, 0.0};
  });
}

}  // namespace

TEST_CASE("rhs at reference states") {
  auto exp1 = MotilityFunction::exponential(1.0);

  Envelope steady = Envelope::from_values(0.0, 1.0, 1.0);
  EnvelopeRhs r0 = envelope_rhs(steady, 0.0, exp1, 1.0);
  CHECK(r0.d_log_hi == 0.0);
  CHECK(r0.d_log_lo == 0.0);

  // Constant motility: pure logistic in log form, a irrelevant.
  auto c = MotilityFunction::constant(0.5);
  Envelope e = Envelope::from_values(0.0, 0.7, 1.5);
  EnvelopeRhs rc = envelope_rhs(e, 3.0, c, 2.0);
  CHECK(rc.d_log_hi == doctest::Approx(2.0 * (1.0 - 1.5)).epsilon(1e-14));
  CHECK(rc.d_log_lo == doctest::Approx(2.0 * (1.0 - 0.7)).epsilon(1e-14));

  // gamma = e^{-s}, u_hi = 2, u_lo = 0.5, a = 0, mu = 1:
  //   d log u_hi = e^{-0.5} * 1.5 - 1, d log u_lo = -e^{-0.5} * 1.5 + 0.5.
  Envelope g = Envelope::from_values(0.0, 0.5, 2.0);
  EnvelopeRhs rg = envelope_rhs(g, 0.0, exp1, 1.0);
  double em = std::exp(-0.5);
  CHECK(rg.d_log_hi == doctest::Approx(em * 1.5 - 1.0).epsilon(1e-14));
  CHECK(rg.d_log_lo == doctest::Approx(-em * 1.5 + 0.5).epsilon(1e-14));
  CHECK(std::fabs(rg.d_log_hi - (-0.0902040104)) <= 1e-9);
  CHECK(std::fabs(rg.d_log_lo - (-0.4097959896)) <= 1e-9);

  CHECK_THROWS_AS(envelope_rhs(g, -1.0, exp1, 1.0), std::invalid_argument);
}

TEST_CASE("envelope construction validates its inputs") {
  CHECK_THROWS_AS(Envelope::from_values(0.0, 0.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(Envelope::from_values(0.0, -1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(Envelope::from_values(0.0, 2.0, 0.5), std::invalid_argument);
  Envelope e = Envelope::from_values(1.5, 0.5, 2.0);
  CHECK(e.t == 1.5);
  CHECK(e.lo() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(e.hi() == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("coefficient sources") {
  auto z = ASource::zero();
  CHECK(z.value(3.0, 17.0) == 0.0);

  auto cb = ASource::closed_bound(2.0);
  CHECK(cb.is_closed_bound());
  CHECK(cb.value(0.0, 3.0) == doctest::Approx(18.0).epsilon(1e-15));
  CHECK(cb.value(5.0, -1.0) == 0.0);
  CHECK_THROWS_AS(ASource::closed_bound(-0.1), std::invalid_argument);

  auto m = ASource::measured({0.0, 1.0, 2.0}, {0.0, 1.0, 0.0});
  CHECK(m.value(0.5, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m.value(1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.value(1.5, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m.value(-1.0, 0.0) == 0.0);
  CHECK(m.value(3.0, 0.0) == 0.0);

  CHECK_THROWS_AS(ASource::measured({0.0, 1.0}, {0.0, -0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ASource::measured({1.0, 1.0}, {0.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ASource::measured({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(ASource::measured({0.0}, {0.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("constant motility reduces to the logistic closed form") {
  auto c = MotilityFunction::constant(1.0);
  Envelope e0 = Envelope::from_values(0.0, 0.5, 2.0);
  auto traj = integrate_envelope(e0, ASource::zero(), c, 1.0, 5.0, 1e-3);
  REQUIRE(!traj.flagged);
  const Envelope& last = traj.back();
  CHECK(last.t == doctest::Approx(5.0).epsilon(1e-12));
  double hi_exact = logistic_closed_form(2.0, 1.0, last.t);
  double lo_exact = logistic_closed_form(0.5, 1.0, last.t);
  CHECK(std::fabs(last.hi() - hi_exact) / hi_exact <= 1e-6);
  CHECK(std::fabs(last.lo() - lo_exact) / lo_exact <= 1e-6);
}

TEST_CASE("the pair (1,1) is a bit-exact fixed point") {
  Envelope e0 = Envelope::from_values(0.0, 1.0, 1.0);
  auto gamma = MotilityFunction::exponential(0.1);
  for (const ASource& src :
       {ASource::zero(), ASource::closed_bound(0.46),
        ASource::measured({0.0, 10.0}, {0.0, 0.0})}) {
    auto traj = integrate_envelope(e0, src, gamma, 1.0, 3.0, 1e-2);
    REQUIRE(!traj.flagged);
    for (const auto& p : traj.points) {
      CHECK(p.log_lo == 0.0);
      CHECK(p.log_hi == 0.0);
    }
  }
}

TEST_CASE("RK4 self-convergence is fourth order") {
  auto gamma = MotilityFunction::exponential(0.2);
  Envelope e0 = Envelope::from_values(0.0, 0.5, 2.0);
  auto src = ASource::closed_bound(0.46);
  auto endpoint = [&](double dt) {
    auto traj = integrate_envelope(e0, src, gamma, 1.0, 2.0, dt);
    REQUIRE(!traj.flagged);
    return traj.back();
  };
  Envelope ref = endpoint(0.00125);
  Envelope a = endpoint(0.02);
  Envelope b = endpoint(0.01);
  double ea = std::max(std::fabs(a.log_lo - ref.log_lo),
                       std::fabs(a.log_hi - ref.log_hi));
  double eb = std::max(std::fabs(b.log_lo - ref.log_lo),
                       std::fabs(b.log_hi - ref.log_hi));
  CHECK(ea / eb >= 12.0);
  CHECK(ea / eb <= 20.0);
}

TEST_CASE("closed-bound run keeps every envelope ordering invariant") {
  auto gamma = MotilityFunction::exponential(0.1);
  const double mu = 1.0;
  const double mu0_hat = 0.2;  // audit supremum for this motility
  Envelope e0 = Envelope::from_values(0.0, 0.5, 2.0);
  auto src = ASource::closed_bound(0.5);
  auto traj = integrate_envelope(e0, src, gamma, mu, 30.0, 1e-3);
  REQUIRE(!traj.flagged);

  const double ratio0 = 4.0;
  double prev_gap = std::numeric_limits<double>::infinity();
  bool printed_bound_violated = false;
  for (std::size_t i = 0; i < traj.points.size(); ++i) {
    const Envelope& p = traj.points[i];
    // rectangle: 0 < u_lo <= 1 <= u_hi (log slack for roundoff)
    CHECK(p.log_lo <= 1e-9);
    CHECK(p.log_hi >= -1e-9);
    CHECK(p.log_lo <= p.log_hi + 1e-15);

    double gap = p.log_hi - p.log_lo;
    CHECK(gap <= prev_gap + 1e-12);
    prev_gap = gap;

    // ratio bound u_hi <= (u_hi0/u_lo0) u_lo
    CHECK(p.hi() <= ratio0 * p.lo() * (1.0 + 1e-8));

    // differential gap bound, evaluated directly from the rhs
    EnvelopeRhs r = envelope_rhs(p, traj.a_used[i], gamma, mu);
    CHECK(r.d_log_hi - r.d_log_lo <=
          (mu0_hat - mu) * (p.hi() - p.lo()) + 1e-12);

    DecayBound bound = decay_bound(e0, mu, mu0_hat, p.t);
    CHECK(gap <= bound.conservative * (1.0 + 1e-8));
    if (gap > bound.printed * (1.0 + 1e-8)) printed_bound_violated = true;
  }
  // the factor u_hi0/u_lo0 in the printed rate is too fast for the actual
  // flow; only the conservative variant holds along the trajectory
  CHECK(printed_bound_violated);

  double final_gap = traj.back().log_hi - traj.back().log_lo;
  CHECK(final_gap <= 1e-6);
  CHECK(std::fabs(traj.back().hi() - 1.0) <= 1e-6);
  CHECK(std::fabs(traj.back().lo() - 1.0) <= 1e-6);
}

TEST_CASE("super-logistic feedback trips the blow-up guard") {
  auto gamma = MotilityFunction::exponential(1.0);  // fails the growth audit
  Envelope e0 = Envelope::from_values(0.0, 0.5, 3.0);
  auto traj = integrate_envelope(e0, ASource::closed_bound(5.0), gamma, 0.3,
                                 5.0, 1e-3);
  CHECK(traj.flagged);
  CHECK(traj.flag_reason == "blow_up");
  CHECK(traj.flag_time <= 5.0);
  CHECK(!traj.points.empty());
  for (const auto& p : traj.points) {
    CHECK(std::isfinite(p.log_lo));
    CHECK(std::isfinite(p.log_hi));
  }
}

TEST_CASE("sign-violating motility drives u_lo across 1 and is flagged") {
  Envelope e0 = Envelope::from_values(0.0, 0.9, 2.0);
  auto traj = integrate_envelope(e0, ASource::zero(),
                                 linear_growing_motility(), 0.01, 10.0, 1e-3);
  CHECK(traj.flagged);
  CHECK(traj.flag_reason == "rectangle");
  CHECK(traj.back().lo() > 1.0);
}

TEST_CASE("bounded measured coefficient keeps u_hi under the integral bound") {
  // While u_lo <= 1, d log u_hi <= sup[-g'] u_hi + g''(0) a + mu(1 - u_hi),
  // and the audit margin makes the u_hi coefficient negative, so
  // log u_hi(t) <= log u_hi0 + mu t + g''(0) * integral of a.
  auto gamma = MotilityFunction::exponential(0.5);
  const double mu = 1.2;
  const double a_const = 2.0;
  Envelope e0 = Envelope::from_values(0.0, 0.5, 2.0);
  auto src = ASource::measured({0.0, 10.0}, {a_const, a_const});
  auto traj = integrate_envelope(e0, src, gamma, mu, 10.0, 1e-3);
  REQUIRE(!traj.flagged);
  double g2_at_0 = gamma.eval(0.0).g2;
  for (const auto& p : traj.points) {
    CHECK(p.log_hi <=
          std::log(2.0) + mu * p.t + g2_at_0 * a_const * p.t + 1e-9);
  }
}

TEST_CASE("interpolation is log-linear and clamped") {
  auto c = MotilityFunction::constant(1.0);
  Envelope e0 = Envelope::from_values(0.0, 0.5, 2.0);
  auto traj = integrate_envelope(e0, ASource::zero(), c, 1.0, 1.0, 0.25);
  Envelope mid = interpolate(traj, 0.125);
  CHECK(mid.log_lo ==
        doctest::Approx(0.5 * (traj.points[0].log_lo + traj.points[1].log_lo))
            .epsilon(1e-14));
  CHECK(mid.log_hi ==
        doctest::Approx(0.5 * (traj.points[0].log_hi + traj.points[1].log_hi))
            .epsilon(1e-14));
  CHECK(interpolate(traj, -5.0).log_hi == traj.points.front().log_hi);
  CHECK(interpolate(traj, 99.0).log_hi == traj.points.back().log_hi);
}

TEST_CASE("decay bound arithmetic") {
  Envelope e0 = Envelope::from_values(0.0, 0.5, 2.0);
  double gap0 = std::log(4.0);

  DecayBound b0 = decay_bound(e0, 1.0, 0.2, 0.0);
  CHECK(b0.printed == doctest::Approx(gap0).epsilon(1e-14));
  CHECK(b0.conservative == doctest::Approx(gap0).epsilon(1e-14));

  DecayBound b5 = decay_bound(e0, 1.0, 0.2, 5.0);
  CHECK(b5.printed == doctest::Approx(gap0 * std::exp(-16.0)).epsilon(1e-12));
  CHECK(b5.conservative ==
        doctest::Approx(gap0 * std::exp(-1.0)).epsilon(1e-12));

  DecayBound blate = decay_bound(e0, 1.0, 0.2, 500.0);
  CHECK(blate.printed <= 1e-30);
  CHECK(blate.conservative <= 1e-30);

  CHECK_THROWS_AS(decay_bound(e0, 1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(decay_bound(e0, 1.0, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(decay_bound(e0, 1.0, 0.2, -1.0), std::invalid_argument);
}

TEST_CASE("envelope CSV layout") {
  auto gamma = MotilityFunction::exponential(0.1);
  Envelope e0 = Envelope::from_values(0.0, 0.5, 2.0);
  auto traj =
      integrate_envelope(e0, ASource::closed_bound(0.5), gamma, 1.0, 1.0, 0.25);
  std::stringstream ss;
  write_envelope_csv(traj, 1.0, 0.2, ss);
  std::string text = ss.str();
  std::stringstream in(text);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,u_lo,u_hi,log_gap,a_used,bound_paper,bound_conservative");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    std::size_t commas = 0;
    for (char ch : line) commas += ch == ',' ? 1 : 0;
    CHECK(commas == 6);
  }
  CHECK(rows == traj.points.size());

  // first data row: t=0, u_lo=0.5, u_hi=2, gap=log 4, both bounds = log 4
  std::stringstream again(text);
  std::getline(again, line);
  std::getline(again, line);
  std::vector<double> cols;
  std::size_t begin = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      cols.push_back(parse_double(std::string_view(line).substr(begin, i - begin)));
      begin = i + 1;
    }
  }
  REQUIRE(cols.size() == 7);
  CHECK(cols[0] == 0.0);
  CHECK(cols[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(cols[2] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(cols[3] == doctest::Approx(std::log(4.0)).epsilon(1e-14));
  CHECK(cols[4] == doctest::Approx(0.5 * 1.5 * 1.5).epsilon(1e-14));
  CHECK(cols[5] == doctest::Approx(std::log(4.0)).epsilon(1e-14));
  CHECK(cols[6] == doctest::Approx(std::log(4.0)).epsilon(1e-14));

  // without a decay guarantee the bound columns are nan
  std::stringstream ss2;
  write_envelope_csv(traj, 1.0, 2.0, ss2);
  std::getline(ss2, line);
  std::getline(ss2, line);
  auto last_comma = line.rfind(',');
  CHECK(std::isnan(parse_double(std::string_view(line).substr(last_comma + 1))));
}
