#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"
#include "motilab/diagnostics.hpp"
#include "motilab/elliptic.hpp"
#include "motilab/envelope.hpp"
#include "motilab/grid.hpp"
#include "motilab/kernels.hpp"
#include "motilab/motility.hpp"
#include "motilab/pde.hpp"

using namespace motilab;

namespace {

Field cosine_profile(const Grid& g, double amplitude) {
  return Field::from_function(g, [amplitude](double x, double) {
    return 1.0 + amplitude * std::cos(M_PI * x);
  });
}

Trajectory constant_run(double value, double t_end, int stride) {
  Grid g = Grid::line(1.0, 21);
  SchemeConfig cfg;
  cfg.t_end = t_end;
  cfg.output_stride = stride;
  return run(Field::constant(g, value), MotilityFunction::constant(1.0), 1.0,
             cfg);
}

// Converging fixture shared by the envelope-driven checks.
struct EnvCase {
  Trajectory traj;
  EnvelopeTrajectory env;
};

EnvCase converging_case(double t_end = 2.0) {
  Grid g = Grid::line(1.0, 41);
  auto gamma = MotilityFunction::exponential(0.1);
  SchemeConfig cfg;
  cfg.t_end = t_end;
  cfg.output_stride = 50;
  Trajectory traj = run(cosine_profile(g, 0.3), gamma, 1.0, cfg);

  double lo0 = 0.0, hi0 = 0.0;
  kernels::ops().minmax(traj.snapshots.front().u.values.data(),
                        traj.snapshots.front().u.size(), lo0, hi0);
  EnvelopeTrajectory env = integrate_envelope(
      Envelope::from_values(0.0, lo0, hi0),
      ASource::measured(traj.step_times, traj.step_a), gamma, 1.0, t_end);
  return {std::move(traj), std::move(env)};
}

EnvelopeTrajectory trivial_envelope(double lo, double hi, double t_end) {
  return integrate_envelope(Envelope::from_values(0.0, lo, hi),
                            ASource::zero(), MotilityFunction::constant(1.0),
                            1.0, t_end);
}

}  // namespace

TEST_CASE("positivity check accepts clean runs and localizes injections") {
  Trajectory traj = constant_run(1.0, 0.05, 10);

  CheckRecord rec = check_positivity(traj);
  CHECK(rec.pass);
  CHECK(rec.worst_residual == 0.0);
  CHECK(!rec.informational);

  // inject a negative vertex into one snapshot
  REQUIRE(traj.snapshots.size() >= 3);
  std::size_t mid = traj.snapshots.size() / 2;
  traj.snapshots[mid].u.values[4] = -1e-3;
  CheckRecord bad = check_positivity(traj);
  CHECK(!bad.pass);
  CHECK(bad.worst_residual == doctest::Approx(1e-3));
  CHECK(bad.worst_time == doctest::Approx(traj.snapshots[mid].t));

  // the per-step minimum is consulted even when snapshots look clean
  traj.snapshots[mid].u.values[4] = 1.0;
  traj.run_min_u = -5e-4;
  CheckRecord dip = check_positivity(traj);
  CHECK(!dip.pass);
  CHECK(dip.worst_residual == doctest::Approx(5e-4));
}

TEST_CASE("mass check is exact on the steady state") {
  Trajectory traj = constant_run(1.0, 0.05, 10);
  CheckRecord rec = check_mass(traj);
  CHECK(rec.pass);
  CHECK(rec.worst_residual == 0.0);
}

TEST_CASE("mass check sees the O(dt) residual of a uniform logistic run") {
  // spatially uniform data stays uniform; the balance closes up to the
  // trapezoid error over each snapshot gap
  Trajectory traj = constant_run(0.5, 1.0, 10);
  CheckRecord rec = check_mass(traj);
  CHECK(rec.pass);
  CHECK(rec.worst_residual > 0.0);
  CHECK(rec.worst_residual <= rec.tolerance);

  // tampered mass above the cap flips the verdict with an explanation
  for (auto& v : traj.snapshots[2].u.values) v = 3.0;
  CheckRecord bad = check_mass(traj);
  CHECK(!bad.pass);
  CHECK(bad.note.find("exceeds cap") != std::string::npos);
  CHECK(bad.worst_time == doctest::Approx(traj.snapshots[2].t));
}

TEST_CASE("lp bound ODE matches the affine closed form when the nonlinear "
          "coefficient vanishes") {
  double p = 4.0, mu = 1.3, vol = 0.7, y0 = 2.0;
  LpBoundCurve c = integrate_lp_bound(p, y0, mu, vol, 0.0, 5.0, 3.0);
  REQUIRE(!c.blow_up_time.has_value());
  REQUIRE(c.times.back() == doctest::Approx(3.0).epsilon(1e-14));
  for (std::size_t i = 0; i < c.times.size(); ++i) {
    double exact = y0 + p * mu * vol * c.times[i];
    CHECK(std::fabs(c.values[i] - exact) <= 1e-10 * std::max(1.0, exact));
  }
  // monotone by positivity of the right-hand side
  for (std::size_t i = 1; i < c.values.size(); ++i) {
    CHECK(c.values[i] >= c.values[i - 1]);
  }
}

TEST_CASE("lp bound ODE leading order from zero initial data") {
  LpBoundCurve c = integrate_lp_bound(4.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.01,
                                      1e-4);
  // y ~ p*mu*vol*t while y is tiny
  CHECK(c.values.back() == doctest::Approx(0.04).epsilon(1e-3));
}

TEST_CASE("lp bound ODE detects finite-time blow-up") {
  // frozen oracle: integral_1^inf dy / (4(1+y^1.5)) = 0.41782...; the
  // detector reports the first grid time with y above 1e12, one step late
  // at most
  LpBoundCurve c = integrate_lp_bound(4.0, 1.0, 1.0, 1.0, 1.0, 1.0, 10.0,
                                      1e-4);
  REQUIRE(c.blow_up_time.has_value());
  CHECK(std::fabs(*c.blow_up_time - 0.4178) <= 2.5e-4);
  CHECK(c.times.back() == doctest::Approx(*c.blow_up_time));
  CHECK(c.values.back() > 1e12);
  for (std::size_t i = 1; i < c.values.size(); ++i) {
    CHECK(c.values[i] >= c.values[i - 1]);
  }
}

TEST_CASE("lp bound ODE rejects bad arguments") {
  CHECK_THROWS_AS(integrate_lp_bound(3.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(integrate_lp_bound(4.0, -1.0, 1.0, 1.0, 1.0, 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(integrate_lp_bound(4.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      integrate_lp_bound(4.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0),
      std::invalid_argument);
}

TEST_CASE("lp bound comparison against a measured trajectory") {
  Trajectory traj = constant_run(1.0, 0.5, 100);
  double y0 = std::pow(lp_norm(traj.snapshots.front().u, 4.0), 4.0);

  // growing curve sits above the constant measurement
  LpBoundCurve curve = integrate_lp_bound(4.0, y0, 1.0, 1.0, 0.0, 0.0, 0.5);
  CheckRecord rec = check_lp_bound(traj, curve);
  CHECK(rec.pass);
  CHECK(!rec.informational);
  CHECK(rec.worst_residual == 0.0);

  // a curve seeded below the measurement fails immediately
  LpBoundCurve low = integrate_lp_bound(4.0, 0.5 * y0, 1.0, 1.0, 0.0, 0.0,
                                        0.5);
  CheckRecord bad = check_lp_bound(traj, low);
  CHECK(!bad.pass);
  CHECK(bad.worst_residual == doctest::Approx(0.5 * y0).epsilon(1e-6));

  // early blow-up downgrades the record to informational
  LpBoundCurve explode =
      integrate_lp_bound(4.0, y0, 1.0, 1.0, 50.0, 50.0, 0.5, 1e-4);
  REQUIRE(explode.blow_up_time.has_value());
  REQUIRE(*explode.blow_up_time < 0.5);
  CheckRecord info = check_lp_bound(traj, explode);
  CHECK(info.informational);
  CHECK(info.pass);
  CHECK(info.note.find("blows up") != std::string::npos);
}

TEST_CASE("sandwich check straddles a constant run trivially") {
  Trajectory traj = constant_run(1.0, 0.5, 100);
  EnvelopeTrajectory env = trivial_envelope(0.9, 1.1, 0.5);
  CheckRecord rec = check_sandwich(traj, env);
  CHECK(rec.pass);
  CHECK(rec.worst_residual == 0.0);
  CHECK(!rec.informational);
}

TEST_CASE("sandwich check holds on a converging run with measured a(t)") {
  EnvCase c = converging_case();
  CheckRecord rec = check_sandwich(c.traj, c.env);
  CHECK(rec.pass);
  CHECK(!rec.informational);
  CHECK(rec.worst_residual <= rec.tolerance);
}

TEST_CASE("sandwich precondition violation is reported as such") {
  // the envelope is legal on its own but does not straddle this u0
  Trajectory traj = constant_run(0.8, 0.1, 100);
  EnvelopeTrajectory env = trivial_envelope(0.9, 1.1, 0.1);
  CheckRecord rec = check_sandwich(traj, env);
  CHECK(!rec.pass);
  CHECK(rec.note.find("precondition violation") != std::string::npos);
  CHECK(!rec.informational);
}

TEST_CASE("sandwich tolerance is monotone and audit gating downgrades") {
  Trajectory traj = constant_run(1.0, 0.1, 20);
  EnvelopeTrajectory env = trivial_envelope(0.9, 1.1, 0.1);
  // push one snapshot outside the envelope
  std::size_t mid = traj.snapshots.size() / 2;
  traj.snapshots[mid].u.values[7] = 1.5;

  bool previous_pass = false;
  for (double c_s : {1.0, 1e3, 1e5}) {
    CheckRecord rec = check_sandwich(traj, env, c_s);
    if (previous_pass) CHECK(rec.pass);  // raising tol never flips pass->fail
    previous_pass = rec.pass;
    CHECK(rec.worst_residual == doctest::Approx(1.5 - interpolate(env, traj.snapshots[mid].t).hi()));
  }
  CHECK(previous_pass);  // largest tolerance passes
  CHECK(!check_sandwich(traj, env, 1.0).pass);

  CheckRecord gated = check_sandwich(traj, env, 10.0, false);
  CHECK(gated.informational);
  CHECK(gated.note.find("audit") != std::string::npos);
}

TEST_CASE("gradient bound check on constant and converging runs") {
  Trajectory flat = constant_run(1.0, 0.1, 100);
  EnvelopeTrajectory env_flat = trivial_envelope(0.9, 1.1, 0.1);
  CheckRecord rec = check_gradient_bound(flat, env_flat, 0.5);
  CHECK(rec.pass);
  CHECK(rec.worst_residual == 0.0);

  EnvCase c = converging_case();
  CheckRecord grad = check_gradient_bound(c.traj, c.env, 0.462);
  CHECK(grad.pass);
  CHECK(!grad.informational);

  // c_omega = 0 with a genuinely nonconstant signal fails
  CheckRecord zero = check_gradient_bound(c.traj, c.env, 0.0);
  CHECK(!zero.pass);
  CHECK(zero.worst_residual > zero.tolerance);
}

TEST_CASE("convergence check on the steady state at t_check zero") {
  Trajectory traj = constant_run(1.0, 0.1, 100);
  EnvelopeTrajectory env = trivial_envelope(1.0, 1.0, 0.1);
  CheckRecord rec = check_convergence(traj, env, 0.0, 1e-10, 0.2);
  CHECK(rec.pass);
  CHECK(!rec.informational);
}

TEST_CASE("convergence check on a converging run, with mu gating") {
  EnvCase c = converging_case(4.0);
  CheckRecord rec = check_convergence(c.traj, c.env, 4.0, 1e-3, 0.2);
  CHECK(rec.pass);
  CHECK(!rec.informational);
  CHECK(rec.worst_residual <= 1e-3);

  // mu at or below the audited threshold downgrades the check
  CheckRecord gated = check_convergence(c.traj, c.env, 4.0, 1e-3, 1.0);
  CHECK(gated.informational);
  CHECK(gated.pass == rec.pass);

  // t_check beyond the run is a reported failure, not an exception
  CheckRecord beyond = check_convergence(c.traj, c.env, 9.0, 1e-3, 0.2);
  CHECK(!beyond.pass);
  CHECK(beyond.note.find("beyond the trajectory") != std::string::npos);
}

TEST_CASE("convergence triangle bound catches an escape above the envelope") {
  Trajectory traj = constant_run(1.0, 0.1, 20);
  EnvelopeTrajectory env = trivial_envelope(0.95, 1.05, 0.1);
  std::size_t mid = traj.snapshots.size() / 2;
  traj.snapshots[mid].u.values[3] = 1.4;  // sup|u-1| = 0.4 > 0.05 + 0.05
  CheckRecord rec = check_convergence(traj, env, 0.0, 1.0, 0.2);
  CHECK(!rec.pass);
  CHECK(rec.note.find("triangle") != std::string::npos);
}

TEST_CASE("report verdict, table, and JSON serialization") {
  Trajectory traj = constant_run(1.0, 0.05, 10);
  EnvelopeTrajectory env = trivial_envelope(0.9, 1.1, 0.05);

  DiagnosticsReport report;
  report.checks.push_back(check_positivity(traj));
  report.checks.push_back(check_mass(traj));
  report.checks.push_back(check_sandwich(traj, env));
  CHECK(report.verdict());

  // informational failure does not gate; a real failure does
  CheckRecord info_fail;
  info_fail.name = "gated";
  info_fail.pass = false;
  info_fail.informational = true;
  report.checks.push_back(info_fail);
  CHECK(report.verdict());

  CheckRecord hard_fail;
  hard_fail.name = "hard";
  hard_fail.pass = false;
  report.checks.push_back(hard_fail);
  CHECK(!report.verdict());

  std::string table = report.table();
  CHECK(table.find("positivity") != std::string::npos);
  CHECK(table.find("info-FAIL") != std::string::npos);
  CHECK(table.find("verdict: FAIL") != std::string::npos);

  auto j = nlohmann::json::parse(report.to_json());
  REQUIRE(j.contains("checks"));
  CHECK(j["checks"].size() == report.checks.size());
  CHECK(j["verdict"] == false);
  CHECK(j["checks"][0]["name"] == "positivity");
  CHECK(j["checks"][0]["pass"] == true);
  CHECK(j["checks"][0].contains("tolerance"));
  CHECK(j["checks"][0].contains("worst_residual"));
  CHECK(j["checks"][0].contains("worst_time"));
  CHECK(j["checks"][0].contains("statement"));

  // identical inputs reproduce the identical report
  DiagnosticsReport again;
  again.checks.push_back(check_positivity(traj));
  again.checks.push_back(check_mass(traj));
  again.checks.push_back(check_sandwich(traj, env));
  again.checks.push_back(info_fail);
  again.checks.push_back(hard_fail);
  CHECK(again.to_json() == report.to_json());
}

TEST_CASE("checks reject malformed inputs") {
  Trajectory empty;
  CHECK_THROWS_AS(check_positivity(empty), std::invalid_argument);
  CHECK_THROWS_AS(check_mass(empty), std::invalid_argument);

  Trajectory traj = constant_run(1.0, 0.05, 10);
  EnvelopeTrajectory no_env;
  CHECK_THROWS_AS(check_sandwich(traj, no_env), std::invalid_argument);
  CHECK_THROWS_AS(check_gradient_bound(traj, no_env, 0.5),
                  std::invalid_argument);

  EnvelopeTrajectory env = trivial_envelope(0.9, 1.1, 0.05);
  CHECK_THROWS_AS(check_gradient_bound(traj, env, -1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(check_convergence(traj, env, 0.0, 0.0, 0.2),
                  std::invalid_argument);
}
