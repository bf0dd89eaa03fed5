#pragma once

#include <optional>
#include <string>
#include <vector>

#include "motilab/envelope.hpp"
#include "motilab/pde.hpp"

namespace motilab {

// Monitors that turn the analytical guarantees into pass/fail records over
// finished trajectories. Checks never throw on bad data; they annotate.
// A check whose hypotheses the configuration does not meet is downgraded
// to informational and stops gating the report verdict.

struct CheckRecord {
  std::string name;
  std::string statement;    // the inequality being monitored, human-readable
  bool pass = false;
  bool informational = false;
  std::string note;         // downgrade reason or precondition violation
  double worst_residual = 0.0;
  double tolerance = 0.0;
  double worst_time = 0.0;  // snapshot time where worst_residual occurred
};

struct DiagnosticsReport {
  std::vector<CheckRecord> checks;

  // True iff every non-informational check passes.
  bool verdict() const;
  std::string to_json() const;
  // Fixed-width table, one row per check, verdict line at the end.
  std::string table() const;
};

// min u >= -tol across every recorded snapshot and the per-step running
// minimum. Residual is the deepest negative excursion.
CheckRecord check_positivity(const Trajectory& traj, double tol = 1e-10);

// Between consecutive snapshots the centered mass slope must match the
// trapezoid average of mu*(integrate(u) - integrate(u^2)) to
// c_tol*(dt + h^2), and total mass may never exceed
// max(M(0), |domain|)*(1 + 1e-6).
CheckRecord check_mass(const Trajectory& traj, double c_tol = 10.0);

// Upper bound for y(t) >= integral of u^p: the scalar ODE
//   y' = p*(mu*vol + c_omega*c_gamma*y^((p+2)/p)),  y(0) = y0,
// integrated with RK4. Superlinear growth means finite-time blow-up is
// expected data, detected when y exceeds 1e12.
struct LpBoundCurve {
  double p = 0.0;
  std::vector<double> times;
  std::vector<double> values;
  std::optional<double> blow_up_time;
};

LpBoundCurve integrate_lp_bound(double p, double y0, double mu, double vol,
                                double c_omega, double c_gamma, double t_end,
                                double dt = 1e-3);

// Measured integral of u^p stays below the curve at every snapshot it
// covers. Informational when the curve blows up before the run ends: past
// that point the bound promises nothing.
CheckRecord check_lp_bound(const Trajectory& traj, const LpBoundCurve& curve,
                           double tol_scale = 1e-9);

// u_lo(t) - tol <= u(x,t) <= u_hi(t) + tol at every snapshot,
// tol = c_s*(h^2 + dt). Requires the initial straddle
// u_lo(0) <= min u0 <= max u0 <= u_hi(0); a violated straddle is reported
// as a precondition violation, not a bound failure. audit_pass = false
// downgrades the record to informational.
CheckRecord check_sandwich(const Trajectory& traj,
                           const EnvelopeTrajectory& env, double c_s = 10.0,
                           bool audit_pass = true);

// a(t) <= safety*c_omega*(u_hi(t) - u_lo(t)) + tol at every snapshot,
// tol = c_tol*(h^2 + dt).
CheckRecord check_gradient_bound(const Trajectory& traj,
                                 const EnvelopeTrajectory& env,
                                 double c_omega, double safety = 1.5,
                                 double c_tol = 10.0, bool audit_pass = true);

// sup|u-1| + sup|v-1| <= eps at every snapshot with t >= t_check, plus the
// envelope triangle bound sup|u-1| <= |u_hi-1| + |u_lo-1| + tol at every
// snapshot. Informational when traj.mu <= mu0_hat: below the audited
// threshold no convergence is promised.
CheckRecord check_convergence(const Trajectory& traj,
                              const EnvelopeTrajectory& env, double t_check,
                              double eps, double mu0_hat,
                              double tri_c_tol = 10.0);

}  // namespace motilab
