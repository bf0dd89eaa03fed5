#include "motilab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"
#include "motilab/elliptic.hpp"
#include "motilab/format.hpp"
#include "motilab/kernels.hpp"

namespace motilab {

namespace {

void require_snapshots(const Trajectory& traj, const char* who) {
  if (traj.snapshots.empty()) {
    throw std::invalid_argument(std::string(who) +
                                ": trajectory has no snapshots");
  }
}

void require_envelope(const EnvelopeTrajectory& env, const char* who) {
  if (env.points.empty()) {
    throw std::invalid_argument(std::string(who) + ": envelope has no points");
  }
}

// Scheme accuracy scale for additive tolerances: largest step taken plus
// the squared mesh width.
double accuracy_scale(const Trajectory& traj) {
  double dt = 0.0;
  for (std::size_t k = 1; k < traj.step_times.size(); ++k) {
    dt = std::max(dt, traj.step_times[k] - traj.step_times[k - 1]);
  }
  const Grid& g = traj.snapshots.front().u.grid;
  double h = 0.0;
  for (int d = 0; d < g.dimension(); ++d) h = std::max(h, g.spacing(d));
  return dt + h * h;
}

double domain_volume(const Grid& g) {
  double vol = 1.0;
  for (int d = 0; d < g.dimension(); ++d) vol *= g.extent(d);
  return vol;
}

// Envelope data past its last recorded point certifies nothing; checks
// evaluate only covered snapshots and say so when that truncates the run.
struct Coverage {
  double t_max;
  bool truncated;
  std::string why;
};

Coverage envelope_coverage(const Trajectory& traj,
                           const EnvelopeTrajectory& env) {
  Coverage c;
  c.t_max = env.back().t + 1e-12 * std::max(1.0, std::fabs(env.back().t));
  c.truncated = traj.snapshots.back().t > c.t_max;
  if (c.truncated) {
    c.why = env.flagged
                ? "envelope integration stopped early (" + env.flag_reason +
                      " at t = " + format_double(env.flag_time) + ")"
                : "envelope ends before the trajectory does";
  }
  return c;
}

}  // namespace

bool DiagnosticsReport::verdict() const {
  for (const auto& c : checks) {
    if (!c.informational && !c.pass) return false;
  }
  return true;
}

std::string DiagnosticsReport::to_json() const {
  nlohmann::ordered_json j;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    jc["statement"] = c.statement;
    jc["pass"] = c.pass;
    jc["informational"] = c.informational;
    jc["note"] = c.note;
    jc["worst_residual"] = c.worst_residual;
    jc["tolerance"] = c.tolerance;
    jc["worst_time"] = c.worst_time;
    j["checks"].push_back(std::move(jc));
  }
  j["verdict"] = verdict();
  return j.dump(2);
}

std::string DiagnosticsReport::table() const {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-16s %-10s %-13s %-13s %-10s %s\n",
                "check", "status", "residual", "tolerance", "at t", "note");
  out += line;
  out.append(80, '-');
  out += '\n';
  for (const auto& c : checks) {
    std::string status = c.pass ? "pass" : "FAIL";
    if (c.informational) status = "info-" + status;
    std::snprintf(line, sizeof(line), "%-16s %-10s %-13.3e %-13.3e %-10.4g %s\n",
                  c.name.c_str(), status.c_str(), c.worst_residual, c.tolerance,
                  c.worst_time, c.note.c_str());
    out += line;
  }
  out += "verdict: ";
  out += verdict() ? "PASS" : "FAIL";
  out += '\n';
  return out;
}

CheckRecord check_positivity(const Trajectory& traj, double tol) {
  require_snapshots(traj, "check_positivity");
  CheckRecord rec;
  rec.name = "positivity";
  rec.statement = "min u stays above -tol at every recorded time";
  rec.tolerance = tol;

  const auto& k = kernels::ops();
  double worst = 0.0;
  double worst_t = traj.snapshots.front().t;
  for (const auto& s : traj.snapshots) {
    double lo = 0.0, hi = 0.0;
    k.minmax(s.u.values.data(), s.u.size(), lo, hi);
    double excursion = std::max(0.0, -lo);
    if (excursion > worst) {
      worst = excursion;
      worst_t = s.t;
    }
  }
  // the per-step running minimum catches dips between snapshots
  worst = std::max(worst, std::max(0.0, -traj.run_min_u));
  rec.worst_residual = worst;
  rec.worst_time = worst_t;
  rec.pass = worst <= tol;
  return rec;
}

CheckRecord check_mass(const Trajectory& traj, double c_tol) {
  require_snapshots(traj, "check_mass");
  CheckRecord rec;
  rec.name = "mass_balance";
  rec.statement =
      "d/dt integral(u) = mu*(integral(u) - integral(u^2)) to scheme "
      "accuracy; mass never exceeds max(M(0), |domain|)";
  rec.tolerance = c_tol * accuracy_scale(traj);

  const auto& k = kernels::ops();
  const Grid& g = traj.snapshots.front().u.grid;
  const std::vector<double> w = trapezoid_weights(g);
  const double mu = traj.mu;

  std::vector<double> mass, rate;
  mass.reserve(traj.snapshots.size());
  rate.reserve(traj.snapshots.size());
  for (const auto& s : traj.snapshots) {
    double m = integrate(s.u);
    double m2 = k.weighted_dot(s.u.values.data(), s.u.values.data(), w.data(),
                               s.u.size());
    mass.push_back(m);
    rate.push_back(mu * (m - m2));
  }

  double worst = 0.0;
  double worst_t = traj.snapshots.front().t;
  for (std::size_t i = 0; i + 1 < traj.snapshots.size(); ++i) {
    double t0 = traj.snapshots[i].t;
    double t1 = traj.snapshots[i + 1].t;
    if (!(t1 > t0)) continue;
    double slope = (mass[i + 1] - mass[i]) / (t1 - t0);
    double r = std::fabs(slope - 0.5 * (rate[i] + rate[i + 1]));
    if (r > worst) {
      worst = r;
      worst_t = t1;
    }
  }
  rec.worst_residual = worst;
  rec.worst_time = worst_t;
  rec.pass = worst <= rec.tolerance;

  const double cap =
      std::max(mass.front(), domain_volume(g)) * (1.0 + 1e-6);
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (mass[i] > cap) {
      rec.pass = false;
      rec.note = "mass " + format_double(mass[i]) + " exceeds cap " +
                 format_double(cap) + " at t = " +
                 format_double(traj.snapshots[i].t);
      rec.worst_time = traj.snapshots[i].t;
      break;
    }
  }
  return rec;
}

LpBoundCurve integrate_lp_bound(double p, double y0, double mu, double vol,
                                double c_omega, double c_gamma, double t_end,
                                double dt) {
  if (!(p >= 4.0)) {
    throw std::invalid_argument("integrate_lp_bound: p must be >= 4");
  }
  if (!(y0 >= 0.0) || !std::isfinite(y0)) {
    throw std::invalid_argument("integrate_lp_bound: y0 must be >= 0");
  }
  if (!(mu > 0.0) || !(vol > 0.0)) {
    throw std::invalid_argument(
        "integrate_lp_bound: mu and vol must be positive");
  }
  if (!(c_omega >= 0.0) || !(c_gamma >= 0.0)) {
    throw std::invalid_argument(
        "integrate_lp_bound: constants must be non-negative");
  }
  if (!std::isfinite(t_end) || t_end < 0.0 || !(dt > 0.0)) {
    throw std::invalid_argument(
        "integrate_lp_bound: t_end must be >= 0 and dt positive");
  }

  constexpr double kCap = 1e12;
  const double cc = c_omega * c_gamma;
  const double expo = (p + 2.0) / p;
  auto f = [&](double y) { return p * (mu * vol + cc * std::pow(y, expo)); };

  LpBoundCurve curve;
  curve.p = p;
  curve.times.push_back(0.0);
  curve.values.push_back(y0);

  double t = 0.0, y = y0;
  while (t < t_end - 1e-15 * std::max(1.0, t_end)) {
    double step = std::min(dt, t_end - t);
    double k1 = f(y);
    double k2 = f(y + 0.5 * step * k1);
    double k3 = f(y + 0.5 * step * k2);
    double k4 = f(y + step * k3);
    double y_next = y + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += step;
    if (!std::isfinite(y_next)) {
      curve.blow_up_time = t;
      break;
    }
    y = y_next;
    curve.times.push_back(t);
    curve.values.push_back(y);
    if (y > kCap) {
      curve.blow_up_time = t;
      break;
    }
  }
  return curve;
}

CheckRecord check_lp_bound(const Trajectory& traj, const LpBoundCurve& curve,
                           double tol_scale) {
  require_snapshots(traj, "check_lp_bound");
  if (curve.times.empty()) {
    throw std::invalid_argument("check_lp_bound: curve is empty");
  }
  CheckRecord rec;
  rec.name = "lp_bound";
  rec.statement =
      "integral(u^p) stays below the comparison ODE curve while it exists";
  rec.tolerance = tol_scale * std::max(1.0, curve.values.front());

  double worst = 0.0;
  double worst_t = traj.snapshots.front().t;
  const double t_cov =
      curve.times.back() + 1e-12 * std::max(1.0, curve.times.back());
  for (const auto& s : traj.snapshots) {
    if (s.t > t_cov) break;
    double measured = std::pow(lp_norm(s.u, curve.p), curve.p);
    // piecewise-linear curve value at s.t
    auto it =
        std::upper_bound(curve.times.begin(), curve.times.end(), s.t);
    double bound;
    if (it == curve.times.begin()) {
      bound = curve.values.front();
    } else if (it == curve.times.end()) {
      bound = curve.values.back();
    } else {
      std::size_t j = static_cast<std::size_t>(it - curve.times.begin());
      double t0 = curve.times[j - 1], t1 = curve.times[j];
      double w = (s.t - t0) / (t1 - t0);
      bound = (1.0 - w) * curve.values[j - 1] + w * curve.values[j];
    }
    double r = std::max(0.0, measured - bound);
    if (r > worst) {
      worst = r;
      worst_t = s.t;
    }
  }
  rec.worst_residual = worst;
  rec.worst_time = worst_t;
  rec.pass = worst <= rec.tolerance;

  if (curve.blow_up_time &&
      *curve.blow_up_time <
          traj.snapshots.back().t -
              1e-12 * std::max(1.0, traj.snapshots.back().t)) {
    rec.informational = true;
    rec.note = "curve blows up at t = " + format_double(*curve.blow_up_time) +
               ", before the run ends; only the covered window is checked";
  }
  return rec;
}

CheckRecord check_sandwich(const Trajectory& traj,
                           const EnvelopeTrajectory& env, double c_s,
                           bool audit_pass) {
  require_snapshots(traj, "check_sandwich");
  require_envelope(env, "check_sandwich");
  CheckRecord rec;
  rec.name = "sandwich";
  rec.statement =
      "u_lo(t) <= u(x,t) <= u_hi(t) up to scheme accuracy at every snapshot";
  rec.tolerance = c_s * accuracy_scale(traj);

  const auto& k = kernels::ops();
  const SimState& first = traj.snapshots.front();
  double lo0 = 0.0, hi0 = 0.0;
  k.minmax(first.u.values.data(), first.u.size(), lo0, hi0);
  const double slack = 1e-12;
  if (env.front().lo() > lo0 + slack || env.front().hi() < hi0 - slack) {
    rec.pass = false;
    rec.note = "precondition violation: envelope (" +
               format_double(env.front().lo()) + ", " +
               format_double(env.front().hi()) +
               ") does not straddle u0 range (" + format_double(lo0) + ", " +
               format_double(hi0) + ")";
    rec.worst_time = first.t;
    return rec;
  }

  Coverage cov = envelope_coverage(traj, env);
  double worst = 0.0;
  double worst_t = first.t;
  for (const auto& s : traj.snapshots) {
    if (s.t > cov.t_max) break;
    Envelope e = interpolate(env, s.t);
    double lo = 0.0, hi = 0.0;
    k.minmax(s.u.values.data(), s.u.size(), lo, hi);
    double r = std::max({0.0, e.lo() - lo, hi - e.hi()});
    if (r > worst) {
      worst = r;
      worst_t = s.t;
    }
  }
  rec.worst_residual = worst;
  rec.worst_time = worst_t;
  rec.pass = worst <= rec.tolerance;
  if (cov.truncated) {
    rec.informational = true;
    rec.note = cov.why;
  }
  if (!audit_pass) {
    rec.informational = true;
    rec.note = rec.note.empty()
                   ? "motility audit failed; comparison system not justified"
                   : rec.note +
                         "; motility audit failed, comparison system not "
                         "justified";
  }
  return rec;
}

CheckRecord check_gradient_bound(const Trajectory& traj,
                                 const EnvelopeTrajectory& env,
                                 double c_omega, double safety, double c_tol,
                                 bool audit_pass) {
  require_snapshots(traj, "check_gradient_bound");
  require_envelope(env, "check_gradient_bound");
  if (!(c_omega >= 0.0) || !(safety > 0.0)) {
    throw std::invalid_argument(
        "check_gradient_bound: c_omega >= 0 and safety > 0 required");
  }
  CheckRecord rec;
  rec.name = "gradient_bound";
  rec.statement =
      "sup|grad v| <= safety*c_omega*(u_hi - u_lo) up to scheme accuracy";
  rec.tolerance = c_tol * accuracy_scale(traj);

  Coverage cov = envelope_coverage(traj, env);
  double worst = 0.0;
  double worst_t = traj.snapshots.front().t;
  for (const auto& s : traj.snapshots) {
    if (s.t > cov.t_max) break;
    Envelope e = interpolate(env, s.t);
    double r = std::max(0.0, s.a - safety * c_omega * (e.hi() - e.lo()));
    if (r > worst) {
      worst = r;
      worst_t = s.t;
    }
  }
  rec.worst_residual = worst;
  rec.worst_time = worst_t;
  rec.pass = worst <= rec.tolerance;
  if (cov.truncated) {
    rec.informational = true;
    rec.note = cov.why;
  }
  if (!audit_pass) {
    rec.informational = true;
    rec.note = rec.note.empty()
                   ? "motility audit failed; comparison system not justified"
                   : rec.note +
                         "; motility audit failed, comparison system not "
                         "justified";
  }
  return rec;
}

CheckRecord check_convergence(const Trajectory& traj,
                              const EnvelopeTrajectory& env, double t_check,
                              double eps, double mu0_hat, double tri_c_tol) {
  require_snapshots(traj, "check_convergence");
  require_envelope(env, "check_convergence");
  if (!(eps > 0.0) || !std::isfinite(t_check)) {
    throw std::invalid_argument(
        "check_convergence: eps > 0 and finite t_check required");
  }
  CheckRecord rec;
  rec.name = "convergence";
  rec.statement =
      "sup|u-1| + sup|v-1| <= eps from t_check on; sup|u-1| <= |u_hi-1| + "
      "|u_lo-1| throughout";
  rec.tolerance = eps;

  const auto& k = kernels::ops();
  const double t_gate = t_check - 1e-9 * std::max(1.0, std::fabs(t_check));
  if (traj.snapshots.back().t < t_gate) {
    rec.pass = false;
    rec.note = "t_check = " + format_double(t_check) +
               " lies beyond the trajectory end t = " +
               format_double(traj.snapshots.back().t);
    rec.worst_time = traj.snapshots.back().t;
    return rec;
  }

  double worst = 0.0;
  double worst_t = traj.snapshots.back().t;
  for (const auto& s : traj.snapshots) {
    if (s.t < t_gate) continue;
    double du = k.max_abs_dev(s.u.values.data(), 1.0, s.u.size());
    double dv = k.max_abs_dev(s.v.values.data(), 1.0, s.v.size());
    if (du + dv > worst) {
      worst = du + dv;
      worst_t = s.t;
    }
  }
  rec.worst_residual = worst;
  rec.worst_time = worst_t;
  rec.pass = worst <= eps;

  // envelope triangle bound, over the window the envelope covers
  Coverage cov = envelope_coverage(traj, env);
  const double tri_tol = tri_c_tol * accuracy_scale(traj);
  for (const auto& s : traj.snapshots) {
    if (s.t > cov.t_max) break;
    Envelope e = interpolate(env, s.t);
    double du = k.max_abs_dev(s.u.values.data(), 1.0, s.u.size());
    double bound = std::fabs(e.hi() - 1.0) + std::fabs(1.0 - e.lo());
    if (du > bound + tri_tol) {
      rec.pass = false;
      rec.note = "triangle bound exceeded by " +
                 format_double(du - bound - tri_tol) + " at t = " +
                 format_double(s.t);
      rec.worst_time = s.t;
      break;
    }
  }

  if (traj.mu <= mu0_hat) {
    rec.informational = true;
    rec.note = rec.note.empty()
                   ? "mu = " + format_double(traj.mu) +
                         " is at or below the audited threshold " +
                         format_double(mu0_hat) + "; no convergence promised"
                   : rec.note + "; mu at or below the audited threshold";
  }
  return rec;
}

}  // namespace motilab
