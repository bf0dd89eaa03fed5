#pragma once

#include <cmath>
#include <iosfwd>
#include <string>
#include <vector>

#include "motilab/motility.hpp"

namespace motilab {

// Comparison system for the spatial envelope of u. The pair (u_lo, u_hi)
// evolves by
//   d/dt log u_hi = [-g'(u_lo)](u_hi - u_lo) + g''(u_lo) a(t) + mu (1 - u_hi)
//   d/dt log u_lo = [-g'(u_lo)](u_lo - u_hi) + mu (1 - u_lo)
// integrated in log variables so positivity is structural. While the
// motility audit passes and the initial pair straddles 1, the envelope
// stays inside the rectangle 0 < u_lo <= 1 <= u_hi.

struct Envelope {
  double t = 0.0;
  double log_lo = 0.0;
  double log_hi = 0.0;

  double lo() const { return std::exp(log_lo); }
  double hi() const { return std::exp(log_hi); }

  static Envelope from_values(double t, double u_lo, double u_hi);
};

// Coefficient a(t) driving the g'' term: a measured ||grad v||_inf series
// from a PDE run (linearly interpolated, clamped at the ends), the closed
// bound a = c_omega (u_hi - u_lo)^2 recomputed from the current envelope,
// or zero.
class ASource {
 public:
  static ASource zero();
  static ASource closed_bound(double c_omega);
  static ASource measured(std::vector<double> times, std::vector<double> values);

  // gap = u_hi - u_lo of the state the coefficient is evaluated at.
  double value(double t, double gap) const;
  bool is_closed_bound() const { return kind_ == Kind::closed_bound; }
  double c_omega() const { return c_omega_; }
  std::string describe() const;

 private:
  enum class Kind { zero, closed_bound, measured };
  explicit ASource(Kind k) : kind_(k) {}

  Kind kind_;
  double c_omega_ = 0.0;
  std::vector<double> times_;
  std::vector<double> values_;
};

struct EnvelopeRhs {
  double d_log_hi;
  double d_log_lo;
};

EnvelopeRhs envelope_rhs(const Envelope& env, double a,
                         const MotilityFunction& gamma, double mu);

struct EnvelopeTrajectory {
  std::vector<Envelope> points;
  std::vector<double> a_used;  // coefficient at each point's time
  // Set when the rectangle invariant failed or u_hi blew up; points stop
  // at the first offending state.
  bool flagged = false;
  std::string flag_reason;  // "rectangle" or "blow_up"
  double flag_time = 0.0;

  const Envelope& front() const { return points.front(); }
  const Envelope& back() const { return points.back(); }
};

// Classical RK4 in (log_lo, log_hi); for closed-bound sources the
// coefficient is recomputed inside every stage. Requires
// 0 < u_lo0 <= 1 <= u_hi0.
EnvelopeTrajectory integrate_envelope(const Envelope& env0,
                                      const ASource& source,
                                      const MotilityFunction& gamma, double mu,
                                      double t_end, double dt = 1e-3);

// Log-linear interpolation between recorded points, clamped at the ends.
Envelope interpolate(const EnvelopeTrajectory& traj, double t);

// Decay estimate for the log gap: gap0 * exp((mu0 - mu) * factor * t) with
// factor u_hi0/u_lo0 (as printed) and u_lo0/u_hi0 (conservative; what the
// mean-value argument actually supports). Requires mu0 < mu.
struct DecayBound {
  double printed;
  double conservative;
};

DecayBound decay_bound(const Envelope& env0, double mu, double mu0, double t);

// Columns: t,u_lo,u_hi,log_gap,a_used,bound_paper,bound_conservative.
// Bound columns are nan when mu0_hat >= mu (no decay guarantee).
void write_envelope_csv(const EnvelopeTrajectory& traj, double mu,
                        double mu0_hat, std::ostream& os);

}  // namespace motilab
