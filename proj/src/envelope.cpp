#include "motilab/envelope.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "motilab/format.hpp"

namespace motilab {

namespace {

constexpr double kLogCap = 27.631021115928547;  // log(1e12)
constexpr double kRectSlack = 1e-9;  // roundoff slack around log 1 = 0

struct LogPair {
  double lo;
  double hi;
};

bool finite_pair(const LogPair& y) {
  return std::isfinite(y.lo) && std::isfinite(y.hi);
}

}  // namespace

Envelope Envelope::from_values(double t, double u_lo, double u_hi) {
  if (!(u_lo > 0.0) || !(u_hi > 0.0) || !std::isfinite(u_lo) ||
      !std::isfinite(u_hi)) {
    throw std::invalid_argument("envelope values must be positive and finite");
  }
  if (u_lo > u_hi) {
    throw std::invalid_argument("envelope needs u_lo <= u_hi");
  }
  return Envelope{t, std::log(u_lo), std::log(u_hi)};
}

ASource ASource::zero() { return ASource(Kind::zero); }

ASource ASource::closed_bound(double c_omega) {
  if (!(c_omega >= 0.0) || !std::isfinite(c_omega)) {
    throw std::invalid_argument("closed-bound source needs c_omega >= 0");
  }
  ASource s(Kind::closed_bound);
  s.c_omega_ = c_omega;
  return s;
}

ASource ASource::measured(std::vector<double> times,
                          std::vector<double> values) {
  if (times.size() != values.size() || times.empty()) {
    throw std::invalid_argument(
        "measured source needs matching non-empty time and value series");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(values[i]) ||
        values[i] < 0.0) {
      throw std::invalid_argument(
          "measured source needs finite times and non-negative values");
    }
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw std::invalid_argument(
          "measured source needs strictly increasing times");
    }
  }
  ASource s(Kind::measured);
  s.times_ = std::move(times);
  s.values_ = std::move(values);
  return s;
}

double ASource::value(double t, double gap) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::closed_bound: {
      double g = std::max(gap, 0.0);
      return c_omega_ * g * g;
    }
    case Kind::measured: {
      if (t <= times_.front()) return values_.front();
      if (t >= times_.back()) return values_.back();
      auto it = std::upper_bound(times_.begin(), times_.end(), t);
      std::size_t i = std::size_t(it - times_.begin());
      double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
      return values_[i - 1] + w * (values_[i] - values_[i - 1]);
    }
  }
  return 0.0;
}

std::string ASource::describe() const {
  switch (kind_) {
    case Kind::zero:
      return "zero";
    case Kind::closed_bound:
      return "closed_bound(c_omega=" + format_double(c_omega_) + ")";
    case Kind::measured:
      return "measured(" + std::to_string(times_.size()) + " samples)";
  }
  return "";
}

EnvelopeRhs envelope_rhs(const Envelope& env, double a,
                         const MotilityFunction& gamma, double mu) {
  if (!(a >= 0.0) || !std::isfinite(a)) {
    throw std::invalid_argument("envelope coefficient a must be >= 0");
  }
  const double lo = env.lo();
  const double hi = env.hi();
  // Both derivative evaluations sit at the lower envelope value.
  MotilityDerivs d = gamma.eval(lo);
  double d_log_hi = (-d.g1) * (hi - lo) + d.g2 * a + mu * (1.0 - hi);
  double d_log_lo = (-d.g1) * (lo - hi) + mu * (1.0 - lo);
  return {d_log_hi, d_log_lo};
}

EnvelopeTrajectory integrate_envelope(const Envelope& env0,
                                      const ASource& source,
                                      const MotilityFunction& gamma, double mu,
                                      double t_end, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("envelope integration needs dt > 0");
  }
  if (!std::isfinite(env0.log_lo) || !std::isfinite(env0.log_hi)) {
    throw std::invalid_argument("envelope initial state must be finite");
  }
  if (!(env0.log_lo <= 0.0) || !(env0.log_hi >= 0.0)) {
    throw std::invalid_argument(
        "envelope initial values must straddle 1: u_lo0 <= 1 <= u_hi0");
  }
  if (!(t_end >= env0.t)) {
    throw std::invalid_argument("envelope integration needs t_end >= start");
  }

  EnvelopeTrajectory traj;
  LogPair y{env0.log_lo, env0.log_hi};
  double t = env0.t;

  auto gap_of = [](const LogPair& p) {
    return std::exp(p.hi) - std::exp(p.lo);
  };
  auto rhs_at = [&](double time, const LogPair& p, LogPair& out) {
    if (!finite_pair(p) || p.hi > kLogCap) return false;
    Envelope e{time, p.lo, p.hi};
    EnvelopeRhs r = envelope_rhs(e, source.value(time, gap_of(p)), gamma, mu);
    out = {r.d_log_lo, r.d_log_hi};
    return finite_pair(out);
  };

  traj.points.push_back(Envelope{t, y.lo, y.hi});
  traj.a_used.push_back(source.value(t, gap_of(y)));

  while (t < t_end - 1e-15 * std::max(1.0, std::fabs(t_end))) {
    const double h = std::min(dt, t_end - t);
    LogPair k1{}, k2{}, k3{}, k4{};
    LogPair s2{}, s3{}, s4{};
    bool ok = rhs_at(t, y, k1);
    if (ok) {
      s2 = {y.lo + 0.5 * h * k1.lo, y.hi + 0.5 * h * k1.hi};
      ok = rhs_at(t + 0.5 * h, s2, k2);
    }
    if (ok) {
      s3 = {y.lo + 0.5 * h * k2.lo, y.hi + 0.5 * h * k2.hi};
      ok = rhs_at(t + 0.5 * h, s3, k3);
    }
    if (ok) {
      s4 = {y.lo + h * k3.lo, y.hi + h * k3.hi};
      ok = rhs_at(t + h, s4, k4);
    }
    if (!ok) {
      traj.flagged = true;
      traj.flag_reason = "blow_up";
      traj.flag_time = t;
      return traj;
    }
    y.lo += h / 6.0 * (k1.lo + 2.0 * k2.lo + 2.0 * k3.lo + k4.lo);
    y.hi += h / 6.0 * (k1.hi + 2.0 * k2.hi + 2.0 * k3.hi + k4.hi);
    t += h;

    traj.points.push_back(Envelope{t, y.lo, y.hi});
    traj.a_used.push_back(source.value(t, gap_of(y)));

    if (!finite_pair(y) || y.hi > kLogCap) {
      traj.flagged = true;
      traj.flag_reason = "blow_up";
      traj.flag_time = t;
      return traj;
    }
    if (y.lo > kRectSlack || y.hi < -kRectSlack) {
      traj.flagged = true;
      traj.flag_reason = "rectangle";
      traj.flag_time = t;
      return traj;
    }
  }
  return traj;
}

Envelope interpolate(const EnvelopeTrajectory& traj, double t) {
  if (traj.points.empty()) {
    throw std::invalid_argument("cannot interpolate an empty trajectory");
  }
  const auto& pts = traj.points;
  if (t <= pts.front().t) return pts.front();
  if (t >= pts.back().t) return pts.back();
  auto it = std::upper_bound(
      pts.begin(), pts.end(), t,
      [](double value, const Envelope& e) { return value < e.t; });
  std::size_t i = std::size_t(it - pts.begin());
  const Envelope& a = pts[i - 1];
  const Envelope& b = pts[i];
  double w = (t - a.t) / (b.t - a.t);
  return Envelope{t, a.log_lo + w * (b.log_lo - a.log_lo),
                  a.log_hi + w * (b.log_hi - a.log_hi)};
}

DecayBound decay_bound(const Envelope& env0, double mu, double mu0, double t) {
  if (!(mu0 < mu)) {
    throw std::invalid_argument(
        "decay bound needs mu0 < mu (growth dominates the audit supremum)");
  }
  if (!(env0.log_lo <= 0.0) || !(env0.log_hi >= 0.0)) {
    throw std::invalid_argument(
        "decay bound needs envelope values straddling 1");
  }
  if (!(t >= 0.0)) {
    throw std::invalid_argument("decay bound needs t >= 0");
  }
  const double gap0 = env0.log_hi - env0.log_lo;
  const double ratio0 = std::exp(gap0);  // u_hi0 / u_lo0 >= 1
  const double rate = mu0 - mu;          // < 0
  return {gap0 * std::exp(rate * ratio0 * t),
          gap0 * std::exp(rate / ratio0 * t)};
}

void write_envelope_csv(const EnvelopeTrajectory& traj, double mu,
                        double mu0_hat, std::ostream& os) {
  os << "t,u_lo,u_hi,log_gap,a_used,bound_paper,bound_conservative\n";
  if (traj.points.empty()) return;
  const bool have_bound = mu0_hat < mu;
  const Envelope& first = traj.points.front();
  std::string line;
  for (std::size_t i = 0; i < traj.points.size(); ++i) {
    const Envelope& e = traj.points[i];
    double rel_t = e.t - first.t;
    double bp = std::nan("");
    double bc = std::nan("");
    if (have_bound) {
      DecayBound b = decay_bound(first, mu, mu0_hat, rel_t);
      bp = b.printed;
      bc = b.conservative;
    }
    line.clear();
    append_double(line, e.t);
    line.push_back(',');
    append_double(line, e.lo());
    line.push_back(',');
    append_double(line, e.hi());
    line.push_back(',');
    append_double(line, e.log_hi - e.log_lo);
    line.push_back(',');
    append_double(line, traj.a_used[i]);
    line.push_back(',');
    append_double(line, bp);
    line.push_back(',');
    append_double(line, bc);
    line.push_back('\n');
    os << line;
  }
}

}  // namespace motilab
