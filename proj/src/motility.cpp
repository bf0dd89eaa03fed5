#include "motilab/motility.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "motilab/kernels.hpp"

namespace motilab {

namespace {

std::string format_param(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

MotilityFunction MotilityFunction::exponential(double alpha) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("exponential motility needs alpha > 0");
  MotilityFunction m;
  m.family_ = MotilityFamily::exponential;
  m.alpha_ = alpha;
  m.label_ = "exponential(alpha=" + format_param(alpha) + ")";
  return m;
}

MotilityFunction MotilityFunction::inverse_power(double epsilon, double alpha) {
  if (!(epsilon > 0.0) || !(alpha > 0.0))
    throw std::invalid_argument("inverse_power motility needs epsilon, alpha > 0");
  MotilityFunction m;
  m.family_ = MotilityFamily::inverse_power;
  m.epsilon_ = epsilon;
  m.alpha_ = alpha;
  m.label_ = "inverse_power(epsilon=" + format_param(epsilon) +
             ",alpha=" + format_param(alpha) + ")";
  return m;
}

MotilityFunction MotilityFunction::constant(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("constant motility needs c > 0");
  MotilityFunction m;
  m.family_ = MotilityFamily::constant;
  m.c_ = c;
  m.label_ = "constant(c=" + format_param(c) + ")";
  return m;
}

MotilityFunction MotilityFunction::custom(std::string name, CustomEval eval) {
  if (!eval) throw std::invalid_argument("custom motility needs an evaluator");
  MotilityFunction m;
  m.family_ = MotilityFamily::custom;
  m.custom_ = std::move(eval);
  m.label_ = std::move(name);
  return m;
}

MotilityDerivs MotilityFunction::eval(double s) const {
  if (s < 0.0) throw std::domain_error("motility evaluated at s < 0");
  switch (family_) {
    case MotilityFamily::exponential: {
      double g = std::exp(-alpha_ * s);
      double a = alpha_;
      return {g, -a * g, a * a * g, -a * a * a * g};
    }
    case MotilityFamily::inverse_power: {
      double base = epsilon_ + s;
      double g = std::pow(base, -alpha_);
      double g1 = -alpha_ * g / base;
      double g2 = -(alpha_ + 1.0) * g1 / base;
      double g3 = -(alpha_ + 2.0) * g2 / base;
      return {g, g1, g2, g3};
    }
    case MotilityFamily::constant:
      return {c_, 0.0, 0.0, 0.0};
    case MotilityFamily::custom:
      return custom_(s);
  }
  throw std::logic_error("unreachable motility family");
}

double MotilityFunction::value(double s) const {
  if (s < 0.0) throw std::domain_error("motility evaluated at s < 0");
  switch (family_) {
    case MotilityFamily::exponential:
      return std::exp(-alpha_ * s);
    case MotilityFamily::inverse_power:
      return std::pow(epsilon_ + s, -alpha_);
    case MotilityFamily::constant:
      return c_;
    case MotilityFamily::custom:
      return custom_(s).g;
  }
  throw std::logic_error("unreachable motility family");
}

void MotilityFunction::value_many(const double* s, double* out,
                                  std::size_t n) const {
  switch (family_) {
    case MotilityFamily::exponential:
      kernels::ops().exp_scale(out, s, -alpha_, n);
      return;
    case MotilityFamily::inverse_power:
      for (std::size_t i = 0; i < n; ++i) out[i] = std::pow(epsilon_ + s[i], -alpha_);
      return;
    case MotilityFamily::constant:
      for (std::size_t i = 0; i < n; ++i) out[i] = c_;
      return;
    case MotilityFamily::custom:
      for (std::size_t i = 0; i < n; ++i) out[i] = custom_(s[i]).g;
      return;
  }
}

HypothesisAudit audit_hypotheses(const MotilityFunction& gamma, double mu,
                                 double s_max, std::size_t n_points) {
  if (!(s_max > 0.0)) throw std::invalid_argument("audit needs s_max > 0");
  if (n_points < 1000) throw std::invalid_argument("audit needs n_points >= 1000");

  HypothesisAudit a;
  a.s_max = s_max;
  a.grid_points = n_points;
  a.positivity_ok = true;
  a.sign_checks_ok = true;

  double ds = s_max / double(n_points - 1);
  double mu0 = -1.0 / 0.0;
  double cg = -1.0 / 0.0;
  double gmin = 1.0 / 0.0;
  std::size_t mu0_at = 0, cg_at = 0;

  for (std::size_t i = 0; i < n_points; ++i) {
    double s = (i + 1 == n_points) ? s_max : double(i) * ds;
    MotilityDerivs d = gamma.eval(s);

    if (!(d.g > 0.0)) a.positivity_ok = false;
    bool signs = d.g1 <= 0.0 && d.g2 >= 0.0 && d.g3 <= 0.0;
    if (!signs && a.sign_checks_ok) {
      a.sign_checks_ok = false;
      a.first_violation_s = s;
    }

    double growth = -2.0 * d.g1 + d.g2 * s;
    if (growth > mu0) {
      mu0 = growth;
      mu0_at = i;
    }
    double ratio = d.g > 0.0 ? d.g1 * d.g1 / d.g : 1.0 / 0.0;
    if (ratio > cg) {
      cg = ratio;
      cg_at = i;
    }
    if (d.g < gmin) gmin = d.g;
  }

  a.mu0_hat = mu0;
  a.c_gamma_hat = cg;
  a.gamma_min = gmin;
  a.margin = mu - mu0;
  a.growth_ok = mu0 < mu;
  a.c_gamma_finite = std::isfinite(cg);
  a.sup_at_boundary = (mu0_at + 1 == n_points) || (cg_at + 1 == n_points);
  return a;
}

}  // namespace motilab
