#pragma once

#include <cstddef>
#include <functional>
#include <string>

namespace motilab {

enum class MotilityFamily { exponential, inverse_power, constant, custom };

/// Value of the motility and its first three derivatives at one point.
struct MotilityDerivs {
  double g;
  double g1;
  double g2;
  double g3;
};

/// Signal-dependent motility gamma(s) on s >= 0. Instances are immutable
/// and cheap to copy; built-in families evaluate closed forms.
class MotilityFunction {
 public:
  using CustomEval = std::function<MotilityDerivs(double)>;

  static MotilityFunction exponential(double alpha);
  static MotilityFunction inverse_power(double epsilon, double alpha);
  static MotilityFunction constant(double c);
  static MotilityFunction custom(std::string name, CustomEval eval);

  /// gamma and derivatives up to third order; throws std::domain_error for
  /// s < 0.
  MotilityDerivs eval(double s) const;

  /// gamma(s) only.
  double value(double s) const;

  /// out[i] = gamma(s[i]); vectorized for the exponential family.
  void value_many(const double* s, double* out, std::size_t n) const;

  MotilityFamily family() const { return family_; }
  double param_alpha() const { return alpha_; }
  double param_epsilon() const { return epsilon_; }
  double param_c() const { return c_; }

  /// Short human-readable description, e.g. "exponential(alpha=0.1)".
  const std::string& describe() const { return label_; }

 private:
  MotilityFunction() = default;

  MotilityFamily family_ = MotilityFamily::constant;
  double alpha_ = 0.0;
  double epsilon_ = 0.0;
  double c_ = 0.0;
  CustomEval custom_;
  std::string label_;
};

/// Numerical audit of the structural hypotheses on gamma over [0, s_max]:
/// positivity, the sign pattern gamma' <= 0 <= gamma'' with gamma''' <= 0,
/// the growth bound sup(-2 gamma' + gamma'' s) = mu0_hat < mu, and
/// finiteness of sup(gamma'^2 / gamma) = c_gamma_hat.
struct HypothesisAudit {
  double mu0_hat = 0.0;
  double c_gamma_hat = 0.0;
  double gamma_min = 0.0;     // min of gamma on the audit grid
  double margin = 0.0;        // mu - mu0_hat
  double s_max = 0.0;
  std::size_t grid_points = 0;

  bool positivity_ok = false;         // gamma > 0 everywhere on the grid
  bool sign_checks_ok = false;        // derivative sign pattern
  bool growth_ok = false;             // mu0_hat < mu
  bool c_gamma_finite = false;
  // Either supremum attained at s_max: the audited range may be too short.
  bool sup_at_boundary = false;
  double first_violation_s = -1.0;    // leftmost sign violation, if any

  bool pass() const {
    return positivity_ok && sign_checks_ok && growth_ok && c_gamma_finite;
  }
};

HypothesisAudit audit_hypotheses(const MotilityFunction& gamma, double mu,
                                 double s_max = 50.0,
                                 std::size_t n_points = 1000000);

}  // namespace motilab
