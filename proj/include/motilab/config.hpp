#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "motilab/grid.hpp"
#include "motilab/motility.hpp"
#include "motilab/pde.hpp"

namespace motilab {

// Plain-text key = value run configuration. '#' starts a comment, keys are
// dotted lowercase, every scalar is nondimensional. parse_config reports
// unknown keys, duplicates, missing required keys, and invariant
// violations with the offending line number.

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct U0Spec {
  enum class Preset { constant, cosine, random_smooth };
  Preset preset = Preset::cosine;
  double value = 1.0;      // constant preset
  double amplitude = 0.5;  // cosine and random_smooth presets, |A| < 1
  int mode = 1;            // cosine: 1 + A cos(mode*pi*x/L), product in 2D
  std::uint64_t seed = 1;  // random_smooth preset
};

struct EnvelopeSpec {
  enum class Source { measured, closed_bound, zero };
  bool auto_straddle = true;  // lo0 = min(min u0, 1-delta), hi0 likewise
  double delta = 1e-2;
  double lo0 = 0.0;  // explicit straddle when auto_straddle is false
  double hi0 = 0.0;
  Source a_source = Source::measured;
  double dt = 1e-3;
  std::optional<double> c_omega;  // overrides the estimated constant
  double c_omega_safety = 1.5;
};

struct DiagnosticsSpec {
  std::optional<double> t_check;  // defaults to t_end when unset
  double eps = 1e-3;
  double c_tol = 10.0;       // scheme-accuracy multiplier for the checks
  double positivity_tol = 1e-10;
  double decay_rel_tol = 1e-3;
  double lp_p = 4.0;
};

struct RunConfig {
  int dimension = 1;
  double extent_x = 1.0;
  double extent_y = 1.0;
  int vertices_x = 0;
  int vertices_y = 0;

  std::string motility_family;  // exponential | inverse_power | constant
  double motility_alpha = 0.0;
  double motility_epsilon = 0.0;
  double motility_c = 0.0;
  double mu = 0.0;

  U0Spec u0;
  SchemeConfig scheme;
  EnvelopeSpec envelope;
  DiagnosticsSpec diagnostics;

  int constants_samples = 200;
  std::uint64_t constants_seed = 12345;
  double audit_s_max = 50.0;
  std::string output_dir = "out";

  Grid make_grid() const;
  MotilityFunction make_motility() const;
  Field make_u0(const Grid& g) const;

  // Canonical key = value text with every default resolved; feeding it
  // back through parse_config reproduces this config exactly.
  std::string echo_text() const;
  // Same data as structured JSON for embedding in run metadata.
  std::string echo_json() const;
};

RunConfig parse_config(const std::string& text);

// sweep.KEY = v1, v2, ... lines turn one document into the cartesian
// product of configurations, first sweep line outermost. Each point is the
// base document with the swept keys overridden.
struct SweepPoint {
  std::vector<std::pair<std::string, std::string>> overrides;
  RunConfig config;
  std::string label;  // directory-safe, e.g. "mu=0.5__motility.alpha=0.1"
};

std::vector<SweepPoint> expand_sweep(const std::string& text);

}  // namespace motilab
