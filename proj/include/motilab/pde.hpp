#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "motilab/grid.hpp"
#include "motilab/motility.hpp"

namespace motilab {

// Explicit time stepping for the density equation
//   u_t = lap(gamma(v) u) + mu u (1 - u),   (I - lap)v = u,
// with mirror-ghost Neumann boundaries. Both spatial forms discretize the
// same operator: the conservative form applies the Laplacian stencil to the
// composite field w = gamma(v) u; the non-divergence form expands it as
//   gamma(v) lap u + 2 gamma'(v) grad v . grad u + u gamma'(v)(v - u)
//   + u gamma''(v) |grad v|^2,
// where lap v has been eliminated via lap v = v - u.
enum class SpatialForm { conservative, non_divergence };

struct SchemeConfig {
  SpatialForm form = SpatialForm::conservative;
  // Present: reaction uses the positive part (u)+ and the elliptic
  // right-hand side becomes u / (1 + (u)+ / n). Requires n >= 1.
  std::optional<double> regularization_n;
  double cfl_safety = 0.9;  // in (0, 1]
  double t_end = 1.0;
  std::int64_t output_stride = 1;  // snapshot every this many steps
  // Present: use this step everywhere instead of the adaptive CFL step.
  // Still validated against the stability bound at every step.
  std::optional<double> fixed_dt;
};

// One time level. v always solves the screened Poisson problem for the
// current u (regularized right-hand side when configured), and a caches
// grad_sup_norm(v).
struct SimState {
  double t = 0.0;
  Field u;
  Field v;
  double a = 0.0;
};

// Non-finite values appeared during stepping; carries the simulation time.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

// Solves the elliptic problem for u0 and packages the state at t = 0.
// Requires finite u0 with min u0 > 0.
SimState initial_state(const Field& u0, const SchemeConfig& cfg);

// Stability bound: cfl_safety / (2 max gamma(v) sum_i 1/h_i^2), further
// capped by 1/(2 mu max(1, max u)) for the reaction term. Throws
// std::domain_error when max gamma(v) is not positive.
double cfl_dt(const SimState& state, const MotilityFunction& gamma, double mu,
              const SchemeConfig& cfg);

// One forward Euler step of length dt followed by the elliptic re-solve and
// the refresh of a. Requires dt <= cfl_dt(state, ...) up to roundoff slack;
// throws BlowUpError when the update produces non-finite values.
SimState step(const SimState& state, const MotilityFunction& gamma, double mu,
              const SchemeConfig& cfg, double dt);

struct Trajectory {
  SchemeConfig config;
  std::string motility;  // describe() of the motility used
  double mu = 0.0;
  // State at t = 0, then every output_stride steps, then the final state.
  std::vector<SimState> snapshots;
  // a(t) at every step, starting with the initial state.
  std::vector<double> step_times;
  std::vector<double> step_a;
  double run_min_u = 0.0;  // min over all steps of min u
  std::int64_t total_steps = 0;
  bool blew_up = false;
  double blow_up_time = 0.0;  // meaningful only when blew_up
};

// Advances to cfg.t_end, recomputing the step size each step unless
// fixed_dt is set. On blow-up the partial trajectory is returned with
// blew_up set instead of propagating the error.
Trajectory run(const Field& u0, const MotilityFunction& gamma, double mu,
               const SchemeConfig& cfg);

// Writes dir/metadata.json, dir/timeseries.csv and one pair of field CSVs
// u_NNNNNN.csv / v_NNNNNN.csv per snapshot. The time series has columns
//   t,mass,min_u,max_u,a_t,sup_dist_u_to_1,sup_dist_v_to_1
// sampled at the snapshot times. extra_metadata_json, when non-empty, must
// be a JSON object; its members are appended to the metadata (seeds,
// initial-condition description). Creates dir if needed.
void write_trajectory(const Trajectory& traj, const std::string& dir,
                      const std::string& extra_metadata_json = "");

}  // namespace motilab
