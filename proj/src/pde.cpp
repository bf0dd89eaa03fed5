#include "motilab/pde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <utility>

#include "elliptic_internal.hpp"
#include "json.hpp"
#include "motilab/elliptic.hpp"
#include "motilab/format.hpp"
#include "motilab/kernels.hpp"

namespace motilab {

namespace {

// Relative to the data: the elliptic residual scales with ||rhs|| once the
// state leaves O(1), so the acceptance threshold has to as well.
constexpr double kEllipticTolBase = 1e-10;

double elliptic_tol_for(const double* rhs, std::size_t n) {
  double scale = kernels::ops().max_abs_dev(rhs, 0.0, n);
  return kEllipticTolBase * std::max(1.0, scale);
}

void validate_config(const SchemeConfig& cfg) {
  if (!(cfg.cfl_safety > 0.0) || !(cfg.cfl_safety <= 1.0)) {
    throw std::invalid_argument("cfl_safety must lie in (0, 1]");
  }
  if (cfg.regularization_n && !(*cfg.regularization_n >= 1.0)) {
    throw std::invalid_argument("regularization_n must be >= 1");
  }
  if (cfg.output_stride < 1) {
    throw std::invalid_argument("output_stride must be >= 1");
  }
  if (cfg.fixed_dt && !(*cfg.fixed_dt > 0.0)) {
    throw std::invalid_argument("fixed_dt must be positive");
  }
}

void validate_mu(double mu) {
  if (!std::isfinite(mu) || !(mu > 0.0)) {
    throw std::invalid_argument("mu must be positive and finite");
  }
}

void validate_field(const Field& f, const char* what) {
  if (f.values.size() != f.grid.total_vertices()) {
    throw std::invalid_argument(std::string(what) +
                                ": value count does not match the grid");
  }
  if (!all_finite(f)) {
    throw std::invalid_argument(std::string(what) + " has non-finite values");
  }
}

// Buffers reused across steps; the 1D runs keep the tridiagonal
// factorization for the whole run.
struct StepWorkspace {
  std::optional<detail::TridiagFactors> factors;
  std::vector<double> rhs, scratch, resid, correction;
  std::vector<double> gv, w, lap;

  explicit StepWorkspace(const Grid& g) {
    const std::size_t n = g.total_vertices();
    rhs.resize(n);
    scratch.resize(n);
    resid.resize(n);
    correction.resize(n);
    gv.resize(n);
    w.resize(n);
    lap.resize(n);
    if (g.dimension() == 1) factors.emplace(g);
  }
};

double cfl_bound(const SimState& state, const MotilityFunction& gamma,
                 double mu, const SchemeConfig& cfg, std::vector<double>& gv) {
  const Grid& g = state.u.grid;
  const std::size_t n = state.u.size();
  const auto& k = kernels::ops();

  gv.resize(n);
  gamma.value_many(state.v.values.data(), gv.data(), n);
  double g_lo = 0.0, g_hi = 0.0;
  k.minmax(gv.data(), n, g_lo, g_hi);
  if (!(g_hi > 0.0)) {
    throw std::domain_error("cfl_dt: max gamma(v) = " + format_double(g_hi) +
                            " is not positive (degenerate diffusion)");
  }

  double sum_inv_h2 = 0.0;
  for (int axis = 0; axis < g.dimension(); ++axis) {
    double h = g.spacing(axis);
    sum_inv_h2 += 1.0 / (h * h);
  }
  double dt = cfg.cfl_safety / (2.0 * g_hi * sum_inv_h2);

  double u_lo = 0.0, u_hi = 0.0;
  k.minmax(state.u.values.data(), n, u_lo, u_hi);
  return std::min(dt, 1.0 / (2.0 * mu * std::max(1.0, u_hi)));
}

// Expanded form gamma lap u + 2 gamma' grad v . grad u + u gamma'(v - u)
// + u gamma'' |grad v|^2 + reaction, with lap v eliminated via the
// elliptic identity lap v = v - u. Centered differences with mirror
// ghosts, so boundary gradients vanish exactly.
void non_divergence_update(const Field& u, const Field& v,
                           const MotilityFunction& gamma, double mu, double dt,
                           bool regularized, std::vector<double>& out) {
  const Grid& g = u.grid;
  const int dim = g.dimension();
  const int nx = g.vertices(0);
  const int ny = dim == 2 ? g.vertices(1) : 1;
  const double hx = g.spacing(0);
  const double inv_hx2 = 1.0 / (hx * hx);
  const double inv_2hx = 1.0 / (2.0 * hx);
  double inv_hy2 = 0.0;
  double inv_2hy = 0.0;
  if (dim == 2) {
    double hy = g.spacing(1);
    inv_hy2 = 1.0 / (hy * hy);
    inv_2hy = 1.0 / (2.0 * hy);
  }

  const double* uv = u.values.data();
  const double* vv = v.values.data();
  for (int j = 0; j < ny; ++j) {
    const int jm = j == 0 ? std::min(1, ny - 1) : j - 1;
    const int jp = j + 1 == ny ? std::max(ny - 2, 0) : j + 1;
    for (int i = 0; i < nx; ++i) {
      const int im = i == 0 ? 1 : i - 1;
      const int ip = i + 1 == nx ? nx - 2 : i + 1;
      const std::size_t c = g.index(i, j);
      const double uc = uv[c];
      const double vc = vv[c];

      double lap_u =
          (uv[g.index(im, j)] - 2.0 * uc + uv[g.index(ip, j)]) * inv_hx2;
      double dux = (uv[g.index(ip, j)] - uv[g.index(im, j)]) * inv_2hx;
      double dvx = (vv[g.index(ip, j)] - vv[g.index(im, j)]) * inv_2hx;
      double cross = dux * dvx;
      double grad_v2 = dvx * dvx;
      if (dim == 2) {
        lap_u +=
            (uv[g.index(i, jm)] - 2.0 * uc + uv[g.index(i, jp)]) * inv_hy2;
        double duy = (uv[g.index(i, jp)] - uv[g.index(i, jm)]) * inv_2hy;
        double dvy = (vv[g.index(i, jp)] - vv[g.index(i, jm)]) * inv_2hy;
        cross += duy * dvy;
        grad_v2 += dvy * dvy;
      }

      MotilityDerivs d = gamma.eval(vc);
      double u_reac = regularized ? std::max(uc, 0.0) : uc;
      double rhs = d.g * lap_u + 2.0 * d.g1 * cross + uc * d.g1 * (vc - uc) +
                   uc * d.g2 * grad_v2 + mu * uc * (1.0 - u_reac);
      out[c] = uc + dt * rhs;
    }
  }
}

// One Euler update of u, the elliptic re-solve, and the refresh of a,
// written into next. next.v doubles as the CG warm start in 2D.
void step_into(const SimState& state, const MotilityFunction& gamma, double mu,
               const SchemeConfig& cfg, double dt, StepWorkspace& ws,
               SimState& next) {
  const Grid& g = state.u.grid;
  const std::size_t n = state.u.size();
  const auto& k = kernels::ops();
  const bool regularized = cfg.regularization_n.has_value();

  next.t = state.t + dt;
  next.u.grid = g;

  if (cfg.form == SpatialForm::conservative) {
    next.u.values = state.u.values;
    gamma.value_many(state.v.values.data(), ws.gv.data(), n);
    k.mul(ws.w.data(), ws.gv.data(), state.u.values.data(), n);
    if (g.dimension() == 1) {
      double h = g.spacing(0);
      k.laplacian1d(ws.lap.data(), ws.w.data(), 1.0 / (h * h), n);
    } else {
      double hx = g.spacing(0);
      double hy = g.spacing(1);
      k.laplacian2d(ws.lap.data(), ws.w.data(),
                    static_cast<std::size_t>(g.vertices(0)),
                    static_cast<std::size_t>(g.vertices(1)), 1.0 / (hx * hx),
                    1.0 / (hy * hy));
    }
    k.logistic_update(next.u.values.data(), ws.lap.data(), dt, mu, regularized,
                      n);
  } else {
    next.u.values.resize(n);
    non_divergence_update(state.u, state.v, gamma, mu, dt, regularized,
                          next.u.values);
  }

  if (!all_finite(next.u)) {
    throw BlowUpError(
        "density became non-finite at t = " + format_double(next.t), next.t);
  }

  const double* rhs = next.u.values.data();
  if (regularized) {
    k.regularized_rhs(ws.rhs.data(), next.u.values.data(),
                      *cfg.regularization_n, n);
    rhs = ws.rhs.data();
  }

  next.v.grid = g;
  const double tol = elliptic_tol_for(rhs, n);
  if (ws.factors) {
    next.v.values.resize(n);
    double rn = 0.0;
    int passes =
        detail::tridiag_solve_refined(*ws.factors, g, rhs,
                                      next.v.values.data(), ws.scratch,
                                      ws.resid, ws.correction, tol, &rn);
    if (rn > tol) {
      throw SolverError("tridiagonal solve left residual " +
                            format_double(rn) + " above tol " +
                            format_double(tol),
                        rn, passes);
    }
  } else {
    Field f{g, std::vector<double>(rhs, rhs + n)};
    EllipticOptions opts;
    opts.tol = tol;
    opts.initial_guess = &state.v;
    next.v = solve_screened_poisson(f, opts).v;
  }

  if (!all_finite(next.v)) {
    throw BlowUpError(
        "signal became non-finite at t = " + format_double(next.t), next.t);
  }
  next.a = grad_sup_norm(next.v);
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  os.write(content.data(),
           static_cast<std::streamsize>(content.size()));
  if (!os.good()) {
    throw std::runtime_error("could not write " + path.string());
  }
}

}  // namespace

SimState initial_state(const Field& u0, const SchemeConfig& cfg) {
  validate_config(cfg);
  validate_field(u0, "initial_state: u0");
  double lo = 0.0, hi = 0.0;
  kernels::ops().minmax(u0.values.data(), u0.size(), lo, hi);
  if (!(lo > 0.0)) {
    throw std::invalid_argument("initial_state: min u0 = " +
                                format_double(lo) + ", but min u0 > 0 is required");
  }

  Field f = u0;
  if (cfg.regularization_n) {
    kernels::ops().regularized_rhs(f.values.data(), u0.values.data(),
                                   *cfg.regularization_n, u0.size());
  }
  EllipticOptions opts;
  opts.tol = elliptic_tol_for(f.values.data(), f.size());
  Field v = solve_screened_poisson(f, opts).v;
  double a = grad_sup_norm(v);
  return SimState{0.0, u0, std::move(v), a};
}

double cfl_dt(const SimState& state, const MotilityFunction& gamma, double mu,
              const SchemeConfig& cfg) {
  validate_config(cfg);
  validate_mu(mu);
  validate_field(state.u, "cfl_dt: u");
  validate_field(state.v, "cfl_dt: v");
  std::vector<double> gv;
  return cfl_bound(state, gamma, mu, cfg, gv);
}

SimState step(const SimState& state, const MotilityFunction& gamma, double mu,
              const SchemeConfig& cfg, double dt) {
  double bound = cfl_dt(state, gamma, mu, cfg);
  if (!std::isfinite(dt) || !(dt > 0.0)) {
    throw std::invalid_argument("step: dt must be positive and finite");
  }
  if (!(dt <= bound * (1.0 + 1e-12))) {
    throw std::invalid_argument("step: dt = " + format_double(dt) +
                                " exceeds the stability bound " +
                                format_double(bound));
  }
  StepWorkspace ws(state.u.grid);
  SimState next{0.0, Field::zeros(state.u.grid), Field::zeros(state.u.grid),
                0.0};
  step_into(state, gamma, mu, cfg, dt, ws, next);
  return next;
}

Trajectory run(const Field& u0, const MotilityFunction& gamma, double mu,
               const SchemeConfig& cfg) {
  validate_mu(mu);
  if (!std::isfinite(cfg.t_end) || cfg.t_end < 0.0) {
    throw std::invalid_argument("t_end must be finite and non-negative");
  }

  Trajectory traj;
  traj.config = cfg;
  traj.motility = gamma.describe();
  traj.mu = mu;

  SimState state = initial_state(u0, cfg);
  const auto& k = kernels::ops();
  {
    double lo = 0.0, hi = 0.0;
    k.minmax(state.u.values.data(), state.u.size(), lo, hi);
    traj.run_min_u = lo;
  }
  traj.snapshots.push_back(state);
  traj.step_times.push_back(state.t);
  traj.step_a.push_back(state.a);

  StepWorkspace ws(u0.grid);
  SimState next{0.0, Field::zeros(u0.grid), Field::zeros(u0.grid), 0.0};

  const double t_end = cfg.t_end;
  const double t_slack = 1e-15 * std::max(1.0, std::fabs(t_end));
  bool last_was_snapshot = true;
  while (state.t < t_end - t_slack) {
    double bound = cfl_bound(state, gamma, mu, cfg, ws.gv);
    double dt = cfg.fixed_dt ? *cfg.fixed_dt : bound;
    dt = std::min(dt, t_end - state.t);
    if (!(dt <= bound * (1.0 + 1e-12))) {
      throw std::invalid_argument(
          "fixed_dt = " + format_double(dt) +
          " exceeds the stability bound " + format_double(bound) +
          " at t = " + format_double(state.t));
    }
    try {
      step_into(state, gamma, mu, cfg, dt, ws, next);
    } catch (const BlowUpError& err) {
      traj.blew_up = true;
      traj.blow_up_time = err.time();
      break;
    }
    std::swap(state, next);
    ++traj.total_steps;
    traj.step_times.push_back(state.t);
    traj.step_a.push_back(state.a);
    double lo = 0.0, hi = 0.0;
    k.minmax(state.u.values.data(), state.u.size(), lo, hi);
    if (lo < traj.run_min_u) traj.run_min_u = lo;
    last_was_snapshot = traj.total_steps % cfg.output_stride == 0;
    if (last_was_snapshot) traj.snapshots.push_back(state);
  }
  // The last good state closes the record, also on early blow-up exits.
  if (!last_was_snapshot) traj.snapshots.push_back(state);
  return traj;
}

void write_trajectory(const Trajectory& traj, const std::string& dir,
                      const std::string& extra_metadata_json) {
  if (traj.snapshots.empty()) {
    throw std::invalid_argument("write_trajectory: trajectory has no snapshots");
  }
  namespace fs = std::filesystem;
  fs::path root(dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) {
    throw std::runtime_error("could not create " + root.string() + ": " +
                             ec.message());
  }

  const Grid& g = traj.snapshots.front().u.grid;
  using json = nlohmann::ordered_json;

  json cfg;
  cfg["form"] = traj.config.form == SpatialForm::conservative
                    ? "conservative"
                    : "non_divergence";
  if (traj.config.regularization_n) {
    cfg["regularization_n"] = *traj.config.regularization_n;
  } else {
    cfg["regularization_n"] = nullptr;
  }
  cfg["cfl_safety"] = traj.config.cfl_safety;
  cfg["t_end"] = traj.config.t_end;
  cfg["output_stride"] = traj.config.output_stride;
  if (traj.config.fixed_dt) {
    cfg["fixed_dt"] = *traj.config.fixed_dt;
  } else {
    cfg["fixed_dt"] = nullptr;
  }

  json grid;
  grid["dimension"] = g.dimension();
  json vertices = json::array();
  json extent = json::array();
  for (int axis = 0; axis < g.dimension(); ++axis) {
    vertices.push_back(g.vertices(axis));
    extent.push_back(g.extent(axis));
  }
  grid["vertices"] = vertices;
  grid["extent"] = extent;

  json meta;
  meta["config"] = cfg;
  meta["grid"] = grid;
  meta["motility"] = traj.motility;
  meta["mu"] = traj.mu;
  meta["total_steps"] = traj.total_steps;
  meta["run_min_u"] = traj.run_min_u;
  meta["blew_up"] = traj.blew_up;
  if (traj.blew_up) meta["blow_up_time"] = traj.blow_up_time;
  json times = json::array();
  for (const auto& s : traj.snapshots) times.push_back(s.t);
  meta["snapshot_times"] = times;

  if (!extra_metadata_json.empty()) {
    json extra = json::parse(extra_metadata_json);
    if (!extra.is_object()) {
      throw std::invalid_argument(
          "write_trajectory: extra metadata must be a JSON object");
    }
    for (auto it = extra.begin(); it != extra.end(); ++it) {
      meta[it.key()] = it.value();
    }
  }
  write_text_file(root / "metadata.json", meta.dump(2) + "\n");

  const auto& k = kernels::ops();
  std::string ts = "t,mass,min_u,max_u,a_t,sup_dist_u_to_1,sup_dist_v_to_1\n";
  for (const auto& s : traj.snapshots) {
    double lo = 0.0, hi = 0.0;
    k.minmax(s.u.values.data(), s.u.size(), lo, hi);
    append_double(ts, s.t);
    ts += ',';
    append_double(ts, integrate(s.u));
    ts += ',';
    append_double(ts, lo);
    ts += ',';
    append_double(ts, hi);
    ts += ',';
    append_double(ts, s.a);
    ts += ',';
    append_double(ts, k.max_abs_dev(s.u.values.data(), 1.0, s.u.size()));
    ts += ',';
    append_double(ts, k.max_abs_dev(s.v.values.data(), 1.0, s.v.size()));
    ts += '\n';
  }
  write_text_file(root / "timeseries.csv", ts);

  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    char name[24];
    std::snprintf(name, sizeof name, "u_%06lu.csv",
                  static_cast<unsigned long>(i));
    {
      std::ofstream os(root / name, std::ios::binary);
      write_field_csv(traj.snapshots[i].u, os);
      if (!os.good()) {
        throw std::runtime_error("could not write " + (root / name).string());
      }
    }
    std::snprintf(name, sizeof name, "v_%06lu.csv",
                  static_cast<unsigned long>(i));
    std::ofstream os(root / name, std::ios::binary);
    write_field_csv(traj.snapshots[i].v, os);
    if (!os.good()) {
      throw std::runtime_error("could not write " + (root / name).string());
    }
  }
}

}  // namespace motilab
