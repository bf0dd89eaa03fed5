#include "motilab/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "motilab/config.hpp"
#include "motilab/diagnostics.hpp"
#include "motilab/elliptic.hpp"
#include "motilab/envelope.hpp"
#include "motilab/format.hpp"
#include "motilab/pde.hpp"

namespace motilab {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  os << content;
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
}

// Adapts to whichever CSVs the command produced; emitted, never executed.
constexpr const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Render the CSV artifacts next to this script to PNG files."""
import csv
import math
import os
import sys

HERE = os.path.dirname(os.path.abspath(__file__))


def read_rows(name):
    path = os.path.join(HERE, name)
    if not os.path.exists(path):
        return None
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def column(rows, key):
    return [float(r[key]) for r in rows]


def positive(xs):
    return [max(x, 1e-16) for x in xs]


def main():
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        sys.exit("matplotlib is required: pip install matplotlib")

    wrote = []
    ts = read_rows("timeseries.csv")
    env = read_rows("envelope.csv")

    if ts:
        t = column(ts, "t")
        fig, ax = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
        ax[0].plot(t, column(ts, "min_u"), label="min u")
        ax[0].plot(t, column(ts, "max_u"), label="max u")
        if env:
            te = column(env, "t")
            ax[0].plot(te, column(env, "u_lo"), "--", label="u_lo")
            ax[0].plot(te, column(env, "u_hi"), "--", label="u_hi")
        ax[0].axhline(1.0, color="k", lw=0.5)
        ax[0].set_ylabel("density range")
        ax[0].legend(loc="best", fontsize=8)
        ax[1].semilogy(t, positive(column(ts, "sup_dist_u_to_1")), label="sup|u-1|")
        ax[1].semilogy(t, positive(column(ts, "sup_dist_v_to_1")), label="sup|v-1|")
        ax[1].set_xlabel("t")
        ax[1].set_ylabel("distance to (1,1)")
        ax[1].legend(loc="best", fontsize=8)
        fig.tight_layout()
        fig.savefig(os.path.join(HERE, "trajectory.png"), dpi=150)
        wrote.append("trajectory.png")

    if env:
        t = column(env, "t")
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.semilogy(t, positive(column(env, "log_gap")), label="log gap")
        bounds = column(env, "bound_conservative")
        if not all(math.isnan(b) for b in bounds):
            ax.semilogy(t, positive(bounds), "--", label="decay bound")
        ax.set_xlabel("t")
        ax.set_ylabel("log u_hi - log u_lo")
        ax.legend(loc="best", fontsize=8)
        fig.tight_layout()
        fig.savefig(os.path.join(HERE, "envelope.png"), dpi=150)
        wrote.append("envelope.png")

    if wrote:
        print("wrote " + ", ".join(wrote))
    else:
        print("no CSV artifacts found next to this script")


if __name__ == "__main__":
    main()
)PY";

ordered_json audit_json(const HypothesisAudit& a, const std::string& motility,
                        double mu) {
  return ordered_json{{"motility", motility},
                      {"mu", mu},
                      {"mu0_hat", a.mu0_hat},
                      {"c_gamma_hat", a.c_gamma_hat},
                      {"gamma_min", a.gamma_min},
                      {"margin", a.margin},
                      {"s_max", a.s_max},
                      {"grid_points", a.grid_points},
                      {"positivity_ok", a.positivity_ok},
                      {"sign_checks_ok", a.sign_checks_ok},
                      {"growth_ok", a.growth_ok},
                      {"c_gamma_finite", a.c_gamma_finite},
                      {"sup_at_boundary", a.sup_at_boundary},
                      {"first_violation_s", a.first_violation_s},
                      {"pass", a.pass()}};
}

Envelope initial_envelope(const RunConfig& cfg, const Field& u0) {
  if (!cfg.envelope.auto_straddle) {
    return Envelope::from_values(0.0, cfg.envelope.lo0, cfg.envelope.hi0);
  }
  double mn = u0.values.front();
  double mx = mn;
  for (double v : u0.values) {
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  return Envelope::from_values(0.0, std::min(mn, 1.0 - cfg.envelope.delta),
                               std::max(mx, 1.0 + cfg.envelope.delta));
}

// c_omega before the safety factor, plus where it came from.
struct OmegaConstant {
  double base = 0.0;
  std::string source;
  std::optional<DomainConstants> estimate;
};

OmegaConstant resolve_c_omega(const RunConfig& cfg, const Grid& g) {
  OmegaConstant out;
  if (cfg.envelope.c_omega) {
    out.base = *cfg.envelope.c_omega;
    out.source = "config override";
    return out;
  }
  out.estimate = estimate_domain_constants(
      g, cfg.constants_samples, {2.0, cfg.diagnostics.lp_p},
      cfg.constants_seed);
  out.base = out.estimate->c_omega_hat;
  out.source = "estimated";
  return out;
}

ASource make_a_source(const RunConfig& cfg, const Trajectory& traj,
                      double c_omega_used) {
  switch (cfg.envelope.a_source) {
    case EnvelopeSpec::Source::measured:
      return ASource::measured(traj.step_times, traj.step_a);
    case EnvelopeSpec::Source::closed_bound:
      return ASource::closed_bound(c_omega_used);
    case EnvelopeSpec::Source::zero:
      break;
  }
  return ASource::zero();
}

void append_note(CheckRecord& rec, const std::string& note) {
  if (!rec.note.empty()) rec.note += "; ";
  rec.note += note;
}

CheckRecord lp_record(const Trajectory& traj, const RunConfig& cfg,
                      const Grid& g, double c_omega_used,
                      const HypothesisAudit& audit) {
  if (!audit.c_gamma_finite) {
    CheckRecord rec;
    rec.name = "lp_bound";
    rec.statement = "integral of u^p stays below the comparison ODE curve";
    rec.pass = true;
    rec.informational = true;
    rec.note = "audited c_gamma is not finite; no comparison curve available";
    return rec;
  }
  const double p = cfg.diagnostics.lp_p;
  const double y0 = std::pow(lp_norm(traj.snapshots.front().u, p), p);
  LpBoundCurve curve =
      integrate_lp_bound(p, y0, cfg.mu, g.volume(), c_omega_used,
                         audit.c_gamma_hat, cfg.scheme.t_end, cfg.envelope.dt);
  return check_lp_bound(traj, curve);
}

CheckRecord rectangle_record(const EnvelopeTrajectory& env,
                             bool structural_ok) {
  CheckRecord rec;
  rec.name = "rectangle";
  rec.statement = "0 < u_lo(t) < 1 < u_hi(t) at every envelope step";
  rec.tolerance = 0.0;
  bool strict = true;
  double worst = 0.0;
  for (const Envelope& e : env.points) {
    const double lo = e.lo();
    const double hi = e.hi();
    if (!(lo > 0.0 && lo < 1.0 && hi > 1.0)) {
      if (strict) rec.worst_time = e.t;
      strict = false;
    }
    const double r = std::max({-lo, lo - 1.0, 1.0 - hi});
    if (r > worst) {
      worst = r;
      rec.worst_time = e.t;
    }
  }
  rec.worst_residual = std::max(0.0, worst);
  rec.pass = strict && !env.flagged;
  if (env.flagged) {
    append_note(rec, "envelope integration flagged '" + env.flag_reason +
                         "' at t = " + format_double(env.flag_time));
  }
  if (!structural_ok) {
    rec.informational = true;
    append_note(rec, "motility audit failed; comparison system not justified");
  }
  return rec;
}

CheckRecord decay_record(const EnvelopeTrajectory& env_closed,
                         const Envelope& env0, double mu,
                         const HypothesisAudit& audit, double rel_tol,
                         bool structural_ok) {
  CheckRecord rec;
  rec.name = "decay";
  rec.statement =
      "closed-bound log gap <= gap0 * exp((mu0_hat - mu)(u_lo0/u_hi0) t) * "
      "(1 + tol)";
  rec.tolerance = rel_tol;
  if (!audit.growth_ok) {
    rec.pass = true;
    rec.informational = true;
    rec.note = "mu = " + format_double(mu) +
               " is at or below the audited threshold mu0_hat = " +
               format_double(audit.mu0_hat) + "; no decay promised";
    return rec;
  }
  double worst = 0.0;
  double worst_printed = 0.0;
  for (const Envelope& e : env_closed.points) {
    const double gap = e.log_hi - e.log_lo;
    const DecayBound b = decay_bound(env0, mu, audit.mu0_hat, e.t);
    if (!(b.conservative > 0.0)) continue;
    const double r = gap / b.conservative - 1.0;
    if (r > worst) {
      worst = r;
      rec.worst_time = e.t;
    }
    worst_printed = std::max(worst_printed, gap / b.printed - 1.0);
  }
  rec.worst_residual = std::max(0.0, worst);
  rec.pass = rec.worst_residual <= rel_tol;
  append_note(rec, "steeper printed-rate variant worst excess " +
                       format_double(std::max(0.0, worst_printed)) +
                       " (reported, not asserted)");
  if (env_closed.flagged) {
    append_note(rec, "closed-bound envelope flagged '" +
                         env_closed.flag_reason +
                         "' at t = " + format_double(env_closed.flag_time) +
                         "; decay checked on the covered range");
  }
  if (!structural_ok) {
    rec.informational = true;
    append_note(rec, "motility audit failed; comparison system not justified");
  }
  return rec;
}

struct VerifyOutcome {
  bool verdict = false;
  bool blew_up = false;
  bool audit_pass = false;
  std::string table;
};

VerifyOutcome do_verify(const RunConfig& cfg, const std::string& out_dir) {
  const Grid g = cfg.make_grid();
  const MotilityFunction gamma = cfg.make_motility();
  const Field u0 = cfg.make_u0(g);

  const HypothesisAudit audit =
      audit_hypotheses(gamma, cfg.mu, cfg.audit_s_max);
  const bool structural_ok =
      audit.positivity_ok && audit.sign_checks_ok && audit.c_gamma_finite;

  const Trajectory traj = run(u0, gamma, cfg.mu, cfg.scheme);

  const OmegaConstant cw = resolve_c_omega(cfg, g);
  const double c_omega_used = cw.base * cfg.envelope.c_omega_safety;

  const Envelope env0 = initial_envelope(cfg, u0);
  const ASource source = make_a_source(cfg, traj, c_omega_used);
  const EnvelopeTrajectory env = integrate_envelope(
      env0, source, gamma, cfg.mu, cfg.scheme.t_end, cfg.envelope.dt);
  const bool primary_is_closed =
      cfg.envelope.a_source == EnvelopeSpec::Source::closed_bound;
  const EnvelopeTrajectory env_closed =
      primary_is_closed
          ? env
          : integrate_envelope(env0, ASource::closed_bound(c_omega_used),
                               gamma, cfg.mu, cfg.scheme.t_end,
                               cfg.envelope.dt);

  DiagnosticsReport report;
  report.checks.push_back(
      check_positivity(traj, cfg.diagnostics.positivity_tol));
  report.checks.push_back(check_mass(traj, cfg.diagnostics.c_tol));
  report.checks.push_back(lp_record(traj, cfg, g, c_omega_used, audit));
  report.checks.push_back(
      check_sandwich(traj, env, cfg.diagnostics.c_tol, structural_ok));
  report.checks.push_back(check_gradient_bound(traj, env, cw.base,
                                               cfg.envelope.c_omega_safety,
                                               cfg.diagnostics.c_tol,
                                               structural_ok));
  report.checks.push_back(rectangle_record(env, structural_ok));
  report.checks.push_back(decay_record(env_closed, env0, cfg.mu, audit,
                                       cfg.diagnostics.decay_rel_tol,
                                       structural_ok));
  {
    const double t_check =
        cfg.diagnostics.t_check.value_or(cfg.scheme.t_end);
    CheckRecord conv =
        check_convergence(traj, env, t_check, cfg.diagnostics.eps,
                          audit.mu0_hat, cfg.diagnostics.c_tol);
    if (!structural_ok && !conv.informational) {
      conv.informational = true;
      append_note(conv,
                  "motility audit failed; comparison system not justified");
    }
    report.checks.push_back(std::move(conv));
  }

  ordered_json extra;
  extra["config"] = ordered_json::parse(cfg.echo_json());
  extra["audit"] = audit_json(audit, gamma.describe(), cfg.mu);
  extra["constants"] = {{"c_omega_hat", cw.base},
                        {"c_omega_source", cw.source},
                        {"c_omega_safety", cfg.envelope.c_omega_safety},
                        {"c_omega_used", c_omega_used}};
  if (cw.estimate) {
    extra["constants"]["estimate"] = ordered_json::parse(cw.estimate->to_json());
  }
  extra["a_source"] = source.describe();
  write_trajectory(traj, out_dir, extra.dump(2));
  write_text_file(out_dir + "/config.txt", cfg.echo_text());

  {
    std::ofstream os(out_dir + "/envelope.csv", std::ios::binary);
    write_envelope_csv(env, cfg.mu, audit.mu0_hat, os);
    if (!os) throw std::runtime_error("cannot write '" + out_dir +
                                      "/envelope.csv'");
  }
  if (!primary_is_closed) {
    std::ofstream os(out_dir + "/envelope_closed.csv", std::ios::binary);
    write_envelope_csv(env_closed, cfg.mu, audit.mu0_hat, os);
    if (!os) throw std::runtime_error("cannot write '" + out_dir +
                                      "/envelope_closed.csv'");
  }
  write_text_file(out_dir + "/report.json", report.to_json());
  write_text_file(out_dir + "/report.txt", report.table());
  write_text_file(out_dir + "/plot.py", kPlotScript);

  VerifyOutcome out;
  out.verdict = report.verdict();
  out.blew_up = traj.blew_up;
  out.audit_pass = audit.pass();
  out.table = report.table();
  return out;
}

int cmd_simulate(const RunConfig& cfg, const std::string& out_dir) {
  const Grid g = cfg.make_grid();
  const MotilityFunction gamma = cfg.make_motility();
  const Field u0 = cfg.make_u0(g);
  const Trajectory traj = run(u0, gamma, cfg.mu, cfg.scheme);

  ordered_json extra;
  extra["config"] = ordered_json::parse(cfg.echo_json());
  write_trajectory(traj, out_dir, extra.dump(2));
  write_text_file(out_dir + "/config.txt", cfg.echo_text());
  write_text_file(out_dir + "/plot.py", kPlotScript);

  const SimState& last = traj.snapshots.back();
  std::cout << "steps " << traj.total_steps << ", final t "
            << format_double(last.t) << ", snapshots "
            << traj.snapshots.size() << "\n";
  if (traj.blew_up) {
    std::cerr << "run blew up at t = " << format_double(traj.blow_up_time)
              << "; partial outputs in " << out_dir << "\n";
    return 2;
  }
  std::cout << "wrote " << out_dir << "\n";
  return 0;
}

int cmd_envelope(const RunConfig& cfg, const std::string& out_dir) {
  const Grid g = cfg.make_grid();
  const MotilityFunction gamma = cfg.make_motility();
  const Field u0 = cfg.make_u0(g);
  const HypothesisAudit audit =
      audit_hypotheses(gamma, cfg.mu, cfg.audit_s_max);
  const Envelope env0 = initial_envelope(cfg, u0);

  ordered_json meta;
  meta["config"] = ordered_json::parse(cfg.echo_json());
  meta["audit"] = audit_json(audit, gamma.describe(), cfg.mu);

  ASource source = ASource::zero();
  if (cfg.envelope.a_source == EnvelopeSpec::Source::measured) {
    const Trajectory traj = run(u0, gamma, cfg.mu, cfg.scheme);
    source = ASource::measured(traj.step_times, traj.step_a);
    if (traj.blew_up) {
      meta["pde_blew_up_at"] = traj.blow_up_time;
      std::cerr << "measured-coefficient run blew up at t = "
                << format_double(traj.blow_up_time) << "\n";
    }
  } else if (cfg.envelope.a_source == EnvelopeSpec::Source::closed_bound) {
    const OmegaConstant cw = resolve_c_omega(cfg, g);
    const double c_omega_used = cw.base * cfg.envelope.c_omega_safety;
    source = ASource::closed_bound(c_omega_used);
    meta["constants"] = {{"c_omega_hat", cw.base},
                         {"c_omega_source", cw.source},
                         {"c_omega_safety", cfg.envelope.c_omega_safety},
                         {"c_omega_used", c_omega_used}};
  }
  meta["a_source"] = source.describe();

  const EnvelopeTrajectory env = integrate_envelope(
      env0, source, gamma, cfg.mu, cfg.scheme.t_end, cfg.envelope.dt);
  meta["flagged"] = env.flagged;
  if (env.flagged) {
    meta["flag_reason"] = env.flag_reason;
    meta["flag_time"] = env.flag_time;
  }

  {
    fs::create_directories(out_dir);
    std::ofstream os(out_dir + "/envelope.csv", std::ios::binary);
    write_envelope_csv(env, cfg.mu, audit.mu0_hat, os);
    if (!os) throw std::runtime_error("cannot write '" + out_dir +
                                      "/envelope.csv'");
  }
  write_text_file(out_dir + "/envelope_meta.json", meta.dump(2));
  write_text_file(out_dir + "/plot.py", kPlotScript);

  const Envelope& last = env.back();
  std::cout << "envelope points " << env.points.size() << ", final t "
            << format_double(last.t) << ", final gap "
            << format_double(last.hi() - last.lo()) << "\n";
  if (env.flagged) {
    std::cout << "flagged '" << env.flag_reason
              << "' at t = " << format_double(env.flag_time) << "\n";
  }
  std::cout << "wrote " << out_dir << "\n";
  return 0;
}

int cmd_verify(const RunConfig& cfg, const std::string& out_dir) {
  const VerifyOutcome out = do_verify(cfg, out_dir);
  std::cout << out.table;
  if (out.blew_up) std::cout << "note: the PDE run blew up; see metadata\n";
  std::cout << "wrote " << out_dir << "\n";
  return out.verdict ? 0 : 1;
}

int cmd_sweep(const std::string& text, const std::string& out_override,
              std::optional<std::uint64_t> seed, int workers) {
  std::vector<SweepPoint> points = expand_sweep(text);
  if (seed) {
    for (SweepPoint& p : points) p.config.u0.seed = *seed;
  }
  const std::string base_out =
      out_override.empty() ? points.front().config.output_dir : out_override;

  struct PointOutcome {
    bool verdict = false;
    bool error = false;
    std::string message;
    std::string dir;
  };
  std::vector<PointOutcome> results(points.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      PointOutcome& r = results[i];
      r.dir = base_out + "/" + points[i].label;
      try {
        r.verdict = do_verify(points[i].config, r.dir).verdict;
      } catch (const std::exception& e) {
        r.error = true;
        r.message = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < std::max(1, workers); ++i) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();

  bool any_error = false;
  bool any_fail = false;
  ordered_json summary = ordered_json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const PointOutcome& r = results[i];
    ordered_json entry;
    entry["label"] = points[i].label;
    ordered_json ov = ordered_json::object();
    for (const auto& [key, value] : points[i].overrides) ov[key] = value;
    entry["overrides"] = ov;
    entry["dir"] = r.dir;
    std::string status;
    if (r.error) {
      any_error = true;
      status = "ERROR: " + r.message;
      entry["error"] = r.message;
    } else {
      entry["verdict"] = r.verdict;
      if (r.verdict) {
        status = "PASS";
      } else {
        any_fail = true;
        status = "FAIL";
      }
    }
    std::cout << points[i].label << ": " << status << "\n";
    summary.push_back(entry);
  }
  write_text_file(base_out + "/sweep_summary.json", summary.dump(2));
  std::cout << "wrote " << base_out << "/sweep_summary.json\n";
  return any_error ? 2 : any_fail ? 1 : 0;
}

int cmd_audit(const RunConfig& cfg, const std::string& out_dir) {
  const MotilityFunction gamma = cfg.make_motility();
  const HypothesisAudit audit =
      audit_hypotheses(gamma, cfg.mu, cfg.audit_s_max);
  write_text_file(out_dir + "/audit.json",
                  audit_json(audit, gamma.describe(), cfg.mu).dump(2));
  std::cout << "motility " << gamma.describe() << ", mu "
            << format_double(cfg.mu) << "\n"
            << "mu0_hat " << format_double(audit.mu0_hat) << ", c_gamma_hat "
            << format_double(audit.c_gamma_hat) << ", margin "
            << format_double(audit.margin) << "\n"
            << "positivity " << (audit.positivity_ok ? "ok" : "VIOLATED")
            << ", signs " << (audit.sign_checks_ok ? "ok" : "VIOLATED")
            << ", growth " << (audit.growth_ok ? "ok" : "mu <= mu0_hat")
            << ", c_gamma "
            << (audit.c_gamma_finite ? "finite" : "NOT FINITE") << "\n";
  if (audit.sup_at_boundary) {
    std::cout << "note: supremum attained at s_max = "
              << format_double(audit.s_max)
              << "; the audited range may be too short\n";
  }
  std::cout << "audit " << (audit.pass() ? "PASS" : "FAIL") << ", wrote "
            << out_dir << "/audit.json\n";
  return audit.pass() ? 0 : 1;
}

int cmd_constants(const RunConfig& cfg, const std::string& out_dir) {
  const Grid g = cfg.make_grid();
  const DomainConstants dc = estimate_domain_constants(
      g, cfg.constants_samples, {2.0, cfg.diagnostics.lp_p},
      cfg.constants_seed);
  write_text_file(out_dir + "/constants.json", dc.to_json());
  std::cout << "c_omega_hat " << format_double(dc.c_omega_hat) << " ("
            << dc.samples << " samples, seed " << dc.seed << ")\n";
  for (const auto& [p, c] : dc.c_p_hat) {
    std::cout << "c_p_hat[p=" << format_double(p)
              << "] = " << format_double(c) << "\n";
  }
  std::cout << "wrote " << out_dir << "/constants.json\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"numerical laboratory for logistic growth with "
               "density-suppressed motility"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::uint64_t seed_value = 0;
  int workers = 1;

  CLI::App* sim = app.add_subcommand(
      "simulate", "run the PDE and write trajectory artifacts");
  CLI::App* env = app.add_subcommand(
      "envelope", "integrate the comparison envelope and write its CSV");
  CLI::App* ver = app.add_subcommand(
      "verify", "run the PDE plus the full check suite and write a report");
  CLI::App* swp = app.add_subcommand(
      "sweep", "expand sweep.KEY lines and verify every point");
  CLI::App* aud = app.add_subcommand(
      "audit", "audit the motility hypotheses for the configured mu");
  CLI::App* con = app.add_subcommand(
      "constants", "estimate domain constants on the configured grid");

  for (CLI::App* sub : {sim, env, ver, swp, aud, con}) {
    sub->add_option("--config", config_path, "run configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_override,
                    "output directory (overrides output.dir)");
    sub->add_option("--seed", seed_value,
                    "override u0.seed (constants.seed for `constants`)");
  }
  swp->add_option("--workers", workers, "concurrent sweep points")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  const bool has_seed = sub->count("--seed") > 0;

  try {
    const std::string text = read_text_file(config_path);
    if (sub == swp) {
      std::optional<std::uint64_t> seed;
      if (has_seed) seed = seed_value;
      return cmd_sweep(text, out_override, seed, workers);
    }
    RunConfig cfg = parse_config(text);
    if (has_seed) {
      if (sub == con) {
        cfg.constants_seed = seed_value;
      } else {
        cfg.u0.seed = seed_value;
      }
    }
    const std::string out =
        out_override.empty() ? cfg.output_dir : out_override;
    if (sub == sim) return cmd_simulate(cfg, out);
    if (sub == env) return cmd_envelope(cfg, out);
    if (sub == ver) return cmd_verify(cfg, out);
    if (sub == aud) return cmd_audit(cfg, out);
    return cmd_constants(cfg, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace motilab
