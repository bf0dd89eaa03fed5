#include "motilab/elliptic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "elliptic_internal.hpp"
#include "json.hpp"
#include "motilab/format.hpp"
#include "motilab/kernels.hpp"

namespace motilab {

namespace {

using detail::apply_screened_raw;
using detail::TridiagFactors;

double max_abs(const std::vector<double>& x) {
  return kernels::ops().max_abs_dev(x.data(), 0.0, x.size());
}

void validate_inputs(const Field& f, const EllipticOptions& opts) {
  if (!(opts.tol > 0.0)) {
    throw std::invalid_argument("elliptic solve needs tol > 0");
  }
  if (!all_finite(f)) {
    throw std::invalid_argument("elliptic solve: rhs has non-finite values");
  }
  if (opts.initial_guess != nullptr &&
      !(opts.initial_guess->grid == f.grid)) {
    throw std::invalid_argument(
        "elliptic solve: initial guess lives on a different grid");
  }
}

EllipticSolution solve_cg(const Field& f, const EllipticOptions& opts) {
  const std::size_t n = f.size();
  const auto& k = kernels::ops();
  const std::vector<double> w = trapezoid_weights(f.grid);

  Field x = opts.initial_guess != nullptr ? *opts.initial_guess
                                          : Field::zeros(f.grid);
  std::vector<double> r(n), p(n), q(n);

  auto refresh_residual = [&]() {
    apply_screened_raw(f.grid, x.values.data(), r.data());
    for (std::size_t i = 0; i < n; ++i) r[i] = f.values[i] - r[i];
    return max_abs(r);
  };

  double rn = refresh_residual();
  if (rn <= opts.tol) return {std::move(x), rn, 0};

  const int cap = opts.max_iterations > 0
                      ? opts.max_iterations
                      : static_cast<int>(10 * n);
  p = r;
  double rho = k.weighted_dot(r.data(), r.data(), w.data(), n);
  int it = 0;
  while (it < cap) {
    ++it;
    apply_screened_raw(f.grid, p.data(), q.data());
    double pq = k.weighted_dot(p.data(), q.data(), w.data(), n);
    double alpha = rho / pq;
    k.axpy(x.values.data(), alpha, p.data(), n);
    k.axpy(r.data(), -alpha, q.data(), n);
    if (max_abs(r) <= opts.tol) {
      // The recurrence claims convergence; trust only the true residual.
      rn = refresh_residual();
      if (rn <= opts.tol) return {std::move(x), rn, it};
      p = r;
      rho = k.weighted_dot(r.data(), r.data(), w.data(), n);
      continue;
    }
    double rho_next = k.weighted_dot(r.data(), r.data(), w.data(), n);
    k.aypx(p.data(), rho_next / rho, r.data(), n);
    rho = rho_next;
  }
  rn = refresh_residual();
  if (rn <= opts.tol) return {std::move(x), rn, it};
  throw SolverError("screened Poisson CG stalled at residual " +
                        format_double(rn) + " after " + std::to_string(it) +
                        " iterations (tol " + format_double(opts.tol) + ")",
                    rn, it);
}

EllipticSolution solve_direct(const Field& f, const EllipticOptions& opts) {
  const std::size_t n = f.size();
  TridiagFactors factors(f.grid);
  Field x = Field::zeros(f.grid);
  std::vector<double> scratch(n), r(n), e(n);

  double rn = 0.0;
  int refinements =
      detail::tridiag_solve_refined(factors, f.grid, f.values.data(),
                                    x.values.data(), scratch, r, e, opts.tol,
                                    &rn);
  if (rn > opts.tol) {
    throw SolverError("tridiagonal solve left residual " + format_double(rn) +
                          " above tol " + format_double(opts.tol),
                      rn, refinements);
  }
  return {std::move(x), rn, refinements};
}

Field sample_rhs(const Grid& g, int index, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const int dim = g.dimension();
  const double lx = g.extent(0);
  const double ly = dim == 2 ? g.extent(1) : 0.0;

  auto bump = [&](double cx, double cy) {
    double sigma = dim == 2 ? std::min(lx, ly) / 8.0 : lx / 8.0;
    return Field::from_function(g, [=](double x, double y) {
      double dx = (x - cx) / sigma;
      double dy = dim == 2 ? (y - cy) / sigma : 0.0;
      return std::exp(-(dx * dx + dy * dy));
    });
  };

  if (index == 0) return Field::constant(g, 1.0);
  if (index == 1) return bump(0.5 * lx, 0.5 * ly);
  if (index == 2) return bump(0.0, 0.0);

  if (index % 2 == 1) {
    // Smooth cosine series with decaying coefficients.
    if (dim == 1) {
      std::array<double, 9> a{};
      for (std::size_t k = 0; k < a.size(); ++k) {
        a[k] = unit(rng) / (1.0 + double(k * k));
      }
      return Field::from_function(g, [=](double x) {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
          s += a[k] * std::cos(double(k) * 3.14159265358979323846 * x / lx);
        }
        return s;
      });
    }
    std::array<double, 25> a{};
    for (auto& c : a) c = unit(rng);
    return Field::from_function(g, [=](double x, double y) {
      double s = 0.0;
      for (int k = 0; k < 5; ++k) {
        for (int l = 0; l < 5; ++l) {
          s += a[std::size_t(5 * k + l)] / (1.0 + double(k * k + l * l)) *
               std::cos(k * 3.14159265358979323846 * x / lx) *
               std::cos(l * 3.14159265358979323846 * y / ly);
        }
      }
      return s;
    });
  }

  // Alternating ±1 blocks with a few random change points, smoothed one
  // stencil width per axis. Step profiles are what drive the gradient
  // ratio toward its supremum.
  auto step_profile = [&rng](int n_vertices) {
    std::uniform_int_distribution<int> n_cuts(1, 4);
    std::uniform_real_distribution<double> pos(0.05, 0.95);
    std::vector<double> cuts(std::size_t(n_cuts(rng)));
    for (auto& c : cuts) c = pos(rng);
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> prof(static_cast<std::size_t>(n_vertices));
    for (int i = 0; i < n_vertices; ++i) {
      double t = double(i) / double(n_vertices - 1);
      double s = 1.0;
      for (double c : cuts) {
        if (t >= c) s = -s;
      }
      prof[std::size_t(i)] = s;
    }
    return prof;
  };
  Field f = Field::zeros(g);
  std::vector<double> px = step_profile(g.vertices(0));
  if (dim == 1) {
    f.values = px;
  } else {
    std::vector<double> py = step_profile(g.vertices(1));
    for (std::size_t j = 0; j < py.size(); ++j) {
      for (std::size_t i = 0; i < px.size(); ++i) {
        f.values[j * px.size() + i] = px[i] * py[j];
      }
    }
  }
  auto smooth_x = [&](Field& field) {
    const std::size_t nx = std::size_t(g.vertices(0));
    const std::size_t ny = dim == 2 ? std::size_t(g.vertices(1)) : 1;
    std::vector<double> row(nx);
    for (std::size_t j = 0; j < ny; ++j) {
      double* v = field.values.data() + j * nx;
      for (std::size_t i = 0; i < nx; ++i) {
        double left = v[i == 0 ? 1 : i - 1];
        double right = v[i + 1 == nx ? nx - 2 : i + 1];
        row[i] = 0.25 * (left + 2.0 * v[i] + right);
      }
      std::copy(row.begin(), row.end(), v);
    }
  };
  smooth_x(f);
  if (dim == 2) {
    const std::size_t nx = std::size_t(g.vertices(0));
    const std::size_t ny = std::size_t(g.vertices(1));
    std::vector<double> col(ny);
    for (std::size_t i = 0; i < nx; ++i) {
      for (std::size_t j = 0; j < ny; ++j) {
        double up = f.values[(j == 0 ? 1 : j - 1) * nx + i];
        double down = f.values[(j + 1 == ny ? ny - 2 : j + 1) * nx + i];
        col[j] = 0.25 * (up + 2.0 * f.values[j * nx + i] + down);
      }
      for (std::size_t j = 0; j < ny; ++j) f.values[j * nx + i] = col[j];
    }
  }
  return f;
}

}  // namespace

Field apply_screened(const Field& v) {
  Field out = Field::zeros(v.grid);
  apply_screened_raw(v.grid, v.values.data(), out.values.data());
  return out;
}

EllipticSolution solve_screened_poisson(const Field& f,
                                        const EllipticOptions& opts) {
  validate_inputs(f, opts);
  EllipticMethod method = opts.method;
  if (method == EllipticMethod::automatic) {
    method = f.grid.dimension() == 1 ? EllipticMethod::direct
                                     : EllipticMethod::conjugate_gradient;
  }
  if (method == EllipticMethod::direct) {
    if (f.grid.dimension() != 1) {
      throw std::invalid_argument("direct elliptic solver supports 1D only");
    }
    return solve_direct(f, opts);
  }
  return solve_cg(f, opts);
}

double lp_norm(const Field& f, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("lp_norm needs p > 0");
  Field powed = f;
  for (auto& v : powed.values) v = std::pow(std::fabs(v), p);
  return std::pow(integrate(powed), 1.0 / p);
}

DomainConstants estimate_domain_constants(const Grid& g, int n_samples,
                                          const std::vector<double>& p_list,
                                          std::uint64_t seed) {
  if (n_samples < 1) {
    throw std::invalid_argument("estimate_domain_constants needs n_samples >= 1");
  }
  const double half_dim = 0.5 * g.dimension();
  for (double p : p_list) {
    if (!(p > half_dim)) {
      throw std::invalid_argument("c_p estimate needs p > N/2, got p = " +
                                  format_double(p));
    }
  }

  std::mt19937_64 rng(seed);
  DomainConstants out;
  out.samples = n_samples;
  out.seed = seed;
  for (double p : p_list) out.c_p_hat[p] = 0.0;

  for (int k = 0; k < n_samples; ++k) {
    Field f = sample_rhs(g, k, rng);
    EllipticSolution sol = solve_screened_poisson(f);
    double f_sup = kernels::ops().max_abs_dev(f.values.data(), 0.0, f.size());
    if (f_sup <= 0.0) continue;
    double v_sup = kernels::ops().max_abs_dev(sol.v.values.data(), 0.0,
                                              sol.v.size());
    out.c_omega_hat =
        std::max(out.c_omega_hat, grad_sup_norm(sol.v) / f_sup);
    for (double p : p_list) {
      out.c_p_hat[p] = std::max(out.c_p_hat[p], v_sup / lp_norm(f, p));
    }
  }
  return out;
}

std::string DomainConstants::to_json() const {
  nlohmann::ordered_json j;
  j["c_omega_hat"] = c_omega_hat;
  nlohmann::ordered_json cp = nlohmann::ordered_json::object();
  for (const auto& [p, value] : c_p_hat) cp[format_double(p)] = value;
  j["c_p"] = cp;
  j["samples"] = samples;
  j["seed"] = seed;
  return j.dump(2);
}

}  // namespace motilab
