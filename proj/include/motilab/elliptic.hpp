#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "motilab/grid.hpp"

namespace motilab {

// Solvers for the screened Poisson problem (I - lap)v = f with Neumann
// boundary conditions. The operator is an M-matrix, so solutions obey the
// discrete maximum principle min f <= v <= max f, and integrate(v) =
// integrate(f) up to solver tolerance.

struct EllipticSolution {
  Field v;
  double residual_norm;  // max-norm of f - (I - lap)v at exit
  int iterations;        // CG iterations, or refinement passes when direct
};

enum class EllipticMethod {
  automatic,            // direct for 1D, conjugate gradients for 2D
  conjugate_gradient,
  direct,               // tridiagonal elimination, 1D only
};

struct EllipticOptions {
  double tol = 1e-10;   // max-norm residual target
  int max_iterations = 0;  // 0 means 10 * total vertices
  EllipticMethod method = EllipticMethod::automatic;
  const Field* initial_guess = nullptr;  // warm start for the CG path
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double last_residual, int iterations)
      : std::runtime_error(what),
        last_residual_(last_residual),
        iterations_(iterations) {}
  double last_residual() const { return last_residual_; }
  int iterations() const { return iterations_; }

 private:
  double last_residual_;
  int iterations_;
};

// (I - lap)v with mirror-ghost Neumann stencils.
Field apply_screened(const Field& v);

EllipticSolution solve_screened_poisson(const Field& f,
                                        const EllipticOptions& opts = {});

// Sampled lower bounds for the domain constants: c_omega_hat estimates
// sup ||grad v||_inf / ||f||_inf and c_p_hat estimates sup ||v||_inf /
// ||f||_p over solutions of (I - lap)v = f. Estimates are maxima over a
// deterministic probe set (constant, centered bump, corner bump) followed
// by seeded random fields, so they grow monotonically with n_samples for
// a fixed seed.
struct DomainConstants {
  double c_omega_hat = 0.0;
  std::map<double, double> c_p_hat;
  int samples = 0;
  std::uint64_t seed = 0;

  std::string to_json() const;
};

DomainConstants estimate_domain_constants(const Grid& g, int n_samples,
                                          const std::vector<double>& p_list,
                                          std::uint64_t seed);

// (integrate |f|^p)^(1/p) with trapezoid quadrature.
double lp_norm(const Field& f, double p);

}  // namespace motilab
