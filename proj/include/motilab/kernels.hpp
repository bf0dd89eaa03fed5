#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel primitives behind the field, stencil, and stepping code.
// Every operation has a scalar reference implementation; AVX2 and NEON
// variants exist for the hot ones. One table is active per process,
// selected at startup from the CPU (override with MOTILAB_KERNELS=
// scalar|avx2|neon); entries a backend does not specialize fall back to
// the scalar function, so any table is always fully populated.

namespace motilab::kernels {

enum class Backend { scalar, avx2, neon };

struct Ops {
  // Reductions.
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  // sum(x[i]*y[i]*w[i]); the inner product that makes the mirror-ghost
  // Neumann operator symmetric uses trapezoid weights for w.
  double (*weighted_dot)(const double* x, const double* y, const double* w,
                         std::size_t n);
  void (*minmax)(const double* x, std::size_t n, double& lo, double& hi);
  double (*max_abs_diff)(const double* x, const double* y, std::size_t n);
  double (*max_abs_dev)(const double* x, double c, std::size_t n);

  // Elementwise.
  void (*mul)(double* out, const double* x, const double* y, std::size_t n);
  void (*axpy)(double* y, double a, const double* x, std::size_t n);  // y += a*x
  void (*aypx)(double* y, double a, const double* x, std::size_t n);  // y = x + a*y
  void (*exp_scale)(double* out, const double* x, double c, std::size_t n);  // exp(c*x)
  // u += dt*(lap + mu*u*(1-u)); with positive_part the reaction uses
  // (1 - max(u,0)) instead of (1 - u).
  void (*logistic_update)(double* u, const double* lap, double dt, double mu,
                          bool positive_part, std::size_t n);
  // out = u / (1 + max(u,0)/n_reg)
  void (*regularized_rhs)(double* out, const double* u, double n_reg,
                          std::size_t n);

  // Stencils on vertex-centered grids with mirror ghosts (ghost = first
  // interior neighbor), so constants are annihilated exactly.
  void (*laplacian1d)(double* out, const double* f, double inv_h2,
                      std::size_t n);
  void (*screened1d)(double* out, const double* f, double inv_h2,
                     std::size_t n);  // f - lap(f)
  // max |centered difference|; one-sided second order at the two ends.
  double (*grad_sup_1d)(const double* f, double inv_2h, std::size_t n);
  void (*laplacian2d)(double* out, const double* f, std::size_t nx,
                      std::size_t ny, double inv_hx2, double inv_hy2);
  void (*screened2d)(double* out, const double* f, std::size_t nx,
                     std::size_t ny, double inv_hx2, double inv_hy2);
  double (*grad_sup_2d)(const double* f, std::size_t nx, std::size_t ny,
                        double inv_2hx, double inv_2hy);
};

const Ops& ops();             // active table
const Ops& ops(Backend b);    // table for a specific backend (must be available)

Backend active_backend();
bool backend_available(Backend b);
std::string_view backend_name(Backend b);

// Swap the active table; returns false and keeps the current one if the
// requested backend is unavailable. For tests and startup only, not for
// use while compute is in flight.
bool set_backend(Backend b);

}  // namespace motilab::kernels
