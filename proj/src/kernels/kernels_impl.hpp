#pragma once

#include "motilab/kernels.hpp"

// Internal glue between the backend translation units and the dispatcher.
// Backends that are compiled out return nullptr from their table getter.

namespace motilab::kernels::detail {

const Ops& scalar_table();
const Ops* avx2_table();
const Ops* neon_table();

namespace ref {
// Second-order one-sided end stencil 3(f1-f0) - (f2-f1), written as
// differences so constants cancel exactly. Compiled once here and shared
// by every backend, which keeps grad_sup results bit-identical across
// translation units with different contraction settings.
double end_diff3(double f0, double f1, double f2);
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double weighted_dot(const double* x, const double* y, const double* w,
                    std::size_t n);
void minmax(const double* x, std::size_t n, double& lo, double& hi);
double max_abs_diff(const double* x, const double* y, std::size_t n);
double max_abs_dev(const double* x, double c, std::size_t n);
void mul(double* out, const double* x, const double* y, std::size_t n);
void axpy(double* y, double a, const double* x, std::size_t n);
void aypx(double* y, double a, const double* x, std::size_t n);
void exp_scale(double* out, const double* x, double c, std::size_t n);
void logistic_update(double* u, const double* lap, double dt, double mu,
                     bool positive_part, std::size_t n);
void regularized_rhs(double* out, const double* u, double n_reg,
                     std::size_t n);
void laplacian1d(double* out, const double* f, double inv_h2, std::size_t n);
void screened1d(double* out, const double* f, double inv_h2, std::size_t n);
double grad_sup_1d(const double* f, double inv_2h, std::size_t n);
void laplacian2d(double* out, const double* f, std::size_t nx, std::size_t ny,
                 double inv_hx2, double inv_hy2);
void screened2d(double* out, const double* f, std::size_t nx, std::size_t ny,
                double inv_hx2, double inv_hy2);
double grad_sup_2d(const double* f, std::size_t nx, std::size_t ny,
                   double inv_2hx, double inv_2hy);
}  // namespace ref

}  // namespace motilab::kernels::detail
