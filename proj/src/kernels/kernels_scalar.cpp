#include <cmath>
#include <cstddef>

#include "kernels_impl.hpp"

// Reference implementations. Plain loops, no intrinsics; these define the
// semantics the SIMD backends are tested against.

namespace motilab::kernels::detail::ref {

double sum(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double weighted_dot(const double* x, const double* y, const double* w,
                    std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i] * w[i];
  return s;
}

void minmax(const double* x, std::size_t n, double& lo, double& hi) {
  double a = x[0];
  double b = x[0];
  for (std::size_t i = 1; i < n; ++i) {
    if (x[i] < a) a = x[i];
    if (x[i] > b) b = x[i];
  }
  lo = a;
  hi = b;
}

double max_abs_diff(const double* x, const double* y, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = std::fabs(x[i] - y[i]);
    if (d > m) m = d;
  }
  return m;
}

double max_abs_dev(const double* x, double c, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = std::fabs(x[i] - c);
    if (d > m) m = d;
  }
  return m;
}

void mul(double* out, const double* x, const double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

void axpy(double* y, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void aypx(double* y, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + a * y[i];
}

void exp_scale(double* out, const double* x, double c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(c * x[i]);
}

void logistic_update(double* u, const double* lap, double dt, double mu,
                     bool positive_part, std::size_t n) {
  if (positive_part) {
    for (std::size_t i = 0; i < n; ++i) {
      double up = u[i] > 0.0 ? u[i] : 0.0;
      u[i] += dt * (lap[i] + mu * u[i] * (1.0 - up));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i)
      u[i] += dt * (lap[i] + mu * u[i] * (1.0 - u[i]));
  }
}

void regularized_rhs(double* out, const double* u, double n_reg,
                     std::size_t n) {
  double inv = 1.0 / n_reg;
  for (std::size_t i = 0; i < n; ++i) {
    double up = u[i] > 0.0 ? u[i] : 0.0;
    out[i] = u[i] / (1.0 + up * inv);
  }
}

void laplacian1d(double* out, const double* f, double inv_h2, std::size_t n) {
  out[0] = 2.0 * (f[1] - f[0]) * inv_h2;
  for (std::size_t i = 1; i + 1 < n; ++i)
    out[i] = (f[i - 1] - 2.0 * f[i] + f[i + 1]) * inv_h2;
  out[n - 1] = 2.0 * (f[n - 2] - f[n - 1]) * inv_h2;
}

void screened1d(double* out, const double* f, double inv_h2, std::size_t n) {
  out[0] = f[0] - 2.0 * (f[1] - f[0]) * inv_h2;
  for (std::size_t i = 1; i + 1 < n; ++i)
    out[i] = f[i] - (f[i - 1] - 2.0 * f[i] + f[i + 1]) * inv_h2;
  out[n - 1] = f[n - 1] - 2.0 * (f[n - 2] - f[n - 1]) * inv_h2;
}

double end_diff3(double f0, double f1, double f2) {
  double a = f1 - f0;
  double b = f2 - f1;
  return 3.0 * a - b;
}

double grad_sup_1d(const double* f, double inv_2h, std::size_t n) {
  double m = std::fabs(end_diff3(f[0], f[1], f[2]));
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double d = std::fabs(f[i + 1] - f[i - 1]);
    if (d > m) m = d;
  }
  double b = std::fabs(end_diff3(f[n - 1], f[n - 2], f[n - 3]));
  if (b > m) m = b;
  return m * inv_2h;
}

void laplacian2d(double* out, const double* f, std::size_t nx, std::size_t ny,
                 double inv_hx2, double inv_hy2) {
  for (std::size_t j = 0; j < ny; ++j) {
    const double* row = f + j * nx;
    const double* rowm = f + (j == 0 ? 1 : j - 1) * nx;
    const double* rowp = f + (j + 1 == ny ? ny - 2 : j + 1) * nx;
    double* o = out + j * nx;
    for (std::size_t i = 0; i < nx; ++i) {
      double left = row[i == 0 ? 1 : i - 1];
      double right = row[i + 1 == nx ? nx - 2 : i + 1];
      o[i] = (left - 2.0 * row[i] + right) * inv_hx2 +
             (rowm[i] - 2.0 * row[i] + rowp[i]) * inv_hy2;
    }
  }
}

void screened2d(double* out, const double* f, std::size_t nx, std::size_t ny,
                double inv_hx2, double inv_hy2) {
  laplacian2d(out, f, nx, ny, inv_hx2, inv_hy2);
  for (std::size_t i = 0; i < nx * ny; ++i) out[i] = f[i] - out[i];
}

double grad_sup_2d(const double* f, std::size_t nx, std::size_t ny,
                   double inv_2hx, double inv_2hy) {
  double m2 = 0.0;
  for (std::size_t j = 0; j < ny; ++j) {
    const double* row = f + j * nx;
    for (std::size_t i = 0; i < nx; ++i) {
      double gx;
      if (i == 0)
        gx = end_diff3(row[0], row[1], row[2]);
      else if (i + 1 == nx)
        gx = end_diff3(row[nx - 1], row[nx - 2], row[nx - 3]);
      else
        gx = row[i + 1] - row[i - 1];
      gx *= inv_2hx;
      double gy;
      if (j == 0)
        gy = end_diff3(f[i], f[nx + i], f[2 * nx + i]);
      else if (j + 1 == ny)
        gy = end_diff3(f[(ny - 1) * nx + i], f[(ny - 2) * nx + i],
                       f[(ny - 3) * nx + i]);
      else
        gy = f[(j + 1) * nx + i] - f[(j - 1) * nx + i];
      gy *= inv_2hy;
      double g2 = gx * gx + gy * gy;
      if (g2 > m2) m2 = g2;
    }
  }
  return std::sqrt(m2);
}

}  // namespace motilab::kernels::detail::ref

namespace motilab::kernels::detail {

const Ops& scalar_table() {
  static const Ops t = {
      ref::sum,         ref::dot,         ref::weighted_dot,
      ref::minmax,      ref::max_abs_diff, ref::max_abs_dev,
      ref::mul,         ref::axpy,        ref::aypx,
      ref::exp_scale,   ref::logistic_update, ref::regularized_rhs,
      ref::laplacian1d, ref::screened1d,  ref::grad_sup_1d,
      ref::laplacian2d, ref::screened2d,  ref::grad_sup_2d,
  };
  return t;
}

}  // namespace motilab::kernels::detail
