#include "kernels_impl.hpp"

#if defined(__ARM_NEON) && defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>
#include <cstddef>

// NEON (AArch64) variants of the 1D kernels. The vector exp and the 2D
// stencils stay on the scalar path; dispatch fills those table slots with
// the reference functions.

namespace {

using std::size_t;
namespace ref = motilab::kernels::detail::ref;

double sum(const double* x, size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot(const double* x, const double* y, size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vfmaq_f64(acc, vld1q_f64(x + i), vld1q_f64(y + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double weighted_dot(const double* x, const double* y, const double* w,
                    size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t xy = vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i));
    acc = vfmaq_f64(acc, xy, vld1q_f64(w + i));
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i] * y[i] * w[i];
  return s;
}

void minmax(const double* x, size_t n, double& lo, double& hi) {
  if (n < 2) {
    motilab::kernels::detail::ref::minmax(x, n, lo, hi);
    return;
  }
  float64x2_t vlo = vld1q_f64(x);
  float64x2_t vhi = vlo;
  size_t i = 2;
  for (; i + 2 <= n; i += 2) {
    float64x2_t v = vld1q_f64(x + i);
    vlo = vminq_f64(vlo, v);
    vhi = vmaxq_f64(vhi, v);
  }
  double a = vminvq_f64(vlo);
  double b = vmaxvq_f64(vhi);
  for (; i < n; ++i) {
    if (x[i] < a) a = x[i];
    if (x[i] > b) b = x[i];
  }
  lo = a;
  hi = b;
}

double max_abs_diff(const double* x, const double* y, size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vmaxq_f64(acc, vabsq_f64(vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i))));
  double m = vmaxvq_f64(acc);
  for (; i < n; ++i) {
    double d = std::fabs(x[i] - y[i]);
    if (d > m) m = d;
  }
  return m;
}

double max_abs_dev(const double* x, double c, size_t n) {
  float64x2_t vc = vdupq_n_f64(c);
  float64x2_t acc = vdupq_n_f64(0.0);
  size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vmaxq_f64(acc, vabsq_f64(vsubq_f64(vld1q_f64(x + i), vc)));
  double m = vmaxvq_f64(acc);
  for (; i < n; ++i) {
    double d = std::fabs(x[i] - c);
    if (d > m) m = d;
  }
  return m;
}

void mul(double* out, const double* x, const double* y, size_t n) {
  size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(out + i, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  for (; i < n; ++i) out[i] = x[i] * y[i];
}

void axpy(double* y, double a, const double* x, size_t n) {
  float64x2_t va = vdupq_n_f64(a);
  size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void aypx(double* y, double a, const double* x, size_t n) {
  float64x2_t va = vdupq_n_f64(a);
  size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(x + i), va, vld1q_f64(y + i)));
  for (; i < n; ++i) y[i] = x[i] + a * y[i];
}

void logistic_update(double* u, const double* lap, double dt, double mu,
                     bool positive_part, size_t n) {
  float64x2_t vdt = vdupq_n_f64(dt);
  float64x2_t vmu = vdupq_n_f64(mu);
  float64x2_t one = vdupq_n_f64(1.0);
  float64x2_t zero = vdupq_n_f64(0.0);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vu = vld1q_f64(u + i);
    float64x2_t g = positive_part ? vmaxq_f64(vu, zero) : vu;
    float64x2_t react = vmulq_f64(vu, vsubq_f64(one, g));
    float64x2_t rhs = vfmaq_f64(vld1q_f64(lap + i), vmu, react);
    vst1q_f64(u + i, vfmaq_f64(vu, vdt, rhs));
  }
  for (; i < n; ++i) {
    double g = positive_part && u[i] < 0.0 ? 0.0 : u[i];
    u[i] += dt * (lap[i] + mu * u[i] * (1.0 - g));
  }
}

void regularized_rhs(double* out, const double* u, double n_reg, size_t n) {
  float64x2_t inv = vdupq_n_f64(1.0 / n_reg);
  float64x2_t one = vdupq_n_f64(1.0);
  float64x2_t zero = vdupq_n_f64(0.0);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vu = vld1q_f64(u + i);
    float64x2_t den = vfmaq_f64(one, vmaxq_f64(vu, zero), inv);
    vst1q_f64(out + i, vdivq_f64(vu, den));
  }
  for (; i < n; ++i) {
    double up = u[i] > 0.0 ? u[i] : 0.0;
    out[i] = u[i] / (1.0 + up / n_reg);
  }
}

void laplacian1d(double* out, const double* f, double inv_h2, size_t n) {
  float64x2_t two = vdupq_n_f64(2.0);
  float64x2_t vinv = vdupq_n_f64(inv_h2);
  out[0] = 2.0 * (f[1] - f[0]) * inv_h2;
  size_t i = 1;
  for (; i + 2 <= n - 1; i += 2) {
    float64x2_t a = vld1q_f64(f + i - 1);
    float64x2_t b = vld1q_f64(f + i);
    float64x2_t c = vld1q_f64(f + i + 1);
    float64x2_t s = vfmsq_f64(vaddq_f64(a, c), two, b);
    vst1q_f64(out + i, vmulq_f64(s, vinv));
  }
  for (; i + 1 < n; ++i)
    out[i] = (f[i - 1] - 2.0 * f[i] + f[i + 1]) * inv_h2;
  out[n - 1] = 2.0 * (f[n - 2] - f[n - 1]) * inv_h2;
}

void screened1d(double* out, const double* f, double inv_h2, size_t n) {
  float64x2_t two = vdupq_n_f64(2.0);
  float64x2_t vinv = vdupq_n_f64(inv_h2);
  out[0] = f[0] - 2.0 * (f[1] - f[0]) * inv_h2;
  size_t i = 1;
  for (; i + 2 <= n - 1; i += 2) {
    float64x2_t a = vld1q_f64(f + i - 1);
    float64x2_t b = vld1q_f64(f + i);
    float64x2_t c = vld1q_f64(f + i + 1);
    float64x2_t s = vfmsq_f64(vaddq_f64(a, c), two, b);
    vst1q_f64(out + i, vfmsq_f64(b, s, vinv));
  }
  for (; i + 1 < n; ++i)
    out[i] = f[i] - (f[i - 1] - 2.0 * f[i] + f[i + 1]) * inv_h2;
  out[n - 1] = f[n - 1] - 2.0 * (f[n - 2] - f[n - 1]) * inv_h2;
}

double grad_sup_1d(const double* f, double inv_2h, size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  size_t i = 1;
  for (; i + 2 <= n - 1; i += 2)
    acc = vmaxq_f64(acc, vabsq_f64(vsubq_f64(vld1q_f64(f + i + 1),
                                             vld1q_f64(f + i - 1))));
  double m = vmaxvq_f64(acc);
  for (; i + 1 < n; ++i) {
    double d = std::fabs(f[i + 1] - f[i - 1]);
    if (d > m) m = d;
  }
  double b0 = std::fabs(ref::end_diff3(f[0], f[1], f[2]));
  if (b0 > m) m = b0;
  double b1 = std::fabs(ref::end_diff3(f[n - 1], f[n - 2], f[n - 3]));
  if (b1 > m) m = b1;
  return m * inv_2h;
}

}  // namespace

namespace motilab::kernels::detail {

const Ops* neon_table() {
  static const Ops t = {
      sum,         dot,         weighted_dot,
      minmax,      max_abs_diff, max_abs_dev,
      mul,         axpy,        aypx,
      ref::exp_scale, logistic_update, regularized_rhs,
      laplacian1d, screened1d,  grad_sup_1d,
      ref::laplacian2d, ref::screened2d, ref::grad_sup_2d,
  };
  return &t;
}

}  // namespace motilab::kernels::detail

#else

namespace motilab::kernels::detail {
const Ops* neon_table() { return nullptr; }
}  // namespace motilab::kernels::detail

#endif
