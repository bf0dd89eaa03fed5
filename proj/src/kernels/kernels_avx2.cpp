#include "kernels_impl.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cmath>
#include <cstddef>
#include <cstring>

// AVX2 + FMA variants of the hot kernels. Tails shorter than one vector
// fall back to the scalar expressions; grad_sup reductions keep the exact
// evaluation order of the reference so results stay bit-identical there.

namespace {

using std::size_t;
namespace ref = motilab::kernels::detail::ref;

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

inline double hmin(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_min_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_min_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

inline __m256d vabs(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

double sum(const double* x, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot(const double* x, const double* y, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double weighted_dot(const double* x, const double* y, const double* w,
                    size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d xy = _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_fmadd_pd(xy, _mm256_loadu_pd(w + i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * y[i] * w[i];
  return s;
}

void minmax(const double* x, size_t n, double& lo, double& hi) {
  if (n < 4) {
    motilab::kernels::detail::ref::minmax(x, n, lo, hi);
    return;
  }
  __m256d vlo = _mm256_loadu_pd(x);
  __m256d vhi = vlo;
  size_t i = 4;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    vlo = _mm256_min_pd(vlo, v);
    vhi = _mm256_max_pd(vhi, v);
  }
  double a = hmin(vlo);
  double b = hmax(vhi);
  for (; i < n; ++i) {
    if (x[i] < a) a = x[i];
    if (x[i] > b) b = x[i];
  }
  lo = a;
  hi = b;
}

double max_abs_diff(const double* x, const double* y, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_max_pd(acc, vabs(d));
  }
  double m = hmax(acc);
  for (; i < n; ++i) {
    double d = std::fabs(x[i] - y[i]);
    if (d > m) m = d;
  }
  return m;
}

double max_abs_dev(const double* x, double c, size_t n) {
  __m256d vc = _mm256_set1_pd(c);
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_max_pd(acc, vabs(_mm256_sub_pd(_mm256_loadu_pd(x + i), vc)));
  double m = hmax(acc);
  for (; i < n; ++i) {
    double d = std::fabs(x[i] - c);
    if (d > m) m = d;
  }
  return m;
}

void mul(double* out, const double* x, const double* y, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) out[i] = x[i] * y[i];
}

void axpy(double* y, double a, const double* x, size_t n) {
  __m256d va = _mm256_set1_pd(a);
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void aypx(double* y, double a, const double* x, size_t n) {
  __m256d va = _mm256_set1_pd(a);
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = x[i] + a * y[i];
}

// exp on [-708, 708]: split x = n*ln2 + r, evaluate a degree-13 Taylor
// polynomial on r in [-ln2/2, ln2/2], then scale the exponent bits by n.
// Agrees with std::exp to a couple of ulp on the supported range.
inline __m256d exp_pd(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);
  x = _mm256_max_pd(x, _mm256_set1_pd(-708.0));
  x = _mm256_min_pd(x, _mm256_set1_pd(708.0));
  __m256d nf = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                               _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(nf, ln2_hi, x);
  r = _mm256_fnmadd_pd(nf, ln2_lo, r);

  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  __m128i n32 = _mm256_cvtpd_epi32(nf);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
}

void exp_scale(double* out, const double* x, double c, size_t n) {
  __m256d vc = _mm256_set1_pd(c);
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, exp_pd(_mm256_mul_pd(vc, _mm256_loadu_pd(x + i))));
  if (i < n) {
    double tin[4] = {0.0, 0.0, 0.0, 0.0};
    double tout[4];
    std::memcpy(tin, x + i, (n - i) * sizeof(double));
    _mm256_storeu_pd(tout, exp_pd(_mm256_mul_pd(vc, _mm256_loadu_pd(tin))));
    std::memcpy(out + i, tout, (n - i) * sizeof(double));
  }
}

void logistic_update(double* u, const double* lap, double dt, double mu,
                     bool positive_part, size_t n) {
  __m256d vdt = _mm256_set1_pd(dt);
  __m256d vmu = _mm256_set1_pd(mu);
  __m256d one = _mm256_set1_pd(1.0);
  __m256d zero = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vu = _mm256_loadu_pd(u + i);
    __m256d g = positive_part ? _mm256_max_pd(vu, zero) : vu;
    __m256d react = _mm256_mul_pd(vu, _mm256_sub_pd(one, g));
    __m256d rhs = _mm256_fmadd_pd(vmu, react, _mm256_loadu_pd(lap + i));
    _mm256_storeu_pd(u + i, _mm256_fmadd_pd(vdt, rhs, vu));
  }
  for (; i < n; ++i) {
    double g = positive_part && u[i] < 0.0 ? 0.0 : u[i];
    u[i] += dt * (lap[i] + mu * u[i] * (1.0 - g));
  }
}

void regularized_rhs(double* out, const double* u, double n_reg, size_t n) {
  __m256d inv = _mm256_set1_pd(1.0 / n_reg);
  __m256d one = _mm256_set1_pd(1.0);
  __m256d zero = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vu = _mm256_loadu_pd(u + i);
    __m256d den = _mm256_fmadd_pd(_mm256_max_pd(vu, zero), inv, one);
    _mm256_storeu_pd(out + i, _mm256_div_pd(vu, den));
  }
  for (; i < n; ++i) {
    double up = u[i] > 0.0 ? u[i] : 0.0;
    out[i] = u[i] / (1.0 + up / n_reg);
  }
}

void laplacian1d(double* out, const double* f, double inv_h2, size_t n) {
  __m256d two = _mm256_set1_pd(2.0);
  __m256d vinv = _mm256_set1_pd(inv_h2);
  out[0] = 2.0 * (f[1] - f[0]) * inv_h2;
  size_t i = 1;
  for (; i + 4 <= n - 1; i += 4) {
    __m256d a = _mm256_loadu_pd(f + i - 1);
    __m256d b = _mm256_loadu_pd(f + i);
    __m256d c = _mm256_loadu_pd(f + i + 1);
    __m256d s = _mm256_fnmadd_pd(two, b, _mm256_add_pd(a, c));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(s, vinv));
  }
  for (; i + 1 < n; ++i)
    out[i] = (f[i - 1] - 2.0 * f[i] + f[i + 1]) * inv_h2;
  out[n - 1] = 2.0 * (f[n - 2] - f[n - 1]) * inv_h2;
}

void screened1d(double* out, const double* f, double inv_h2, size_t n) {
  __m256d two = _mm256_set1_pd(2.0);
  __m256d vinv = _mm256_set1_pd(inv_h2);
  out[0] = f[0] - 2.0 * (f[1] - f[0]) * inv_h2;
  size_t i = 1;
  for (; i + 4 <= n - 1; i += 4) {
    __m256d a = _mm256_loadu_pd(f + i - 1);
    __m256d b = _mm256_loadu_pd(f + i);
    __m256d c = _mm256_loadu_pd(f + i + 1);
    __m256d s = _mm256_fnmadd_pd(two, b, _mm256_add_pd(a, c));
    _mm256_storeu_pd(out + i, _mm256_fnmadd_pd(s, vinv, b));
  }
  for (; i + 1 < n; ++i)
    out[i] = f[i] - (f[i - 1] - 2.0 * f[i] + f[i + 1]) * inv_h2;
  out[n - 1] = f[n - 1] - 2.0 * (f[n - 2] - f[n - 1]) * inv_h2;
}

double grad_sup_1d(const double* f, double inv_2h, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 1;
  for (; i + 4 <= n - 1; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(f + i + 1), _mm256_loadu_pd(f + i - 1));
    acc = _mm256_max_pd(acc, vabs(d));
  }
  double m = hmax(acc);
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

void laplacian2d(double* out, const double* f, size_t nx, size_t ny,
                 double inv_hx2, double inv_hy2) {
  __m256d two = _mm256_set1_pd(2.0);
  __m256d vihx = _mm256_set1_pd(inv_hx2);
  __m256d vihy = _mm256_set1_pd(inv_hy2);
  for (size_t j = 0; j < ny; ++j) {
    const double* row = f + j * nx;
    const double* rowm = f + (j == 0 ? 1 : j - 1) * nx;
    const double* rowp = f + (j + 1 == ny ? ny - 2 : j + 1) * nx;
    double* o = out + j * nx;
    o[0] = 2.0 * (row[1] - row[0]) * inv_hx2 +
           (rowm[0] - 2.0 * row[0] + rowp[0]) * inv_hy2;
    size_t i = 1;
    for (; i + 4 <= nx - 1; i += 4) {
      __m256d c = _mm256_loadu_pd(row + i);
      __m256d sx = _mm256_fnmadd_pd(
          two, c, _mm256_add_pd(_mm256_loadu_pd(row + i - 1),
                                _mm256_loadu_pd(row + i + 1)));
      __m256d sy = _mm256_fnmadd_pd(
          two, c, _mm256_add_pd(_mm256_loadu_pd(rowm + i),
                                _mm256_loadu_pd(rowp + i)));
      _mm256_storeu_pd(o + i, _mm256_fmadd_pd(sx, vihx, _mm256_mul_pd(sy, vihy)));
    }
    for (; i + 1 < nx; ++i)
      o[i] = (row[i - 1] - 2.0 * row[i] + row[i + 1]) * inv_hx2 +
             (rowm[i] - 2.0 * row[i] + rowp[i]) * inv_hy2;
    o[nx - 1] = 2.0 * (row[nx - 2] - row[nx - 1]) * inv_hx2 +
                (rowm[nx - 1] - 2.0 * row[nx - 1] + rowp[nx - 1]) * inv_hy2;
  }
}

void screened2d(double* out, const double* f, size_t nx, size_t ny,
                double inv_hx2, double inv_hy2) {
  laplacian2d(out, f, nx, ny, inv_hx2, inv_hy2);
  size_t n = nx * ny;
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(f + i),
                                            _mm256_loadu_pd(out + i)));
  for (; i < n; ++i) out[i] = f[i] - out[i];
}

}  // namespace

namespace motilab::kernels::detail {

const Ops* avx2_table() {
  static const Ops t = {
      sum,         dot,         weighted_dot,
      minmax,      max_abs_diff, max_abs_dev,
      mul,         axpy,        aypx,
      exp_scale,   logistic_update, regularized_rhs,
      laplacian1d, screened1d,  grad_sup_1d,
      laplacian2d, screened2d,  ref::grad_sup_2d,
  };
  return &t;
}

}  // namespace motilab::kernels::detail

#else

namespace motilab::kernels::detail {
const Ops* avx2_table() { return nullptr; }
}  // namespace motilab::kernels::detail

#endif
