#pragma once

#include <cstddef>
#include <vector>

#include "motilab/grid.hpp"
#include "motilab/kernels.hpp"

// Shared between the elliptic solver and the PDE stepping loop, which
// re-solves the screened Poisson problem every step and wants the 1D
// factorization done once per grid.

namespace motilab::detail {

inline void apply_screened_raw(const Grid& g, const double* in, double* out) {
  const auto& k = kernels::ops();
  if (g.dimension() == 1) {
    double h = g.spacing(0);
    k.screened1d(out, in, 1.0 / (h * h), g.total_vertices());
  } else {
    double hx = g.spacing(0);
    double hy = g.spacing(1);
    k.screened2d(out, in, static_cast<std::size_t>(g.vertices(0)),
                 static_cast<std::size_t>(g.vertices(1)), 1.0 / (hx * hx),
                 1.0 / (hy * hy));
  }
}

// Tridiagonal factorization of (I - lap) on a 1D mirror-ghost grid. The
// boundary rows carry the doubled off-diagonal 2/h^2.
struct TridiagFactors {
  std::vector<double> upper;  // normalized superdiagonal
  std::vector<double> minv;   // reciprocal pivots
  double c;                   // 1/h^2

  explicit TridiagFactors(const Grid& g) {
    const std::size_t n = g.total_vertices();
    double h = g.spacing(0);
    c = 1.0 / (h * h);
    upper.resize(n);
    minv.resize(n);
    const double diag = 1.0 + 2.0 * c;
    minv[0] = 1.0 / diag;
    upper[0] = -2.0 * c * minv[0];
    for (std::size_t i = 1; i < n; ++i) {
      double sub = (i + 1 == n) ? -2.0 * c : -c;
      minv[i] = 1.0 / (diag - sub * upper[i - 1]);
      upper[i] = -c * minv[i];
    }
  }

  void solve(const double* rhs, double* x, std::vector<double>& scratch) const {
    const std::size_t n = minv.size();
    scratch[0] = rhs[0] * minv[0];
    for (std::size_t i = 1; i < n; ++i) {
      double sub = (i + 1 == n) ? -2.0 * c : -c;
      scratch[i] = (rhs[i] - sub * scratch[i - 1]) * minv[i];
    }
    x[n - 1] = scratch[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
      x[i] = scratch[i] - upper[i] * x[i + 1];
    }
  }
};

// Direct solve plus at most two iterative-refinement passes, stopping once
// the max-norm residual reaches tol. Returns the number of passes and
// stores the exit residual; the caller decides what an unconverged exit
// means. All work buffers must be sized to the grid.
inline int tridiag_solve_refined(const TridiagFactors& factors, const Grid& g,
                                 const double* rhs, double* x,
                                 std::vector<double>& scratch,
                                 std::vector<double>& resid,
                                 std::vector<double>& correction, double tol,
                                 double* residual_out) {
  const std::size_t n = factors.minv.size();
  factors.solve(rhs, x, scratch);

  auto residual = [&]() {
    apply_screened_raw(g, x, resid.data());
    for (std::size_t i = 0; i < n; ++i) resid[i] = rhs[i] - resid[i];
    return kernels::ops().max_abs_dev(resid.data(), 0.0, n);
  };

  double rn = residual();
  int refinements = 0;
  while (rn > tol && refinements < 2) {
    factors.solve(resid.data(), correction.data(), scratch);
    for (std::size_t i = 0; i < n; ++i) x[i] += correction[i];
    rn = residual();
    ++refinements;
  }
  *residual_out = rn;
  return refinements;
}

}  // namespace motilab::detail
