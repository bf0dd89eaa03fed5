#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

namespace motilab {

// Vertex-centered discretization of an interval or axis-aligned rectangle.
// Homogeneous Neumann boundary conditions enter through mirror ghost
// values (ghost = first interior neighbor), which keeps the Laplacian
// symmetric under the trapezoid inner product and annihilates constants
// exactly. Spacing per axis is extent/(vertices-1).
class Grid {
 public:
  static Grid line(double length, int vertices);
  static Grid rectangle(double length_x, double length_y, int vertices_x,
                        int vertices_y);

  int dimension() const { return dim_; }
  int vertices(int axis) const;
  double extent(int axis) const;
  double spacing(int axis) const;
  std::size_t total_vertices() const;
  double volume() const;

  // Linear index, x fastest.
  std::size_t index(int ix, int iy = 0) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx_) +
           static_cast<std::size_t>(ix);
  }
  std::array<double, 2> coords(std::size_t idx) const;

  bool operator==(const Grid&) const = default;

 private:
  Grid(int dim, double lx, double ly, int nx, int ny);

  int dim_;
  int nx_;
  int ny_;
  double lx_;
  double ly_;
};

// One scalar per grid vertex.
struct Field {
  Grid grid;
  std::vector<double> values;

  static Field zeros(const Grid& g);
  static Field constant(const Grid& g, double c);
  // 1D grids only.
  static Field from_function(const Grid& g,
                             const std::function<double(double)>& f);
  // Any dimension; y is 0 on 1D grids.
  static Field from_function(const Grid& g,
                             const std::function<double(double, double)>& f);

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

bool all_finite(const double* x, std::size_t n);
bool all_finite(const Field& f);

// Second-order 3-point (1D) / 5-point (2D) stencil with mirror ghosts.
Field laplacian_neumann(const Field& f);

// Max over vertices of the Euclidean norm of the centered-difference
// gradient; one-sided second-order stencils at boundary vertices.
double grad_sup_norm(const Field& f);

// Trapezoid quadrature; exact for affine fields.
double integrate(const Field& f);

// Per-vertex quadrature weights, so integrate(f) == dot(weights, values).
std::vector<double> trapezoid_weights(const Grid& g);

// CSV with header "x,value" (1D) or "x,y,value" (2D), rows in index
// order (x fastest). Values print as shortest round-trip decimals.
void write_field_csv(const Field& f, std::ostream& os);
Field read_field_csv(const Grid& g, std::istream& is);

}  // namespace motilab
