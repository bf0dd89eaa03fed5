#include "motilab/grid.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "motilab/format.hpp"
#include "motilab/kernels.hpp"

namespace motilab {

namespace {

void require_axis(int axis, int dim) {
  if (axis < 0 || axis >= dim) {
    throw std::out_of_range("grid axis " + std::to_string(axis) +
                            " out of range for dimension " +
                            std::to_string(dim));
  }
}

void require_finite(const Field& f, const char* op) {
  if (!all_finite(f)) {
    throw std::invalid_argument(std::string(op) +
                                ": field contains non-finite values");
  }
}

}  // namespace

Grid::Grid(int dim, double lx, double ly, int nx, int ny)
    : dim_(dim), nx_(nx), ny_(ny), lx_(lx), ly_(ly) {}

Grid Grid::line(double length, int vertices) {
  if (!(length > 0.0)) {
    throw std::invalid_argument("line grid needs length > 0");
  }
  if (vertices < 3) {
    throw std::invalid_argument("line grid needs at least 3 vertices");
  }
  return Grid(1, length, 0.0, vertices, 1);
}

Grid Grid::rectangle(double length_x, double length_y, int vertices_x,
                     int vertices_y) {
  if (!(length_x > 0.0) || !(length_y > 0.0)) {
    throw std::invalid_argument("rectangle grid needs positive extents");
  }
  if (vertices_x < 3 || vertices_y < 3) {
    throw std::invalid_argument(
        "rectangle grid needs at least 3 vertices per axis");
  }
  return Grid(2, length_x, length_y, vertices_x, vertices_y);
}

int Grid::vertices(int axis) const {
  require_axis(axis, dim_);
  return axis == 0 ? nx_ : ny_;
}

double Grid::extent(int axis) const {
  require_axis(axis, dim_);
  return axis == 0 ? lx_ : ly_;
}

double Grid::spacing(int axis) const {
  return extent(axis) / static_cast<double>(vertices(axis) - 1);
}

std::size_t Grid::total_vertices() const {
  return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_);
}

double Grid::volume() const { return dim_ == 1 ? lx_ : lx_ * ly_; }

std::array<double, 2> Grid::coords(std::size_t idx) const {
  std::size_t ix = idx % static_cast<std::size_t>(nx_);
  std::size_t iy = idx / static_cast<std::size_t>(nx_);
  double x = static_cast<double>(ix) * spacing(0);
  double y = dim_ == 2 ? static_cast<double>(iy) * spacing(1) : 0.0;
  return {x, y};
}

Field Field::zeros(const Grid& g) {
  return Field{g, std::vector<double>(g.total_vertices(), 0.0)};
}

Field Field::constant(const Grid& g, double c) {
  return Field{g, std::vector<double>(g.total_vertices(), c)};
}

Field Field::from_function(const Grid& g,
                           const std::function<double(double)>& f) {
  if (g.dimension() != 1) {
    throw std::invalid_argument(
        "one-argument from_function requires a 1D grid");
  }
  Field out = zeros(g);
  double h = g.spacing(0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values[i] = f(static_cast<double>(i) * h);
  }
  return out;
}

Field Field::from_function(const Grid& g,
                           const std::function<double(double, double)>& f) {
  Field out = zeros(g);
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto [x, y] = g.coords(i);
    out.values[i] = f(x, y);
  }
  return out;
}

bool all_finite(const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i])) return false;
  }
  return true;
}

bool all_finite(const Field& f) {
  return all_finite(f.values.data(), f.size());
}

Field laplacian_neumann(const Field& f) {
  require_finite(f, "laplacian_neumann");
  Field out = Field::zeros(f.grid);
  const auto& k = kernels::ops();
  if (f.grid.dimension() == 1) {
    double h = f.grid.spacing(0);
    k.laplacian1d(out.values.data(), f.values.data(), 1.0 / (h * h), f.size());
  } else {
    double hx = f.grid.spacing(0);
    double hy = f.grid.spacing(1);
    k.laplacian2d(out.values.data(), f.values.data(),
                  static_cast<std::size_t>(f.grid.vertices(0)),
                  static_cast<std::size_t>(f.grid.vertices(1)),
                  1.0 / (hx * hx), 1.0 / (hy * hy));
  }
  return out;
}

double grad_sup_norm(const Field& f) {
  require_finite(f, "grad_sup_norm");
  const auto& k = kernels::ops();
  if (f.grid.dimension() == 1) {
    double h = f.grid.spacing(0);
    return k.grad_sup_1d(f.values.data(), 1.0 / (2.0 * h), f.size());
  }
  double hx = f.grid.spacing(0);
  double hy = f.grid.spacing(1);
  return k.grad_sup_2d(f.values.data(),
                       static_cast<std::size_t>(f.grid.vertices(0)),
                       static_cast<std::size_t>(f.grid.vertices(1)),
                       1.0 / (2.0 * hx), 1.0 / (2.0 * hy));
}

std::vector<double> trapezoid_weights(const Grid& g) {
  auto axis_weights = [&g](int axis) {
    int n = g.vertices(axis);
    double h = g.spacing(axis);
    std::vector<double> w(static_cast<std::size_t>(n), h);
    w.front() = 0.5 * h;
    w.back() = 0.5 * h;
    return w;
  };
  std::vector<double> wx = axis_weights(0);
  if (g.dimension() == 1) return wx;
  std::vector<double> wy = axis_weights(1);
  std::vector<double> w(g.total_vertices());
  for (std::size_t j = 0; j < wy.size(); ++j) {
    for (std::size_t i = 0; i < wx.size(); ++i) {
      w[j * wx.size() + i] = wx[i] * wy[j];
    }
  }
  return w;
}

double integrate(const Field& f) {
  require_finite(f, "integrate");
  std::vector<double> w = trapezoid_weights(f.grid);
  return kernels::ops().dot(w.data(), f.values.data(), f.size());
}

void write_field_csv(const Field& f, std::ostream& os) {
  std::string line;
  line.reserve(64);
  const bool two_d = f.grid.dimension() == 2;
  os << (two_d ? "x,y,value\n" : "x,value\n");
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto [x, y] = f.grid.coords(i);
    line.clear();
    append_double(line, x);
    line.push_back(',');
    if (two_d) {
      append_double(line, y);
      line.push_back(',');
    }
    append_double(line, f.values[i]);
    line.push_back('\n');
    os << line;
  }
}

Field read_field_csv(const Grid& g, std::istream& is) {
  auto next_line = [&is](std::string& line) {
    if (!std::getline(is, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  std::string line;
  const std::string want = g.dimension() == 2 ? "x,y,value" : "x,value";
  if (!next_line(line) || line != want) {
    throw std::runtime_error("field CSV: expected header '" + want + "'");
  }

  Field out = Field::zeros(g);
  const std::size_t fields_per_row = g.dimension() == 2 ? 3 : 2;
  std::size_t row = 0;
  while (next_line(line)) {
    if (line.empty()) continue;
    if (row >= out.size()) {
      throw std::runtime_error("field CSV: more rows than grid vertices");
    }
    std::size_t begin = 0, seen = 0;
    double value = 0.0;
    for (std::size_t pos = 0; pos <= line.size(); ++pos) {
      if (pos == line.size() || line[pos] == ',') {
        double v = parse_double(
            std::string_view(line).substr(begin, pos - begin));
        if (++seen == fields_per_row) value = v;
        begin = pos + 1;
      }
    }
    if (seen != fields_per_row) {
      throw std::runtime_error("field CSV: row " + std::to_string(row + 2) +
                               " has " + std::to_string(seen) +
                               " fields, expected " +
                               std::to_string(fields_per_row));
    }
    out.values[row++] = value;
  }
  if (row != out.size()) {
    throw std::runtime_error("field CSV: got " + std::to_string(row) +
                             " rows, expected " + std::to_string(out.size()));
  }
  return out;
}

}  // namespace motilab
