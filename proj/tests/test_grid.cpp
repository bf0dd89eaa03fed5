#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "motilab/grid.hpp"

using namespace motilab;

namespace {

constexpr double kPi = 3.14159265358979323846;

Field smooth_random(const Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  if (g.dimension() == 1) {
    std::vector<double> a(9);
    for (auto& c : a) c = coef(rng);
    double len = g.extent(0);
    return Field::from_function(g, [&a, len](double x) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        s += a[k] * std::cos(double(k) * kPi * x / len);
      }
      return s;
    });
  }
  std::vector<double> a(25);
  for (auto& c : a) c = coef(rng);
  double lx = g.extent(0), ly = g.extent(1);
  return Field::from_function(g, [&a, lx, ly](double x, double y) {
    double s = 0.0;
    for (int k = 0; k < 5; ++k) {
      for (int l = 0; l < 5; ++l) {
        s += a[std::size_t(5 * k + l)] * std::cos(k * kPi * x / lx) *
             std::cos(l * kPi * y / ly);
      }
    }
    return s;
  });
}

Field white_noise(const Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Field f = Field::zeros(g);
  for (auto& v : f.values) v = dist(rng);
  return f;
}

double weighted_product_integral(const Field& a, const Field& b) {
  Field prod = a;
  for (std::size_t i = 0; i < prod.size(); ++i) prod.values[i] *= b.values[i];
  return integrate(prod);
}

double sup_abs(const Field& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace

TEST_CASE("grid factories fill spacing, volume, and bounds") {
  Grid g1 = Grid::line(1.0, 201);
  CHECK(g1.dimension() == 1);
  CHECK(g1.vertices(0) == 201);
  CHECK(g1.spacing(0) == doctest::Approx(1.0 / 200.0).epsilon(1e-15));
  CHECK(g1.volume() == 1.0);
  CHECK(g1.total_vertices() == 201);

  Grid g2 = Grid::rectangle(2.0, 0.5, 11, 21);
  CHECK(g2.dimension() == 2);
  CHECK(g2.spacing(0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(g2.spacing(1) == doctest::Approx(0.025).epsilon(1e-15));
  CHECK(g2.volume() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g2.total_vertices() == 231);

  CHECK_THROWS_AS(Grid::line(0.0, 11), std::invalid_argument);
  CHECK_THROWS_AS(Grid::line(1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(Grid::rectangle(1.0, -1.0, 5, 5), std::invalid_argument);
  CHECK_THROWS_AS(Grid::rectangle(1.0, 1.0, 5, 2), std::invalid_argument);
  CHECK_THROWS_AS(g1.vertices(1), std::out_of_range);
}

TEST_CASE("index and coords agree") {
  Grid g = Grid::rectangle(1.0, 2.0, 5, 7);
  for (int iy = 0; iy < 7; ++iy) {
    for (int ix = 0; ix < 5; ++ix) {
      auto [x, y] = g.coords(g.index(ix, iy));
      CHECK(x == doctest::Approx(0.25 * ix).epsilon(1e-15));
      CHECK(y == doctest::Approx(2.0 / 6.0 * iy).epsilon(1e-14));
    }
  }
}

TEST_CASE("laplacian annihilates constants exactly") {
  for (const Grid& g : {Grid::line(1.0, 11), Grid::line(3.0, 64),
                        Grid::rectangle(1.0, 1.0, 9, 13)}) {
    Field lap = laplacian_neumann(Field::constant(g, 7.0));
    for (double v : lap.values) CHECK(v == 0.0);
  }
}

TEST_CASE("laplacian of cos(pi x) is second-order accurate") {
  auto worst = [](int n) {
    Grid g = Grid::line(1.0, n);
    Field f = Field::from_function(g, [](double x) { return std::cos(kPi * x); });
    Field lap = laplacian_neumann(f);
    double err = 0.0;
    for (std::size_t i = 0; i < lap.size(); ++i) {
      double x = double(i) * g.spacing(0);
      err = std::max(err, std::fabs(lap.values[i] + kPi * kPi * std::cos(kPi * x)));
    }
    return err;
  };
  double e1 = worst(201);
  double e2 = worst(401);
  CHECK(e1 <= 1e-3);
  CHECK(e1 / e2 >= 3.5);
  CHECK(e1 / e2 <= 4.5);
}

TEST_CASE("2D laplacian of a cosine product is second-order accurate") {
  auto worst = [](int n) {
    Grid g = Grid::rectangle(1.0, 1.0, n, n);
    Field f = Field::from_function(g, [](double x, double y) {
      return std::cos(kPi * x) * std::cos(kPi * y);
    });
    Field lap = laplacian_neumann(f);
    double err = 0.0;
    for (std::size_t i = 0; i < lap.size(); ++i) {
      err = std::max(err,
                     std::fabs(lap.values[i] + 2.0 * kPi * kPi * f.values[i]));
    }
    return err;
  };
  double e1 = worst(33);
  double e2 = worst(65);
  CHECK(e1 <= 2e-2);
  CHECK(e1 / e2 >= 3.5);
  CHECK(e1 / e2 <= 4.5);
}

TEST_CASE("laplacian is symmetric under the trapezoid inner product") {
  auto check_pair = [](const Field& f, const Field& g) {
    double lhs = weighted_product_integral(g, laplacian_neumann(f));
    double rhs = weighted_product_integral(f, laplacian_neumann(g));
    double scale = std::max(1.0, sup_abs(f) * sup_abs(g));
    CHECK(std::fabs(lhs - rhs) <= 1e-10 * scale);
  };
  check_pair(smooth_random(Grid::line(1.0, 201), 11),
             smooth_random(Grid::line(1.0, 201), 12));
  check_pair(smooth_random(Grid::rectangle(1.0, 0.5, 33, 17), 13),
             smooth_random(Grid::rectangle(1.0, 0.5, 33, 17), 14));
  check_pair(white_noise(Grid::line(1.0, 21), 15),
             white_noise(Grid::line(1.0, 21), 16));
  check_pair(white_noise(Grid::rectangle(1.0, 1.0, 7, 9), 17),
             white_noise(Grid::rectangle(1.0, 1.0, 7, 9), 18));
}

TEST_CASE("integral of the laplacian vanishes (zero-flux divergence)") {
  for (unsigned seed : {21u, 22u, 23u}) {
    for (const Grid& g : {Grid::line(1.0, 201), Grid::line(2.0, 101)}) {
      Field f = smooth_random(g, seed);
      CHECK(std::fabs(integrate(laplacian_neumann(f))) <=
            1e-10 * std::max(1.0, sup_abs(f)));
    }
    Grid g2 = Grid::rectangle(1.0, 1.0, 17, 17);
    Field f2 = smooth_random(g2, seed);
    CHECK(std::fabs(integrate(laplacian_neumann(f2))) <=
          1e-10 * std::max(1.0, sup_abs(f2)));
    Grid gc = Grid::line(1.0, 21);
    Field fc = white_noise(gc, seed);
    CHECK(std::fabs(integrate(laplacian_neumann(fc))) <= 1e-10);
  }
}

TEST_CASE("gradient sup norm on reference fields") {
  Grid g = Grid::line(1.0, 201);
  CHECK(grad_sup_norm(Field::constant(g, 4.2)) == 0.0);

  Field lin = Field::from_function(g, [](double x) { return 3.0 * x; });
  CHECK(grad_sup_norm(lin) == doctest::Approx(3.0).epsilon(1e-12));

  Field cosx = Field::from_function(g, [](double x) { return std::cos(kPi * x); });
  CHECK(std::fabs(grad_sup_norm(cosx) - kPi) <= 1e-3);

  Grid g2 = Grid::rectangle(1.0, 1.0, 21, 31);
  Field plane = Field::from_function(
      g2, [](double x, double y) { return 3.0 * x + 4.0 * y; });
  CHECK(grad_sup_norm(plane) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(grad_sup_norm(Field::constant(g2, -1.0)) == 0.0);
}

TEST_CASE("trapezoid integration on reference fields") {
  Grid g = Grid::line(1.0, 201);
  CHECK(integrate(Field::constant(g, 2.5)) ==
        doctest::Approx(2.5).epsilon(1e-14));

  Field lin = Field::from_function(g, [](double x) { return x; });
  CHECK(std::fabs(integrate(lin) - 0.5) <= 1e-12);

  Field cosx = Field::from_function(g, [](double x) { return std::cos(kPi * x); });
  CHECK(std::fabs(integrate(cosx)) <= 1e-4);

  Grid g2 = Grid::rectangle(2.0, 0.5, 11, 17);
  CHECK(integrate(Field::constant(g2, 3.0)) ==
        doctest::Approx(3.0).epsilon(1e-14));
  Field plane = Field::from_function(
      g2, [](double x, double y) { return x + y; });
  CHECK(std::fabs(integrate(plane) - (1.0 * 2.0 * 0.5 + 0.25 * 2.0 * 0.5)) <=
        1e-12);

  auto w = trapezoid_weights(g2);
  double total = 0.0;
  for (double wi : w) total += wi;
  CHECK(total == doctest::Approx(g2.volume()).epsilon(1e-13));
}

TEST_CASE("field CSV round-trips bit-exactly") {
  Grid g = Grid::line(1.0, 17);
  Field f = smooth_random(g, 31);
  std::stringstream ss;
  write_field_csv(f, ss);
  std::string text = ss.str();
  CHECK(text.substr(0, 8) == "x,value\n");
  std::stringstream in(text);
  Field back = read_field_csv(g, in);
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(back.values[i] == f.values[i]);
  }

  Grid g2 = Grid::rectangle(1.0, 2.0, 5, 7);
  Field f2 = Field::from_function(
      g2, [](double x, double y) { return x + 10.0 * y; });
  std::stringstream s2;
  write_field_csv(f2, s2);
  std::string t2 = s2.str();
  CHECK(t2.substr(0, 10) == "x,y,value\n");
  {
    // Rows run x-fastest: the second row moves x, not y.
    std::stringstream probe(t2);
    std::string header, row0, row1;
    std::getline(probe, header);
    std::getline(probe, row0);
    std::getline(probe, row1);
    CHECK(row0 == "0,0,0");
    CHECK(row1 == "0.25,0,0.25");
  }
  std::stringstream in2(t2);
  Field back2 = read_field_csv(g2, in2);
  for (std::size_t i = 0; i < f2.size(); ++i) {
    CHECK(back2.values[i] == f2.values[i]);
  }
}

TEST_CASE("field CSV reader rejects malformed input") {
  Grid g = Grid::line(1.0, 3);
  {
    std::stringstream in("value,x\n0,1\n0.5,2\n1,3\n");
    CHECK_THROWS_AS(read_field_csv(g, in), std::runtime_error);
  }
  {
    std::stringstream in("x,value\n0,1\n0.5,oops\n1,3\n");
    CHECK_THROWS_AS(read_field_csv(g, in), std::invalid_argument);
  }
  {
    std::stringstream in("x,value\n0,1\n0.5,2\n");
    CHECK_THROWS_AS(read_field_csv(g, in), std::runtime_error);
  }
  {
    std::stringstream in("x,value\n0,1\n0.5,2\n1,3\n1.5,4\n");
    CHECK_THROWS_AS(read_field_csv(g, in), std::runtime_error);
  }
  {
    std::stringstream in("x,value\n0,1,9\n0.5,2,9\n1,3,9\n");
    CHECK_THROWS_AS(read_field_csv(g, in), std::runtime_error);
  }
}

TEST_CASE("operations reject non-finite fields") {
  Grid g = Grid::line(1.0, 11);
  Field f = Field::constant(g, 1.0);
  f.values[5] = std::nan("");
  CHECK(!all_finite(f));
  CHECK_THROWS_AS(laplacian_neumann(f), std::invalid_argument);
  CHECK_THROWS_AS(grad_sup_norm(f), std::invalid_argument);
  CHECK_THROWS_AS(integrate(f), std::invalid_argument);
  f.values[5] = std::numeric_limits<double>::infinity();
  CHECK(!all_finite(f));
  Field ok = Field::constant(g, 1.0);
  CHECK(all_finite(ok));
}
