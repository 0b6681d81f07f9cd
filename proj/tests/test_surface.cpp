#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pbcover/surface.hpp"

using namespace pbcover;
using std::numbers::pi;

TEST_CASE("make_surface charts") {
  const auto torus = make_surface(SurfaceKind::Torus, 1.0, {128, 128});
  CHECK(torus.x0() == 0.0);
  CHECK(torus.x1() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(torus.y1() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(torus.periodic_x());
  CHECK(torus.periodic_y());

  const auto sphere = make_surface(SurfaceKind::Sphere, 4 * pi, {256, 128});
  CHECK(sphere.y0() == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(sphere.y1() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sphere.x1() == doctest::Approx(2 * pi).epsilon(1e-15));
  CHECK(sphere.periodic_x());
  CHECK_FALSE(sphere.periodic_y());
  CHECK(sphere.width() * sphere.height() == doctest::Approx(4 * pi).epsilon(1e-14));
  CHECK(sphere.pole_band() == doctest::Approx(4 * sphere.hy()));

  const auto plane = make_surface(SurfaceKind::Plane, 1.0, {64, 64});
  CHECK(plane.x1() == doctest::Approx(1.0));
  CHECK_FALSE(plane.periodic_x());
  CHECK_FALSE(plane.periodic_y());
  CHECK(plane.hx() == doctest::Approx(1.0 / 63));
}

TEST_CASE("make_surface errors") {
  CHECK_THROWS_AS(make_surface(SurfaceKind::Torus, 0.0, {64, 64}), Error);
  CHECK_THROWS_AS(make_surface(SurfaceKind::Torus, -1.0, {64, 64}), Error);
  CHECK_THROWS_AS(make_surface(SurfaceKind::Torus, 1.0, {4, 64}), Error);
  CHECK_THROWS_AS(make_surface(SurfaceKind::Sphere, 4 * pi, {64, 64}, 0.6), Error);
  CHECK_THROWS_AS(surface_kind_from_string("klein"), Error);
  CHECK(surface_kind_from_string("sphere") == SurfaceKind::Sphere);
}

TEST_CASE("bracket of coordinates is one") {
  const auto plane = make_surface(SurfaceKind::Plane, 1.0, {64, 64});
  const auto x = ScalarField::sample(plane, [](double a, double) { return a; });
  const auto y = ScalarField::sample(plane, [](double, double b) { return b; });
  for (int order : {2, 4}) {
    const auto b = poisson_bracket(x, y, {.order = order});
    CHECK(sup_norm(b - ScalarField(plane, 1.0)) < 1e-10);
  }
}

TEST_CASE("bracket antisymmetry and self bracket") {
  const auto torus = make_surface(SurfaceKind::Torus, 1.0, {64, 64});
  const auto f = ScalarField::sample(torus, [](double x, double y) {
    return std::sin(2 * pi * x) * std::cos(4 * pi * y);
  });
  const auto g = ScalarField::sample(torus, [](double x, double y) {
    return std::cos(2 * pi * (x + y));
  });
  CHECK(sup_norm(poisson_bracket(f, f)) == 0.0);
  CHECK(sup_norm(poisson_bracket(f, g) + poisson_bracket(g, f)) <= 1e-12);
  const auto lhs = poisson_bracket(2.0 * f + g, g);
  const auto rhs = 2.0 * poisson_bracket(f, g);
  CHECK(sup_norm(lhs - rhs) <= 1e-12 * sup_norm(rhs));
}

TEST_CASE("torus bracket converges at second order") {
  auto error_at = [](int n, int order) {
    const auto torus = make_surface(SurfaceKind::Torus, 1.0, {n, n});
    const auto f = ScalarField::sample(torus, [](double x, double) { return std::sin(2 * pi * x); });
    const auto g = ScalarField::sample(torus, [](double, double y) { return std::sin(2 * pi * y); });
    const auto exact = ScalarField::sample(torus, [](double x, double y) {
      return 4 * pi * pi * std::cos(2 * pi * x) * std::cos(2 * pi * y);
    });
    return sup_norm(poisson_bracket(f, g, {.order = order}) - exact);
  };
  const double e64 = error_at(64, 2);
  const double e128 = error_at(128, 2);
  CHECK(e64 < 4 * pi * pi * 4 * pi * pi / 3 / (64.0 * 64.0));
  CHECK(e64 / e128 == doctest::Approx(4.0).epsilon(0.02));
  CHECK(error_at(64, 4) / error_at(128, 4) == doctest::Approx(16.0).epsilon(0.05));
}

TEST_CASE("Leibniz rule holds to discretization error") {
  auto defect = [](int n) {
    const auto torus = make_surface(SurfaceKind::Torus, 1.0, {n, n});
    const auto f = ScalarField::sample(torus, [](double x, double y) { return std::sin(2 * pi * (x + 2 * y)); });
    const auto g = ScalarField::sample(torus, [](double x, double) { return std::cos(2 * pi * x); });
    const auto h = ScalarField::sample(torus, [](double x, double y) { return std::sin(2 * pi * (x + y)); });
    return sup_norm(poisson_bracket(f, g * h) - g * poisson_bracket(f, h) - h * poisson_bracket(f, g));
  };
  CHECK(defect(64) / defect(128) == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("bracket grid mismatch") {
  const auto a = make_surface(SurfaceKind::Torus, 1.0, {32, 32});
  const auto b = make_surface(SurfaceKind::Torus, 1.0, {64, 64});
  CHECK_THROWS_AS(poisson_bracket(ScalarField(a), ScalarField(b)), Error);
}

TEST_CASE("sphere polar band policy") {
  const auto s = make_surface(SurfaceKind::Sphere, 4 * pi, {64, 64});
  const auto f = ScalarField::sample(s, [](double th, double z) { return std::cos(th) * (1 - z * z); });
  const auto g = ScalarField::sample(s, [](double th, double) { return std::sin(th); });
  CHECK_THROWS_AS(poisson_bracket(f, g), Error);
  const auto masked = poisson_bracket(f, g, {.polar = PolarPolicy::Mask});
  for (int i = 0; i < s.nx(); ++i) {
    CHECK(masked.at(i, 0) == 0.0);
    CHECK(masked.at(i, s.ny() - 1) == 0.0);
  }
  const auto z = ScalarField::sample(s, [](double, double zz) { return zz; });
  CHECK_FALSE(constant_on_polar_bands(z));
  const auto th = ScalarField::sample(s, [](double t, double zz) {
    return std::abs(zz) < 0.5 ? std::cos(t) * std::pow(std::cos(pi * zz), 4) : 0.0;
  });
  CHECK(constant_on_polar_bands(th));
  CHECK_NOTHROW(poisson_bracket(th, z));
}

TEST_CASE("sup_norm") {
  const auto torus = make_surface(SurfaceKind::Torus, 1.0, {128, 128});
  CHECK(sup_norm(ScalarField(torus, 1.0)) == 1.0);
  CHECK(sup_norm(ScalarField(torus)) == 0.0);
  const auto f = ScalarField::sample(torus, [](double x, double) { return std::sin(2 * pi * x); });
  CHECK(sup_norm(f) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("integrate") {
  const auto torus = make_surface(SurfaceKind::Torus, 1.0, {64, 64});
  CHECK(integrate(ScalarField(torus, 1.0)) == 1.0);
  CHECK(integrate(ScalarField(torus)) == 0.0);
  const auto sphere = make_surface(SurfaceKind::Sphere, 4 * pi, {64, 33});
  CHECK(integrate(ScalarField(sphere, 1.0)) == doctest::Approx(4 * pi).epsilon(1e-14));

  // Gaussian-free compact bump (1 - r^2/R^2)^2 on r < R has mass pi R^2 / 3.
  const double R = 0.3;
  auto mass = [&](int n) {
    const auto t = make_surface(SurfaceKind::Torus, 1.0, {n, n});
    const auto b = ScalarField::sample(t, [&](double x, double y) {
      const double s = ((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5)) / (R * R);
      return s < 1 ? (1 - s) * (1 - s) : 0.0;
    });
    return integrate(b);
  };
  CHECK(mass(128) == doctest::Approx(pi * R * R / 3).epsilon(1e-3));

  const auto f = ScalarField::sample(torus, [&](double x, double y) {
    const double s = ((x - 0.5) * (x - 0.5) + (y - 0.4) * (y - 0.4)) / (R * R);
    return s < 1 ? std::pow(1 - s, 3) * x : 0.0;
  });
  const auto g = ScalarField::sample(torus, [&](double x, double y) {
    const double s = ((x - 0.45) * (x - 0.45) + (y - 0.5) * (y - 0.5)) / (R * R);
    return s < 1 ? std::pow(1 - s, 3) * y : 0.0;
  });
  CHECK(std::abs(integrate(poisson_bracket(f, g))) < 1e-10);
}

TEST_CASE("displacement energy of caps") {
  CHECK(displacement_energy_cap(pi, 4 * pi) == pi);
  CHECK(std::isinf(displacement_energy_cap(3 * pi, 4 * pi)));
  CHECK(displacement_energy_cap(2 * pi - 1e-9, 4 * pi) == 2 * pi - 1e-9);
  CHECK_THROWS_AS(displacement_energy_cap(0.0, 4 * pi), Error);
  CHECK_THROWS_AS(displacement_energy_cap(4 * pi, 4 * pi), Error);
}

TEST_CASE("field dumps round trip") {
  const auto torus = make_surface(SurfaceKind::Torus, 1.0, {16, 16});
  const auto f = ScalarField::sample(torus, [](double x, double y) { return x - 2 * y; });
  std::stringstream bin;
  write_field_binary(bin, f);
  const auto back = read_field_binary(bin, torus);
  CHECK(sup_norm(back - f) == 0.0);

  std::stringstream bad;
  write_field_binary(bad, f);
  CHECK_THROWS_AS(read_field_binary(bad, make_surface(SurfaceKind::Torus, 1.0, {32, 32})), Error);

  std::ostringstream csv;
  write_field_csv(csv, f);
  const std::string text = csv.str();
  CHECK(text.find("i,j,x,y,value") != std::string::npos);
  std::size_t lines = 0;
  for (char ch : text) lines += ch == '\n';
  CHECK(lines >= 16 * 16 + 1);
}

TEST_CASE("non-finite samples rejected") {
  const auto torus = make_surface(SurfaceKind::Torus, 1.0, {8, 8});
  std::vector<double> v(64, 0.0);
  v[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ScalarField(torus, v), Error);
}
