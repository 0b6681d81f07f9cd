#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pbcover {

/// Raised for violated preconditions of any operation in this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

enum class SurfaceKind { Plane, Torus, Sphere };

std::string to_string(SurfaceKind kind);
SurfaceKind surface_kind_from_string(const std::string& name);

struct GridSpec {
  int nx = 0;
  int ny = 0;
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// A closed surface (or a plane window) presented in one Darboux chart, so
/// the area form is dx^dy and the Poisson bracket takes the flat form.
///
/// Periodic axes sample the half-open interval [x0, x1) with spacing
/// (x1-x0)/n; non-periodic axes sample the closed interval with spacing
/// (x1-x0)/(n-1).  On the sphere x is the azimuth theta in [0, 2pi) and y is
/// the height z in [-A/(4pi), A/(4pi)].
class ChartedSurface {
 public:
  ChartedSurface() = default;

  SurfaceKind kind() const { return kind_; }
  double area() const { return area_; }
  const GridSpec& grid() const { return grid_; }
  int nx() const { return grid_.nx; }
  int ny() const { return grid_.ny; }
  std::size_t size() const {
    return static_cast<std::size_t>(grid_.nx) * static_cast<std::size_t>(grid_.ny);
  }

  double x0() const { return x0_; }
  double x1() const { return x1_; }
  double y0() const { return y0_; }
  double y1() const { return y1_; }
  double width() const { return x1_ - x0_; }
  double height() const { return y1_ - y0_; }
  bool periodic_x() const { return periodic_x_; }
  bool periodic_y() const { return periodic_y_; }

  double hx() const;
  double hy() const;
  double x(int i) const { return x0_ + i * hx(); }
  double y(int j) const { return y0_ + j * hy(); }
  Point2 point(int i, int j) const { return {x(i), y(j)}; }
  Point2 point(std::size_t flat) const;
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(grid_.nx) +
           static_cast<std::size_t>(i);
  }

  /// Quadrature weight of a grid sample (rectangle rule on periodic axes,
  /// trapezoid end weights on closed axes).
  double cell_weight(int i, int j) const;

  /// Half-width of the polar exclusion band in chart units (sphere only).
  double pole_band() const { return pole_band_; }
  /// True for sphere samples whose height lies within pole_band() of a pole.
  bool in_polar_band(int j) const;
  /// Rows reached by a finite-difference stencil of half-width `reach` from a
  /// polar-band row.
  bool near_polar_band(int j, int reach) const;

  /// Shortest chart displacement b - a, respecting periodic axes.
  Point2 displacement(Point2 a, Point2 b) const;
  /// Reduces a chart point into the fundamental domain of periodic axes.
  Point2 wrap(Point2 p) const;

  friend bool operator==(const ChartedSurface&, const ChartedSurface&) = default;

 private:
  friend ChartedSurface make_surface(SurfaceKind, double, GridSpec, double);

  SurfaceKind kind_ = SurfaceKind::Plane;
  GridSpec grid_{};
  double area_ = 0.0;
  double x0_ = 0.0, x1_ = 0.0, y0_ = 0.0, y1_ = 0.0;
  bool periodic_x_ = false;
  bool periodic_y_ = false;
  double pole_band_ = 0.0;
};

inline constexpr int kMinGridPoints = 8;
inline constexpr int kDefaultPoleBandCells = 4;

/// Builds a chart of total area `area`.  Plane and torus charts are the
/// square [0, sqrt(A)]^2.  For the sphere `pole_band` is the polar exclusion
/// half-width in height units; a non-positive value selects the default of
/// kDefaultPoleBandCells grid rows.
ChartedSurface make_surface(SurfaceKind kind, double area, GridSpec grid,
                            double pole_band = 0.0);

/// Grid samples of a real function on a charted surface, row-major (x fastest).
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const ChartedSurface& surface, double value = 0.0);
  ScalarField(const ChartedSurface& surface, std::vector<double> samples);

  template <class Fn>
  static ScalarField sample(const ChartedSurface& surface, Fn&& fn) {
    ScalarField f(surface);
    for (int j = 0; j < surface.ny(); ++j)
      for (int i = 0; i < surface.nx(); ++i)
        f.values_[surface.index(i, j)] = fn(surface.x(i), surface.y(j));
    return f;
  }

  const ChartedSurface& surface() const { return surface_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double at(int i, int j) const { return values_[surface_.index(i, j)]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  bool all_finite() const;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double s);
  /// this += s * other
  ScalarField& axpy(double s, const ScalarField& other);

  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator*(double s, ScalarField a) { return a *= s; }
  /// Samplewise product.
  friend ScalarField operator*(const ScalarField& a, const ScalarField& b);

 private:
  ChartedSurface surface_;
  std::vector<double> values_;
};

void require_same_grid(const ScalarField& f, const ScalarField& g);

/// Finite-difference partial derivatives of a field on its chart.
struct Gradient {
  std::vector<double> dx;
  std::vector<double> dy;
};

enum class PolarPolicy {
  /// Throw when both fields vary inside a polar band (the masked bracket
  /// would then be wrong there).
  Strict,
  /// Mask silently; the bracket is reported as zero inside the band.
  Mask,
};

struct BracketOptions {
  int order = 2;  ///< 2 or 4
  PolarPolicy polar = PolarPolicy::Strict;
  /// Partition brackets only: take the last member's weighted gradient as
  /// minus the sum of the others (the derivative of sum_k w_k F_k = 1)
  /// instead of its own stencil.  Two-set brackets then vanish exactly.
  bool eliminate_last = true;
};

/// Central differences with periodic wrap; one-sided stencils of the same
/// order at the ends of closed axes.  On the sphere the derivatives are
/// zeroed inside the polar band.
Gradient gradient(const ScalarField& f, int order = 2);

/// True when the field is constant on every polar band (plus stencil reach).
/// Always true off the sphere.
bool constant_on_polar_bands(const ScalarField& f, int order = 2);

/// {f, g} = f_x g_y - f_y g_x on the grid.
ScalarField poisson_bracket(const ScalarField& f, const ScalarField& g,
                            const BracketOptions& options = {});

double sup_norm(const ScalarField& f);
double sup_norm(std::span<const double> values);

/// Quadrature of f against the area form.
double integrate(const ScalarField& f);

/// Hofer displacement energy of a round cap on a sphere of area `area`:
/// the cap area below half the total area, infinite otherwise.
double displacement_energy_cap(double cap_area, double area);

/// Field dumps.  CSV: comment header with nx, ny and the chart rectangle,
/// then a header row `i,j,x,y,value` and nx*ny rows in row-major order.
/// Binary: magic "PBFD", version u32, nx i32, ny i32, x0 x1 y0 y1 f64,
/// then nx*ny f64 samples in row-major order (little endian host layout).
void write_field_csv(std::ostream& out, const ScalarField& f);
void write_field_binary(std::ostream& out, const ScalarField& f);
/// Reads samples back into a field on `surface`; the stored grid and chart
/// rectangle must match.
ScalarField read_field_binary(std::istream& in, const ChartedSurface& surface);

}  // namespace pbcover
