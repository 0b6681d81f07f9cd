#include "pbcover/surface.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>

namespace pbcover {

std::string to_string(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::Plane: return "plane";
    case SurfaceKind::Torus: return "torus";
    case SurfaceKind::Sphere: return "sphere";
  }
  return "unknown";
}

SurfaceKind surface_kind_from_string(const std::string& name) {
  if (name == "plane") return SurfaceKind::Plane;
  if (name == "torus") return SurfaceKind::Torus;
  if (name == "sphere") return SurfaceKind::Sphere;
  throw Error("unknown surface kind '" + name + "'");
}

double ChartedSurface::hx() const {
  return periodic_x_ ? width() / grid_.nx : width() / (grid_.nx - 1);
}

double ChartedSurface::hy() const {
  return periodic_y_ ? height() / grid_.ny : height() / (grid_.ny - 1);
}

Point2 ChartedSurface::point(std::size_t flat) const {
  const auto nx = static_cast<std::size_t>(grid_.nx);
  return point(static_cast<int>(flat % nx), static_cast<int>(flat / nx));
}

double ChartedSurface::cell_weight(int i, int j) const {
  double wx = hx();
  double wy = hy();
  if (!periodic_x_ && (i == 0 || i == grid_.nx - 1)) wx *= 0.5;
  if (!periodic_y_ && (j == 0 || j == grid_.ny - 1)) wy *= 0.5;
  return wx * wy;
}

bool ChartedSurface::in_polar_band(int j) const {
  if (kind_ != SurfaceKind::Sphere) return false;
  const double slack = 1e-9 * hy();
  const double z = y(j);
  return z - y0_ <= pole_band_ + slack || y1_ - z <= pole_band_ + slack;
}

bool ChartedSurface::near_polar_band(int j, int reach) const {
  if (kind_ != SurfaceKind::Sphere) return false;
  for (int k = std::max(0, j - reach); k <= std::min(grid_.ny - 1, j + reach); ++k)
    if (in_polar_band(k)) return true;
  return false;
}

namespace {

double wrap_delta(double d, double period) {
  d = std::fmod(d, period);
  if (d >= 0.5 * period) d -= period;
  if (d < -0.5 * period) d += period;
  return d;
}

double wrap_coord(double v, double lo, double period) {
  double r = std::fmod(v - lo, period);
  if (r < 0) r += period;
  if (r >= period) r -= period;
  return lo + r;
}

}  // namespace

Point2 ChartedSurface::displacement(Point2 a, Point2 b) const {
  Point2 d{b.x - a.x, b.y - a.y};
  if (periodic_x_) d.x = wrap_delta(d.x, width());
  if (periodic_y_) d.y = wrap_delta(d.y, height());
  return d;
}

Point2 ChartedSurface::wrap(Point2 p) const {
  if (periodic_x_) p.x = wrap_coord(p.x, x0_, width());
  if (periodic_y_) p.y = wrap_coord(p.y, y0_, height());
  return p;
}

ChartedSurface make_surface(SurfaceKind kind, double area, GridSpec grid, double pole_band) {
  if (!(area > 0.0) || !std::isfinite(area)) throw Error("surface area must be positive");
  if (grid.nx < kMinGridPoints || grid.ny < kMinGridPoints)
    throw Error("grid too coarse: need at least 8 points per axis");

  ChartedSurface s;
  s.kind_ = kind;
  s.grid_ = grid;
  s.area_ = area;
  switch (kind) {
    case SurfaceKind::Plane:
    case SurfaceKind::Torus: {
      const double side = std::sqrt(area);
      s.x1_ = side;
      s.y1_ = side;
      s.periodic_x_ = s.periodic_y_ = (kind == SurfaceKind::Torus);
      break;
    }
    case SurfaceKind::Sphere: {
      const double zmax = area / (4.0 * std::numbers::pi);
      s.x0_ = 0.0;
      s.x1_ = 2.0 * std::numbers::pi;
      s.y0_ = -zmax;
      s.y1_ = zmax;
      s.periodic_x_ = true;
      s.periodic_y_ = false;
      s.pole_band_ = pole_band > 0.0 ? pole_band : kDefaultPoleBandCells * s.hy();
      if (s.pole_band_ >= 0.25 * s.height())
        throw Error("polar exclusion band too wide for the sphere chart");
      break;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(const ChartedSurface& surface, double value)
    : surface_(surface), values_(surface.size(), value) {}

ScalarField::ScalarField(const ChartedSurface& surface, std::vector<double> samples)
    : surface_(surface), values_(std::move(samples)) {
  if (values_.size() != surface_.size()) throw Error("sample count does not match the grid");
  if (!all_finite()) throw Error("field samples must be finite");
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void require_same_grid(const ScalarField& f, const ScalarField& g) {
  if (!(f.surface() == g.surface())) throw Error("fields live on different surfaces or grids");
}

ScalarField& ScalarField::operator+=(const ScalarField& other) { return axpy(1.0, other); }

ScalarField& ScalarField::operator-=(const ScalarField& other) { return axpy(-1.0, other); }

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField& ScalarField::axpy(double s, const ScalarField& other) {
  require_same_grid(*this, other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += s * other.values_[k];
  return *this;
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  ScalarField r(a);
  for (std::size_t k = 0; k < r.size(); ++k) r[k] *= b[k];
  return r;
}

// ---------------------------------------------------------------------------

namespace {

// Derivative along one line of n samples with stride `stride`.
void diff_line(const double* f, std::size_t stride, int n, double h, bool periodic, int order,
               double* out) {
  auto at = [&](int k) { return f[static_cast<std::size_t>(k) * stride]; };
  auto put = [&](int k, double v) { out[static_cast<std::size_t>(k) * stride] = v; };
  if (periodic) {
    auto w = [&](int k) { return at(((k % n) + n) % n); };
    for (int k = 0; k < n; ++k) {
      if (order == 4)
        put(k, (-w(k + 2) + 8.0 * w(k + 1) - 8.0 * w(k - 1) + w(k - 2)) / (12.0 * h));
      else
        put(k, (w(k + 1) - w(k - 1)) / (2.0 * h));
    }
    return;
  }
  if (order == 4) {
    put(0, (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4)) / (12.0 * h));
    put(1, (-3.0 * at(0) - 10.0 * at(1) + 18.0 * at(2) - 6.0 * at(3) + at(4)) / (12.0 * h));
    for (int k = 2; k < n - 2; ++k)
      put(k, (-at(k + 2) + 8.0 * at(k + 1) - 8.0 * at(k - 1) + at(k - 2)) / (12.0 * h));
    const int m = n - 1;
    put(m - 1, (3.0 * at(m) + 10.0 * at(m - 1) - 18.0 * at(m - 2) + 6.0 * at(m - 3) - at(m - 4)) /
                   (12.0 * h));
    put(m, (25.0 * at(m) - 48.0 * at(m - 1) + 36.0 * at(m - 2) - 16.0 * at(m - 3) + 3.0 * at(m - 4)) /
               (12.0 * h));
    return;
  }
  put(0, (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h));
  for (int k = 1; k < n - 1; ++k) put(k, (at(k + 1) - at(k - 1)) / (2.0 * h));
  put(n - 1, (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h));
}

// Pole-wise constancy over the band rows plus the stencil reach.
bool constant_near_pole(const ScalarField& f, bool north, int order) {
  const auto& s = f.surface();
  const int reach = order / 2;
  bool have = false;
  double ref = 0.0;
  for (int j = 0; j < s.ny(); ++j) {
    if (!s.near_polar_band(j, reach)) continue;
    const bool is_north = s.y(j) > 0.0;
    if (is_north != north) continue;
    for (int i = 0; i < s.nx(); ++i) {
      const double v = f.at(i, j);
      if (!have) {
        ref = v;
        have = true;
      } else if (std::abs(v - ref) > 1e-15 * std::max(1.0, std::abs(ref))) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

Gradient gradient(const ScalarField& f, int order) {
  if (order != 2 && order != 4) throw Error("finite-difference order must be 2 or 4");
  const auto& s = f.surface();
  if (order == 4 && (s.nx() < 5 || s.ny() < 5)) throw Error("grid too coarse for order 4");
  Gradient g;
  g.dx.assign(f.size(), 0.0);
  g.dy.assign(f.size(), 0.0);
  const auto nx = static_cast<std::size_t>(s.nx());
  const double* data = f.values().data();
  for (int j = 0; j < s.ny(); ++j)
    diff_line(data + j * nx, 1, s.nx(), s.hx(), s.periodic_x(), order, g.dx.data() + j * nx);
  for (int i = 0; i < s.nx(); ++i)
    diff_line(data + i, nx, s.ny(), s.hy(), s.periodic_y(), order, g.dy.data() + i);
  if (s.kind() == SurfaceKind::Sphere) {
    for (int j = 0; j < s.ny(); ++j) {
      if (!s.in_polar_band(j)) continue;
      for (int i = 0; i < s.nx(); ++i) {
        g.dx[s.index(i, j)] = 0.0;
        g.dy[s.index(i, j)] = 0.0;
      }
    }
  }
  return g;
}

bool constant_on_polar_bands(const ScalarField& f, int order) {
  if (f.surface().kind() != SurfaceKind::Sphere) return true;
  return constant_near_pole(f, true, order) && constant_near_pole(f, false, order);
}

ScalarField poisson_bracket(const ScalarField& f, const ScalarField& g,
                            const BracketOptions& options) {
  require_same_grid(f, g);
  if (f.surface().kind() == SurfaceKind::Sphere && options.polar == PolarPolicy::Strict) {
    for (bool north : {true, false}) {
      if (!constant_near_pole(f, north, options.order) &&
          !constant_near_pole(g, north, options.order))
        throw Error(std::string("both fields vary inside the ") + (north ? "north" : "south") +
                    " polar exclusion band");
    }
  }
  const Gradient gf = gradient(f, options.order);
  const Gradient gg = gradient(g, options.order);
  ScalarField out(f.surface());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = gf.dx[k] * gg.dy[k] - gf.dy[k] * gg.dx[k];
  return out;
}

double sup_norm(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double sup_norm(const ScalarField& f) { return sup_norm(f.values()); }

double integrate(const ScalarField& f) {
  const auto& s = f.surface();
  double total = 0.0;
  for (int j = 0; j < s.ny(); ++j) {
    double row = 0.0;
    for (int i = 0; i < s.nx(); ++i) row += s.cell_weight(i, j) * f.at(i, j);
    total += row;
  }
  return total;
}

double displacement_energy_cap(double cap_area, double area) {
  if (!(cap_area > 0.0) || !(cap_area < area)) throw Error("cap area must lie in (0, A)");
  if (cap_area < 0.5 * area) return cap_area;
  return std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------

void write_field_csv(std::ostream& out, const ScalarField& f) {
  const auto& s = f.surface();
  const auto old_precision = out.precision(17);
  out << "# nx=" << s.nx() << " ny=" << s.ny() << " x0=" << s.x0() << " x1=" << s.x1()
      << " y0=" << s.y0() << " y1=" << s.y1() << '\n';
  out << "i,j,x,y,value\n";
  for (int j = 0; j < s.ny(); ++j)
    for (int i = 0; i < s.nx(); ++i)
      out << i << ',' << j << ',' << s.x(i) << ',' << s.y(j) << ',' << f.at(i, j) << '\n';
  out.precision(old_precision);
}

namespace {

constexpr char kFieldMagic[4] = {'P', 'B', 'F', 'D'};
constexpr std::uint32_t kFieldVersion = 1;

template <class T>
void put_raw(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get_raw(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error("truncated field dump");
  return v;
}

}  // namespace

void write_field_binary(std::ostream& out, const ScalarField& f) {
  const auto& s = f.surface();
  out.write(kFieldMagic, 4);
  put_raw(out, kFieldVersion);
  put_raw(out, static_cast<std::int32_t>(s.nx()));
  put_raw(out, static_cast<std::int32_t>(s.ny()));
  for (double v : {s.x0(), s.x1(), s.y0(), s.y1()}) put_raw(out, v);
  out.write(reinterpret_cast<const char*>(f.values().data()),
            static_cast<std::streamsize>(f.size() * sizeof(double)));
}

ScalarField read_field_binary(std::istream& in, const ChartedSurface& surface) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kFieldMagic, 4) != 0) throw Error("not a field dump");
  if (get_raw<std::uint32_t>(in) != kFieldVersion) throw Error("unsupported field dump version");
  const auto nx = get_raw<std::int32_t>(in);
  const auto ny = get_raw<std::int32_t>(in);
  double rect[4];
  for (double& v : rect) v = get_raw<double>(in);
  if (nx != surface.nx() || ny != surface.ny() || rect[0] != surface.x0() ||
      rect[1] != surface.x1() || rect[2] != surface.y0() || rect[3] != surface.y1())
    throw Error("field dump does not match the surface grid");
  std::vector<double> values(surface.size());
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!in) throw Error("truncated field dump");
  return ScalarField(surface, std::move(values));
}

}  // namespace pbcover
