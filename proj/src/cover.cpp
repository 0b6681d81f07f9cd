#include "pbcover/cover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace pbcover {

namespace {

using std::numbers::pi;

using Vec3 = std::array<double, 3>;

Vec3 mul(const std::array<double, 9>& r, const Vec3& v) {
  return {r[0] * v[0] + r[1] * v[1] + r[2] * v[2], r[3] * v[0] + r[4] * v[1] + r[5] * v[2],
          r[6] * v[0] + r[7] * v[1] + r[8] * v[2]};
}

Vec3 mul_transposed(const std::array<double, 9>& r, const Vec3& v) {
  return {r[0] * v[0] + r[3] * v[1] + r[6] * v[2], r[1] * v[0] + r[4] * v[1] + r[7] * v[2],
          r[2] * v[0] + r[5] * v[1] + r[8] * v[2]};
}

double sphere_height(const ChartedSurface& s) { return 0.5 * s.height(); }

Vec3 to_unit(const ChartedSurface& s, Point2 p) {
  const double zeta = std::clamp(p.y / sphere_height(s), -1.0, 1.0);
  const double r = std::sqrt(std::max(0.0, 1.0 - zeta * zeta));
  return {r * std::cos(p.x), r * std::sin(p.x), zeta};
}

Point2 from_unit(const ChartedSurface& s, const Vec3& v) {
  double theta = std::atan2(v[1], v[0]);
  if (theta < 0.0) theta += 2.0 * pi;
  if (theta >= 2.0 * pi) theta = 0.0;
  return {theta, sphere_height(s) * std::clamp(v[2], -1.0, 1.0)};
}

/// Angular radius of a cap of the given area on the chart's sphere.
double cap_angle(const ChartedSurface& s, double area) {
  const double c = 1.0 - area / (2.0 * pi * sphere_height(s));
  return std::acos(std::clamp(c, -1.0, 1.0));
}

void check_options(double capacity, const EmbeddingOptions& options) {
  if (!(capacity > 0.0) || !std::isfinite(capacity)) throw Error("capacity must be positive");
  if (!(options.eta > 0.0 && options.eta < 1.0)) throw Error("support margin eta must lie in (0,1)");
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double unit_random(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

}  // namespace

double DiskEmbedding::radius() const { return std::sqrt(capacity_ / pi); }
double DiskEmbedding::inner_radius() const { return std::sqrt(inner_capacity() / pi); }

Point2 DiskEmbedding::map(Point2 u) const {
  if (kind_ == PlacementKind::Translation) {
    const Point2 p{center_.x + u.x, center_.y + u.y};
    return surface_.wrap(p);
  }
  const double z_top = sphere_height(surface_);
  const double rho2 = u.x * u.x + u.y * u.y;
  const double zeta = std::clamp(1.0 - rho2 / (2.0 * z_top), -1.0, 1.0);
  const double s = std::sqrt(std::max(0.0, 1.0 - zeta * zeta));
  const double phi = std::atan2(u.y, u.x);
  return from_unit(surface_, mul(rotation_, {s * std::cos(phi), s * std::sin(phi), zeta}));
}

Point2 DiskEmbedding::inverse(Point2 p) const {
  if (kind_ == PlacementKind::Translation) return surface_.displacement(center_, p);
  const Vec3 w = mul_transposed(rotation_, to_unit(surface_, p));
  const double rho = std::sqrt(std::max(0.0, 2.0 * sphere_height(surface_) * (1.0 - w[2])));
  const double phi = std::atan2(w[1], w[0]);
  return {rho * std::cos(phi), rho * std::sin(phi)};
}

double DiskEmbedding::flat_radius_sq(Point2 p) const {
  if (kind_ == PlacementKind::Translation) {
    const Point2 d = surface_.displacement(center_, p);
    return d.x * d.x + d.y * d.y;
  }
  const Vec3 v = to_unit(surface_, p);
  const double w2 = rotation_[2] * v[0] + rotation_[5] * v[1] + rotation_[8] * v[2];
  return std::max(0.0, 2.0 * sphere_height(surface_) * (1.0 - w2));
}

bool DiskEmbedding::covers(Point2 p, double fraction) const {
  return flat_radius_sq(p) < fraction * capacity_ / pi;
}

DiskEmbedding translated_disk(const ChartedSurface& surface, Point2 center, double capacity,
                              const EmbeddingOptions& options) {
  check_options(capacity, options);
  if (surface.kind() == SurfaceKind::Sphere) throw Error("translated disks need a flat chart");
  DiskEmbedding e;
  e.surface_ = surface;
  e.kind_ = PlacementKind::Translation;
  e.center_ = surface.wrap(center);
  e.capacity_ = capacity;
  e.eta_ = options.eta;
  const double collar_r = std::sqrt(e.collar_capacity() / pi);
  if (surface.kind() == SurfaceKind::Torus) {
    if (!(capacity < surface.area())) throw Error("capacity too large for the torus");
    if (!options.allow_overflow && !(collar_r < 0.5 * std::min(surface.width(), surface.height())))
      throw Error("disk collar wraps onto itself: capacity too large for the torus chart");
  } else if (!options.allow_overflow) {
    if (!(capacity < surface.area())) throw Error("capacity too large for the plane chart");
    if (center.x - collar_r < surface.x0() || center.x + collar_r > surface.x1() ||
        center.y - collar_r < surface.y0() || center.y + collar_r > surface.y1())
      throw Error("disk overflows the plane chart");
  }
  return e;
}

DiskEmbedding cap_embedding(const ChartedSurface& sphere, Point2 center, double capacity,
                            const EmbeddingOptions& options) {
  check_options(capacity, options);
  if (sphere.kind() != SurfaceKind::Sphere) throw Error("cap embeddings need a sphere");
  if (!(capacity < sphere.area())) throw Error("cap capacity must be below the sphere area");
  DiskEmbedding e;
  e.surface_ = sphere;
  e.kind_ = PlacementKind::Cap;
  e.capacity_ = capacity;
  e.eta_ = options.eta;
  if (!(e.collar_capacity() < sphere.area())) throw Error("cap collar exceeds the sphere");
  const double z_top = sphere_height(sphere);
  if (center.y < -z_top || center.y > z_top) throw Error("cap centre outside the sphere chart");
  e.center_ = sphere.wrap(center);

  const double beta = std::acos(std::clamp(center.y / z_top, -1.0, 1.0));
  const double ct = std::cos(e.center_.x), st = std::sin(e.center_.x);
  const double cb = std::cos(beta), sb = std::sin(beta);
  // Rz(theta) * Ry(beta)
  e.rotation_ = {ct * cb, -st, ct * sb, st * cb, ct, st * sb, -sb, 0.0, cb};

  const double alpha_collar = cap_angle(sphere, e.collar_capacity());
  const double alpha_band = cap_angle(sphere, 2.0 * pi * sphere.pole_band());
  for (double gamma : {beta, pi - beta}) {
    if (gamma < alpha_collar) {
      e.contains_pole_ = true;
    } else if (gamma < alpha_collar + alpha_band) {
      throw Error("cap hits the polar exclusion band without containing the pole");
    }
  }
  return e;
}

DiskEmbedding make_disk(const ChartedSurface& surface, Point2 center, double capacity,
                        const EmbeddingOptions& options) {
  if (surface.kind() == SurfaceKind::Sphere) return cap_embedding(surface, center, capacity, options);
  return translated_disk(surface, center, capacity, options);
}

double symplectic_residual(const DiskEmbedding& e, int n_points, std::uint64_t seed) {
  const double h = 1e-5;
  const double r = 0.95 * e.radius();
  const auto& s = e.surface();
  double worst = 0.0;
  std::uint64_t state = seed;
  for (int k = 0; k < n_points; ++k) {
    const double rad = r * std::sqrt(unit_random(state));
    const double ang = 2.0 * pi * unit_random(state);
    const Point2 u{rad * std::cos(ang), rad * std::sin(ang)};
    const Point2 dx = s.displacement(e.map({u.x - h, u.y}), e.map({u.x + h, u.y}));
    const Point2 dy = s.displacement(e.map({u.x, u.y - h}), e.map({u.x, u.y + h}));
    const double det = (dx.x * dy.y - dx.y * dy.x) / (4.0 * h * h);
    worst = std::max(worst, std::abs(det - 1.0));
  }
  return worst;
}

double image_area(const DiskEmbedding& e, double fraction) {
  const auto& s = e.surface();
  const auto indicator = ScalarField::sample(
      s, [&](double x, double y) { return e.covers({x, y}, fraction) ? 1.0 : 0.0; });
  return integrate(indicator);
}

// ---------------------------------------------------------------------------

std::string CoveringCertificate::describe() const {
  if (covered) return "all grid points covered";
  std::ostringstream out;
  out.precision(6);
  out << uncovered_count << " grid points uncovered, e.g.";
  for (const auto& p : uncovered) out << " (" << p.x << ", " << p.y << ")";
  return out.str();
}

CoveringCertificate certify_covering(const ChartedSurface& surface,
                                     std::span<const DiskEmbedding> sets, double fraction) {
  CoveringCertificate cert;
  for (std::size_t k = 0; k < surface.size(); ++k) {
    const Point2 p = surface.point(k);
    const bool hit =
        std::any_of(sets.begin(), sets.end(), [&](const DiskEmbedding& e) { return e.covers(p, fraction); });
    if (!hit) {
      cert.covered = false;
      ++cert.uncovered_count;
      if (cert.uncovered.size() < 16) cert.uncovered.push_back(p);
    }
  }
  return cert;
}

namespace {

void require_surface(const ChartedSurface& surface, std::span<const DiskEmbedding> sets) {
  for (const auto& e : sets)
    if (!(e.surface() == surface)) throw Error("embedding lives on a different surface or grid");
}

}  // namespace

DiscreteCover make_discrete_cover(const ChartedSurface& surface, std::vector<DiskEmbedding> sets) {
  if (sets.empty()) throw Error("a cover needs at least one set");
  require_surface(surface, sets);
  const auto cert = certify_covering(surface, sets);
  if (!cert.covered) throw Error("not a cover: " + cert.describe());
  return {surface, std::move(sets)};
}

double ContinuousCover::max_step() const {
  double m = 0.0;
  for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
    const Point2 d = surface.displacement(samples[k].center(), samples[k + 1].center());
    m = std::max(m, std::hypot(d.x, d.y));
  }
  return m;
}

Point2 CenterPath::at(const ChartedSurface& surface, double s) const {
  if (vertices.empty()) throw Error("empty centre path");
  if (vertices.size() == 1) return surface.wrap(vertices.front());
  const std::size_t segments = closed ? vertices.size() : vertices.size() - 1;
  std::vector<double> length(segments);
  double total = 0.0;
  for (std::size_t k = 0; k < segments; ++k) {
    const Point2 d = surface.displacement(vertices[k], vertices[(k + 1) % vertices.size()]);
    length[k] = std::hypot(d.x, d.y);
    total += length[k];
  }
  if (!(total > 0.0)) return surface.wrap(vertices.front());
  double target = std::clamp(s, 0.0, 1.0) * total;
  std::size_t k = 0;
  while (k + 1 < segments && target > length[k]) {
    target -= length[k];
    ++k;
  }
  const double lambda = length[k] > 0.0 ? std::clamp(target / length[k], 0.0, 1.0) : 0.0;
  const Point2 a = vertices[k];
  const Point2 b = vertices[(k + 1) % vertices.size()];
  if (surface.kind() == SurfaceKind::Sphere) {
    const Vec3 va = to_unit(surface, a);
    const Vec3 vb = to_unit(surface, b);
    const double dot = std::clamp(va[0] * vb[0] + va[1] * vb[1] + va[2] * vb[2], -1.0, 1.0);
    const double omega = std::acos(dot);
    if (omega < 1e-12) return surface.wrap(a);
    const double wa = std::sin((1.0 - lambda) * omega) / std::sin(omega);
    const double wb = std::sin(lambda * omega) / std::sin(omega);
    return from_unit(surface, {wa * va[0] + wb * vb[0], wa * va[1] + wb * vb[1], wa * va[2] + wb * vb[2]});
  }
  const Point2 d = surface.displacement(a, b);
  return surface.wrap({a.x + lambda * d.x, a.y + lambda * d.y});
}

ContinuousCover make_continuous_cover(const ChartedSurface& surface, const CenterPath& path,
                                      double capacity, int samples,
                                      const EmbeddingOptions& options) {
  if (samples < 1) throw Error("a continuous cover needs at least one t-sample");
  std::vector<DiskEmbedding> sets;
  sets.reserve(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) {
    const double t = (k + 0.5) / samples;
    sets.push_back(make_disk(surface, path.at(surface, t), capacity, options));
  }
  return make_continuous_cover(surface, std::move(sets));
}

ContinuousCover make_continuous_cover(const ChartedSurface& surface,
                                      std::vector<DiskEmbedding> samples) {
  if (samples.empty()) throw Error("a continuous cover needs at least one t-sample");
  require_surface(surface, samples);
  for (const auto& e : samples)
    if (e.capacity() != samples.front().capacity() || e.eta() != samples.front().eta())
      throw Error("continuous cover embeddings must share capacity and margin");
  const auto cert = certify_covering(surface, samples);
  if (!cert.covered) throw Error("not a cover: " + cert.describe());
  return {surface, std::move(samples)};
}

// ---------------------------------------------------------------------------

SquareCover square_translation_cover(const ChartedSurface& torus, int cells, double capacity,
                                     const EmbeddingOptions& options) {
  if (torus.kind() != SurfaceKind::Torus) throw Error("square translation covers need a torus");
  if (cells < 1) throw Error("square cover needs at least one cell per axis");
  SquareCover out;
  out.surface = torus;
  out.cells = cells;
  out.sets.reserve(static_cast<std::size_t>(cells) * static_cast<std::size_t>(cells));
  for (int b = 0; b < cells; ++b) {
    for (int a = 0; a < cells; ++a) {
      const Point2 c{torus.x0() + (a + 0.5) / cells * torus.width(),
                     torus.y0() + (b + 0.5) / cells * torus.height()};
      out.sets.push_back(translated_disk(torus, c, capacity, options));
    }
  }
  return out;
}

double quartic_fiber_profile(double x) {
  if (x <= -1.0 || x >= 1.0) return 0.0;
  const double w = 1.0 - x * x;
  return 15.0 / 8.0 * w * w;
}

namespace {

// Antiderivative of (15/8)(1 - x^2)^2.
double quartic_primitive(double x) {
  return 15.0 / 8.0 * (x - 2.0 * x * x * x / 3.0 + x * x * x * x * x / 5.0);
}

double distance_to_rect(Point2 p, double x0, double x1, double y0, double y1) {
  const double dx = std::max({x0 - p.x, 0.0, p.x - x1});
  const double dy = std::max({y0 - p.y, 0.0, p.y - y1});
  return std::hypot(dx, dy);
}

std::size_t cell_index(int cells, int a, int b) {
  return static_cast<std::size_t>(b) * static_cast<std::size_t>(cells) + static_cast<std::size_t>(a);
}

Point2 cell_point(int cells, int a, int b) {
  return {(a + 0.5) / cells, (b + 0.5) / cells};
}

const DiskEmbedding& base_at(const Bicover& bc, Point2 t) {
  const int m = bc.base.cells;
  const int a = std::clamp(static_cast<int>(std::floor(t.x * m)), 0, m - 1);
  const int b = std::clamp(static_cast<int>(std::floor(t.y * m)), 0, m - 1);
  return bc.base.at(a, b);
}

}  // namespace

double Bicover::fiber_mass() const {
  double acc = 0.0;
  for (double r : rho) acc += r;
  return acc / static_cast<double>(rho.size());
}

std::vector<double> Bicover::fiber_average(std::span<const double> alpha_t) const {
  const int m = combined.cells;
  if (alpha_t.size() != static_cast<std::size_t>(m) * static_cast<std::size_t>(m))
    throw Error("T-weight does not match the bicover grid");
  std::vector<double> out(inner.size(), 0.0);
  for (int k = 0; k < columns(); ++k) {
    double acc = 0.0;
    for (int b = 0; b < rows; ++b)
      acc += alpha_t[cell_index(m, col0 + k, row0 + b)] * rho[static_cast<std::size_t>(b)];
    out[static_cast<std::size_t>(k)] = acc / rows;
  }
  return out;
}

Point2 bicover_quotient(const Bicover& b, Point2 t) {
  const double dx = t.x - b.disk_center.x;
  const double dy = t.y - b.disk_center.y;
  const double s = std::hypot(dx, dy);
  if (s <= b.disk_radius) return b.disk_center;
  const double ux = dx / s, uy = dy / s;
  // Distance from the centre to the boundary of T along (ux, uy).
  double edge = std::numeric_limits<double>::infinity();
  if (ux != 0.0) edge = std::min(edge, 0.5 / std::abs(ux));
  if (uy != 0.0) edge = std::min(edge, 0.5 / std::abs(uy));
  const double scale = edge * (s - b.disk_radius) / (edge - b.disk_radius);
  return {b.disk_center.x + ux * scale, b.disk_center.y + uy * scale};
}

Bicover make_bicover(const SquareCover& base, const ContinuousCover& inner,
                     const BicoverOptions& options) {
  if (base.cells < 1 || base.sets.size() != static_cast<std::size_t>(base.cells) * base.cells)
    throw Error("malformed square cover");
  if (inner.size() == 0) throw Error("empty inner cover");
  if (!(base.surface == inner.surface)) throw Error("bicover covers live on different surfaces");
  const auto& ref = base.sets.front();
  for (const auto& e : inner.samples)
    if (e.capacity() != ref.capacity() || e.eta() != ref.eta())
      throw Error("bicover covers must share capacity and margin");

  Bicover bc;
  bc.base = base;
  bc.inner = inner;
  bc.degenerate = options.degenerate;
  const int m = base.cells;
  const int mi = static_cast<int>(inner.size());
  if (mi > m) throw Error("inner cover has more samples than T has columns");

  if (options.degenerate) {
    if (mi != m) throw Error("degenerate bicover needs one inner sample per T column");
    bc.disk_radius = std::numeric_limits<double>::infinity();
    bc.col0 = 0;
    bc.row0 = 0;
    bc.rows = m;
  } else {
    if (!(options.disk_radius > 0.0 && options.disk_radius < 0.5))
      throw Error("the ball D must lie in the interior of T");
    bc.disk_radius = options.disk_radius;
    bc.rows = options.slab_rows > 0 ? options.slab_rows : 2;
    if (bc.rows > m) throw Error("slab taller than T");
    bc.col0 = (m - mi) / 2;
    bc.row0 = (m - bc.rows) / 2;
    const double hx = 0.5 * mi / m;
    const double hy = 0.5 * bc.rows / m;
    const double cx = static_cast<double>(bc.col0) / m + hx - 0.5;
    const double cy = static_cast<double>(bc.row0) / m + hy - 0.5;
    if (!(std::hypot(std::abs(cx) + hx, std::abs(cy) + hy) < bc.disk_radius))
      throw Error("slab does not fit inside the ball D");
  }

  bc.rho.resize(static_cast<std::size_t>(bc.rows));
  for (int b = 0; b < bc.rows; ++b) {
    const double lo = -1.0 + 2.0 * b / bc.rows;
    const double hi = -1.0 + 2.0 * (b + 1) / bc.rows;
    bc.rho[static_cast<std::size_t>(b)] =
        (quartic_primitive(hi) - quartic_primitive(lo)) / (hi - lo);
  }
  bc.slab_volume = static_cast<double>(mi) * bc.rows / (static_cast<double>(m) * m);

  bc.combined.surface = base.surface;
  bc.combined.cells = m;
  bc.combined.sets.reserve(base.sets.size());
  bc.region.resize(base.sets.size());
  const double sx0 = static_cast<double>(bc.col0) / m, sx1 = static_cast<double>(bc.col0 + mi) / m;
  const double sy0 = static_cast<double>(bc.row0) / m, sy1 = static_cast<double>(bc.row0 + bc.rows) / m;
  const auto& hub = base_at(bc, bc.disk_center);
  for (int b = 0; b < m; ++b) {
    for (int a = 0; a < m; ++a) {
      const Point2 t = cell_point(m, a, b);
      const bool in_slab = a >= bc.col0 && a < bc.col0 + mi && b >= bc.row0 && b < bc.row0 + bc.rows;
      const double r = std::hypot(t.x - bc.disk_center.x, t.y - bc.disk_center.y);
      auto& region = bc.region[cell_index(m, a, b)];
      if (in_slab) {
        region = BicoverRegion::Slab;
        bc.combined.sets.push_back(inner.samples[static_cast<std::size_t>(a - bc.col0)]);
      } else if (r > bc.disk_radius) {
        region = BicoverRegion::Outside;
        bc.combined.sets.push_back(base_at(bc, bicover_quotient(bc, t)));
      } else {
        region = BicoverRegion::Collar;
        const auto& edge = inner.samples[static_cast<std::size_t>(std::clamp(a - bc.col0, 0, mi - 1))];
        const double d_slab = distance_to_rect(t, sx0, sx1, sy0, sy1);
        const double d_ball = bc.disk_radius - r;
        const double lambda = d_slab / (d_slab + d_ball);
        const auto& s = base.surface;
        const Point2 d = s.displacement(edge.center(), hub.center());
        const Point2 c{edge.center().x + lambda * d.x, edge.center().y + lambda * d.y};
        bc.combined.sets.push_back(
            make_disk(s, s.wrap(c), ref.capacity(), {.eta = ref.eta(), .allow_overflow = true}));
      }
    }
  }
  if (bicover_defects(bc) != 0) throw Error("bicover conditions fail on the T-grid");
  if (std::abs(bc.fiber_mass() - 1.0) > 1e-12) throw Error("fiber profile does not have unit mass");
  return bc;
}

std::size_t bicover_defects(const Bicover& bc) {
  const int m = bc.combined.cells;
  std::size_t defects = 0;
  for (int b = 0; b < m; ++b) {
    for (int a = 0; a < m; ++a) {
      const std::size_t k = cell_index(m, a, b);
      const Point2 t = cell_point(m, a, b);
      const auto& got = bc.combined.sets[k];
      switch (bc.region[k]) {
        case BicoverRegion::Slab:
          if (!(got == bc.inner.samples[static_cast<std::size_t>(a - bc.col0)])) ++defects;
          break;
        case BicoverRegion::Outside:
          if (!(got == base_at(bc, bicover_quotient(bc, t)))) ++defects;
          break;
        case BicoverRegion::Collar:
          if (std::hypot(t.x - bc.disk_center.x, t.y - bc.disk_center.y) > bc.disk_radius) ++defects;
          break;
      }
    }
  }
  return defects;
}

}  // namespace pbcover
