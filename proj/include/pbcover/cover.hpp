#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pbcover/surface.hpp"

namespace pbcover {

enum class PlacementKind { Translation, Cap };

struct EmbeddingOptions {
  /// Support margin: partitions live on the inner disk of capacity (1-eta)c,
  /// the embedding extends to the collar of capacity (1+eta)c.
  double eta = 0.1;
  /// Plane: accept disks that overflow the chart window (and c >= A).
  /// Torus: accept collars that wrap onto themselves (immersed disks, read
  /// through the nearest periodic image).
  bool allow_overflow = false;
};

/// Symplectic embedding of the standard disk of capacity c = pi r^2.
///
/// Flat coordinates u live in the disk |u| < r centred at the origin.
/// Translations send u to center + u (modulo periods).  Caps send the flat
/// disk to the pole-centred cap (theta = phi, z = Z - |u|^2/2 with
/// Z = A/(4 pi)) and then rotate the sphere so the pole moves to center.
class DiskEmbedding {
 public:
  const ChartedSurface& surface() const { return surface_; }
  PlacementKind kind() const { return kind_; }
  Point2 center() const { return center_; }
  double capacity() const { return capacity_; }
  double eta() const { return eta_; }
  double radius() const;
  double inner_capacity() const { return (1.0 - eta_) * capacity_; }
  double collar_capacity() const { return (1.0 + eta_) * capacity_; }
  double inner_radius() const;
  /// Sphere caps whose collar contains a pole (they necessarily meet the
  /// polar band; only the Mask bracket policy handles them).
  bool contains_pole() const { return contains_pole_; }

  /// Flat coordinates to chart point.
  Point2 map(Point2 u) const;
  /// Chart point to flat coordinates (principal preimage; for caps defined
  /// away from the antipode of the centre).
  Point2 inverse(Point2 p) const;
  /// |inverse(p)|^2, i.e. capacity/pi of the smallest concentric disk
  /// containing p.
  double flat_radius_sq(Point2 p) const;
  /// p lies in the open image of the concentric disk of capacity
  /// fraction * c.
  bool covers(Point2 p, double fraction = 1.0) const;

  friend bool operator==(const DiskEmbedding&, const DiskEmbedding&) = default;

 private:
  friend DiskEmbedding translated_disk(const ChartedSurface&, Point2, double,
                                       const EmbeddingOptions&);
  friend DiskEmbedding cap_embedding(const ChartedSurface&, Point2, double,
                                     const EmbeddingOptions&);

  ChartedSurface surface_;
  PlacementKind kind_ = PlacementKind::Translation;
  Point2 center_;
  double capacity_ = 0.0;
  double eta_ = 0.1;
  bool contains_pole_ = false;
  std::array<double, 9> rotation_{};  ///< row-major, pole -> centre
};

DiskEmbedding translated_disk(const ChartedSurface& surface, Point2 center, double capacity,
                              const EmbeddingOptions& options = {});
DiskEmbedding cap_embedding(const ChartedSurface& sphere, Point2 center, double capacity,
                            const EmbeddingOptions& options = {});
/// translated_disk on plane/torus, cap_embedding on the sphere.
DiskEmbedding make_disk(const ChartedSurface& surface, Point2 center, double capacity,
                        const EmbeddingOptions& options = {});

/// max |det D(map) - 1| over n pseudo-random interior points of the flat
/// disk, central differences with step 1e-5.
double symplectic_residual(const DiskEmbedding& e, int n_points, std::uint64_t seed);

/// Quadrature area of the image of the concentric disk of capacity
/// fraction * c (grid count).
double image_area(const DiskEmbedding& e, double fraction = 1.0);

// ---------------------------------------------------------------------------

struct CoveringCertificate {
  bool covered = true;
  std::size_t uncovered_count = 0;
  /// First uncovered grid points (at most 16).
  std::vector<Point2> uncovered;
  std::string describe() const;
};

/// Checks that every grid point lies in some image of the concentric disk of
/// capacity fraction * c.
CoveringCertificate certify_covering(const ChartedSurface& surface,
                                     std::span<const DiskEmbedding> sets, double fraction = 1.0);

struct DiscreteCover {
  ChartedSurface surface;
  std::vector<DiskEmbedding> sets;
  std::size_t size() const { return sets.size(); }
};

/// Throws when the images miss a grid point (message lists the misses).
DiscreteCover make_discrete_cover(const ChartedSurface& surface, std::vector<DiskEmbedding> sets);

/// Embeddings sampled at the midpoints t_k = (k + 1/2)/M of the parameter
/// interval.
struct ContinuousCover {
  ChartedSurface surface;
  std::vector<DiskEmbedding> samples;
  std::size_t size() const { return samples.size(); }
  double t(std::size_t k) const {
    return (static_cast<double>(k) + 0.5) / static_cast<double>(samples.size());
  }
  /// Largest chart distance between consecutive centres.
  double max_step() const;
};

/// Polyline of centres parametrized by arc length; segments use the
/// shortest displacement on periodic axes and great circles on the sphere.
struct CenterPath {
  std::vector<Point2> vertices;
  bool closed = false;
  Point2 at(const ChartedSurface& surface, double s) const;
};

ContinuousCover make_continuous_cover(const ChartedSurface& surface, const CenterPath& path,
                                      double capacity, int samples,
                                      const EmbeddingOptions& options = {});
ContinuousCover make_continuous_cover(const ChartedSurface& surface,
                                      std::vector<DiskEmbedding> samples);

// ---------------------------------------------------------------------------

/// Cover parametrized by the square T = [0,1]^2 sampled at the midpoints of
/// an M x M grid (flat index a + M b).
struct SquareCover {
  ChartedSurface surface;
  int cells = 0;
  std::vector<DiskEmbedding> sets;
  const DiskEmbedding& at(int a, int b) const {
    return sets[static_cast<std::size_t>(b) * static_cast<std::size_t>(cells) +
                static_cast<std::size_t>(a)];
  }
};

/// Torus cover with G(t) the translated disk centred at t (chart units).
SquareCover square_translation_cover(const ChartedSurface& torus, int cells, double capacity,
                                     const EmbeddingOptions& options = {});

struct BicoverOptions {
  /// Radius of the closed ball D around the centre of T.
  double disk_radius = 0.45;
  /// Rows of the slab (the fiber direction); 0 picks 2.
  int slab_rows = 0;
  /// Slab equals all of T (then D = T); requires the inner cover to have as
  /// many samples as T has columns.
  bool degenerate = false;
};

enum class BicoverRegion : std::uint8_t { Outside, Collar, Slab };

/// T-parametrized cover that pulls the base cover back under a radial
/// collapse q of D outside D and equals the inner cover along a slab of
/// grid cells inside D.  Slab column col0 + k carries inner sample k.
struct Bicover {
  SquareCover base;
  ContinuousCover inner;
  SquareCover combined;
  std::vector<BicoverRegion> region;  ///< per T-cell
  Point2 disk_center{0.5, 0.5};
  double disk_radius = 0.45;
  int col0 = 0;
  int row0 = 0;
  int rows = 0;
  /// Fiber profile on the slab rows, mean exactly 1 up to rounding.
  std::vector<double> rho;
  /// Measure of the slab in T.
  double slab_volume = 0.0;
  bool degenerate = false;

  int columns() const { return static_cast<int>(inner.size()); }
  /// (1/rows) sum_b rho_b, which must be 1.
  double fiber_mass() const;
  /// alpha_I(k) = (1/rows) sum_b alpha(col0 + k, row0 + b) rho_b.
  std::vector<double> fiber_average(std::span<const double> alpha_t) const;
};

/// Continuous quartic fiber profile (15/8)(1 - x^2)^2 on [-1,1] (unit mean).
double quartic_fiber_profile(double x);

Bicover make_bicover(const SquareCover& base, const ContinuousCover& inner,
                     const BicoverOptions& options = {});

/// Recomputes the three bicover conditions on the T-grid; returns the number
/// of cells where an embedding differs from the prescribed one.
std::size_t bicover_defects(const Bicover& b);

/// Radial collapse of D: T \ int D -> T, boundary of D to the centre,
/// boundary of T fixed.
Point2 bicover_quotient(const Bicover& b, Point2 t);

}  // namespace pbcover
