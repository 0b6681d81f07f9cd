#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pbcover/coarsen.hpp"
#include "pbcover/partition.hpp"
#include "pbcover/pbnorm.hpp"

namespace pbcover {

// ---------------------------------------------------------------------------
// Cover templates.

/// k x k lattice of translated disks of capacity c, offset by half a cell,
/// with the smallest k whose inner disks cover the grid.  Throws when no
/// k <= max_k works (capacity below the template threshold).
DiscreteCover lattice_torus_cover(const ChartedSurface& torus, double capacity,
                                  const EmbeddingOptions& options = {}, int max_k = 16);

/// Centres (0,0), (1/3,2/3), (2/3,1/3) shifted by (1/6,1/6), scaled to the
/// chart.
DiscreteCover three_disk_torus_cover(const ChartedSurface& torus, double capacity = 0.6,
                                     const EmbeddingOptions& options = {});

/// Closed boustrophedon through two rows at heights 1/4 and 3/4 of the chart.
CenterPath two_row_path(const ChartedSurface& torus);

/// Unit vectors of the symmetric arrangements with 2 (poles), 4
/// (tetrahedron), 5 (triangular bipyramid) or 6 (octahedron) points.
std::vector<std::array<double, 3>> symmetric_directions(int count);

/// Rotation (row-major 3x3) from Euler angles z-y-z.
std::array<double, 9> euler_rotation(double alpha, double beta, double gamma);

/// Caps of capacity c centred at the rotated symmetric directions.
DiscreteCover symmetric_cap_cover(const ChartedSurface& sphere, int count, double capacity,
                                  const std::array<double, 9>& rotation,
                                  const EmbeddingOptions& options = {});

/// Fewest symmetric caps of capacity c whose inner caps cover the sphere
/// (axis-aligned arrangement).
DiscreteCover minimal_cap_cover(const ChartedSurface& sphere, double capacity,
                                const EmbeddingOptions& options = {});

// ---------------------------------------------------------------------------
// Optimizer.

struct OptimizerConfig {
  int restarts = 8;
  int evaluations = 500;  ///< per restart
  std::uint64_t seed = 1;
  /// Initial simplex edge as a fraction of each box side.
  double initial_step = 0.2;
  double tolerance = 1e-10;
};

struct BoxMinimum {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
};

/// Multi-start Nelder-Mead with every trial point projected to the box.
/// The first start is x0; later starts are uniform in the box.  Objective
/// failures (exceptions) count as +infinity.
BoxMinimum minimize_in_box(const std::function<double(std::span<const double>)>& f,
                           std::span<const double> lower, std::span<const double> upper,
                           std::span<const double> x0, const OptimizerConfig& config);

struct MinimizeResult {
  std::vector<double> theta;
  PbReport report;
  double canonical_value = 0.0;
  int evaluations = 0;
};

MinimizeResult minimize_pb(const PartitionFamily& family, const OptimizerConfig& config = {},
                           const PbOptions& pb = {});

// ---------------------------------------------------------------------------
// pb(c) sweep.

struct SweepRow {
  double capacity = 0.0;
  double value = 0.0;
  double canonical_value = 0.0;
  int evaluations = 0;
  std::vector<double> theta;
  std::string cover;
};

struct SweepTable {
  std::vector<SweepRow> rows;
};

/// Minimal lattice covers on the torus, minimal symmetric caps on the
/// sphere.
DiscreteCover template_cover(const ChartedSurface& surface, double capacity,
                             const EmbeddingOptions& options = {});

/// The template cover followed by up to `extra` larger members of the same
/// family (k+1, k+2 lattices; more symmetric caps).
std::vector<DiscreteCover> template_covers(const ChartedSurface& surface, double capacity,
                                           const EmbeddingOptions& options = {}, int extra = 2);

/// Each row keeps the lowest optimized pb over template_covers(c).
SweepTable pb_curve_sweep(const ChartedSurface& surface, std::span<const double> capacities,
                          const FamilySpec& family = {}, const OptimizerConfig& config = {},
                          const PbOptions& pb = {}, const EmbeddingOptions& options = {},
                          int extra_templates = 2);

/// Indices i with value[i] > value[i-1] * (1 + tol) (and above absolute
/// rounding).  Throws when capacities are not strictly increasing.
std::vector<std::size_t> monotonicity_report(const SweepTable& table, double tol = 0.05);

// ---------------------------------------------------------------------------
// Consistency checks.

struct ConsistencyCheck {
  std::string id;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  ///< lhs - rhs
  bool pass = false;
};

struct ConsistencyReport {
  std::vector<ConsistencyCheck> checks;
  bool all_pass() const;
  void add(std::string id, double lhs, double rhs, bool pass);
};

/// pb(F) * 8 N^2 * max_j e_H(U_j) >= 1 for displaceable sphere caps.
ConsistencyReport polterovich_consistency(const DiscreteCover& cover, const Partition& partition,
                                          const PbOptions& pb = {});

struct ReductionConfig {
  int curve_order = 2;  ///< T-grid 2^m x 2^m
  double capacity = 0.3;
  int bicover_cells = 32;
  int inner_samples = 16;
  int weight_draws = 32;
  std::uint64_t seed = 1;
  double tolerance = 1e-9;
};

/// Square-parametrized torus cover read along the Hilbert curve, pushforward
/// weights, and the bicover extension of an interval cover.
ConsistencyReport reduction_check(const ChartedSurface& torus, const ReductionConfig& config = {},
                                  const PbOptions& pb = {});

/// Discrete -> continuous -> discrete on a cover: weight correspondences and
/// the pb inequalities.
ConsistencyReport coarse_graining_check(const DiscreteCover& cover, int cells_per_third = 1,
                                        std::uint64_t seed = 1, const PbOptions& pb = {});

/// The partition of the capacity-c' cover read on the capacity-c cover with
/// the same centres (c' < c) has identical pb.
ConsistencyReport restriction_check(const DiscreteCover& cover, double larger_capacity,
                                    const PbOptions& pb = {});

void write_report_csv(std::ostream& out, const ConsistencyReport& report);
void write_sweep_csv(std::ostream& out, const SweepTable& table);
/// Two columns `c pb` for gnuplot.
void write_sweep_dat(std::ostream& out, const SweepTable& table);

}  // namespace pbcover
