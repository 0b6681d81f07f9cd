#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pbcover/cover.hpp"
#include "pbcover/partition.hpp"

namespace pbcover {

/// Constructive Lebesgue number of the inclusion cover {O_j} of the t-grid,
/// O_j = { s : G_s(U'') inside G_j(U) }.
struct LebesgueReport {
  /// Every run of min_run consecutive samples lies in a common O_j.
  std::size_t min_run = 0;
  /// Fewest windows N dividing M with M/N <= min_run.
  std::size_t windows = 0;
};

LebesgueReport lebesgue_windows(const ContinuousCover& cover);

/// Continuous to discrete: N equal windows of the t-grid, window k assigned
/// to an embedding G_{t_j} containing the supports of every F_s in the
/// window (grid verified), F'_j = sum over its windows of sum_s w_s F_s.
/// Windows carrying only zero fields join a neighbour's set; windows
/// choosing the same embedding share a set.
struct CoarseGrain {
  DiscreteCover cover;
  Partition partition;
  std::size_t windows = 0;
  std::size_t per_window = 0;
  std::vector<std::size_t> window_set;     ///< r
  std::vector<std::size_t> window_sample;  ///< chosen t_j per window
};

CoarseGrain coarse_grain(const ContinuousCover& cover, const Partition& partition,
                         std::size_t windows);

/// The piecewise-constant t-weight alpha_s = a'(r(window(s))).
std::vector<double> induced_interval_weight(const CoarseGrain& cg, std::span<const double> a_prime);

/// Discrete to continuous on M = 3(n+1)m t-cells: window k (1-based) covers
/// cells (3k-1)m .. (3k+1)m - 1 and carries (3/2)(n+1) F'_k; between
/// windows the centres are interpolated and the fields vanish.
struct Interpolated {
  ContinuousCover cover;
  Partition partition;
  int cells_per_third = 1;
  std::size_t sets = 0;
  /// t-cell range [first, last) of window k (0-based).
  std::pair<std::size_t, std::size_t> window(std::size_t k) const;
};

Interpolated continuous_from_discrete(const DiscreteCover& cover, const Partition& partition,
                                      int cells_per_third = 1);

/// a'(k) = (3(n+1)/2) * integral of alpha over window k, for alpha given per
/// t-cell.
std::vector<double> window_weights(const Interpolated& ip, std::span<const double> alpha);

}  // namespace pbcover
