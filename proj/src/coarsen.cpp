#include "pbcover/coarsen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace pbcover {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

/// Grid indices where the image of the concentric disk of capacity
/// fraction * c under e contains the sample.
std::vector<std::size_t> image_points(const DiskEmbedding& e, double fraction) {
  const auto& s = e.surface();
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (e.covers(s.point(i), fraction)) out.push_back(i);
  return out;
}

bool contains_all(const DiskEmbedding& e, std::span<const std::size_t> points) {
  const auto& s = e.surface();
  return std::all_of(points.begin(), points.end(),
                     [&](std::size_t i) { return e.covers(s.point(i)); });
}

std::vector<std::size_t> support_points(const ScalarField& f) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] != 0.0) out.push_back(i);
  return out;
}

}  // namespace

LebesgueReport lebesgue_windows(const ContinuousCover& cover) {
  const std::size_t m = cover.size();
  if (m == 0) throw Error("empty continuous cover");
  // O_j contains s iff G_s(U'') lies in G_j(U); J(s) is scanned outward
  // from s and kept as the contiguous index range around s.
  std::vector<std::size_t> lo(m), hi(m);
  for (std::size_t s = 0; s < m; ++s) {
    const auto& e = cover.samples[s];
    const auto inner = image_points(e, 1.0 - e.eta());
    std::size_t a = s;
    while (a > 0 && contains_all(cover.samples[a - 1], inner)) --a;
    std::size_t b = s;
    while (b + 1 < m && contains_all(cover.samples[b + 1], inner)) ++b;
    lo[s] = a;
    hi[s] = b;
  }
  std::size_t min_run = m;
  for (std::size_t a = 0; a < m; ++a) {
    std::size_t max_lo = lo[a], min_hi = hi[a];
    std::size_t b = a;
    while (b + 1 < m) {
      const std::size_t nl = std::max(max_lo, lo[b + 1]);
      const std::size_t nh = std::min(min_hi, hi[b + 1]);
      if (nl > nh) break;
      max_lo = nl;
      min_hi = nh;
      ++b;
    }
    if (b + 1 < m) min_run = std::min(min_run, b - a + 1);
  }
  LebesgueReport r;
  r.min_run = min_run;
  for (std::size_t n = 1; n <= m; ++n) {
    if (m % n == 0 && m / n <= min_run) {
      r.windows = n;
      break;
    }
  }
  return r;
}

CoarseGrain coarse_grain(const ContinuousCover& cover, const Partition& partition,
                         std::size_t windows) {
  const std::size_t m = cover.size();
  if (partition.kind != PartitionKind::Continuous || partition.cells != m)
    throw Error("partition does not match the continuous cover");
  if (windows == 0 || m % windows != 0) throw Error("window count must divide the t-grid size");
  const std::size_t per = m / windows;

  std::vector<const PartitionMember*> by_cell(m, nullptr);
  for (const auto& mem : partition.members) {
    if (mem.cell >= m) throw Error("partition member outside the t-grid");
    if (!(mem.embedding == cover.samples[mem.cell]))
      throw Error("partition is not subordinated to the continuous cover");
    by_cell[mem.cell] = &mem;
  }

  CoarseGrain cg;
  cg.windows = windows;
  cg.per_window = per;
  cg.window_set.assign(windows, kNone);
  cg.window_sample.assign(windows, kNone);

  std::vector<DiskEmbedding> sets;
  for (std::size_t k = 0; k < windows; ++k) {
    std::vector<std::size_t> support;
    for (std::size_t s = k * per; s < (k + 1) * per; ++s) {
      if (by_cell[s] == nullptr) continue;
      const auto pts = support_points(by_cell[s]->field);
      support.insert(support.end(), pts.begin(), pts.end());
    }
    if (support.empty()) continue;
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());

    // Candidates nearest the window centre first.
    std::vector<std::size_t> order(m);
    for (std::size_t j = 0; j < m; ++j) order[j] = j;
    const double centre = static_cast<double>(k * per) + 0.5 * static_cast<double>(per) - 0.5;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return std::abs(static_cast<double>(x) - centre) < std::abs(static_cast<double>(y) - centre);
    });
    std::optional<std::size_t> chosen;
    for (std::size_t j : order) {
      if (contains_all(cover.samples[j], support)) {
        chosen = j;
        break;
      }
    }
    if (!chosen) throw Error("window count too small: no embedding contains the supports of window " +
                             std::to_string(k));
    cg.window_sample[k] = *chosen;
    const auto& e = cover.samples[*chosen];
    auto it = std::find(sets.begin(), sets.end(), e);
    if (it == sets.end()) {
      sets.push_back(e);
      it = sets.end() - 1;
    }
    cg.window_set[k] = static_cast<std::size_t>(it - sets.begin());
  }
  if (sets.empty()) throw Error("partition has no nonzero fields");

  // Zero windows join the previous set, or the next one at the start.
  for (std::size_t k = 0; k < windows; ++k)
    if (cg.window_set[k] == kNone && k > 0) cg.window_set[k] = cg.window_set[k - 1];
  for (std::size_t k = windows; k-- > 0;)
    if (cg.window_set[k] == kNone) cg.window_set[k] = cg.window_set[k + 1];

  cg.partition.kind = PartitionKind::Discrete;
  cg.partition.surface = cover.surface;
  cg.partition.cells = sets.size();
  for (std::size_t j = 0; j < sets.size(); ++j)
    cg.partition.members.push_back({sets[j], ScalarField(cover.surface), 1.0, j});
  for (std::size_t s = 0; s < m; ++s) {
    if (by_cell[s] == nullptr) continue;
    auto& target = cg.partition.members[cg.window_set[s / per]].field;
    target.axpy(by_cell[s]->weight, by_cell[s]->field);
  }
  cg.cover = make_discrete_cover(cover.surface, std::move(sets));
  return cg;
}

std::vector<double> induced_interval_weight(const CoarseGrain& cg, std::span<const double> a_prime) {
  if (a_prime.size() != cg.cover.size()) throw Error("weight size does not match the set count");
  std::vector<double> alpha(cg.windows * cg.per_window);
  for (std::size_t s = 0; s < alpha.size(); ++s) alpha[s] = a_prime[cg.window_set[s / cg.per_window]];
  return alpha;
}

std::pair<std::size_t, std::size_t> Interpolated::window(std::size_t k) const {
  const auto m = static_cast<std::size_t>(cells_per_third);
  return {(3 * (k + 1) - 1) * m, (3 * (k + 1) + 1) * m};
}

Interpolated continuous_from_discrete(const DiscreteCover& cover, const Partition& partition,
                                      int cells_per_third) {
  const std::size_t n = cover.size();
  if (cells_per_third < 1) throw Error("cells per third must be positive");
  if (partition.kind != PartitionKind::Discrete || partition.cells != n)
    throw Error("partition does not match the discrete cover");
  const auto m = static_cast<std::size_t>(cells_per_third);
  const std::size_t total = 3 * (n + 1) * m;

  std::vector<const PartitionMember*> by_set(n, nullptr);
  for (const auto& mem : partition.members) {
    if (mem.cell >= n || !(mem.embedding == cover.sets[mem.cell]))
      throw Error("partition is not subordinated to the discrete cover");
    by_set[mem.cell] = &mem;
  }

  Interpolated ip;
  ip.cells_per_third = cells_per_third;
  ip.sets = n;
  const auto& ref = cover.sets.front();
  const EmbeddingOptions opts{.eta = ref.eta(), .allow_overflow = true};
  std::vector<DiskEmbedding> samples;
  samples.reserve(total);
  for (std::size_t s = 0; s < total; ++s) {
    // Position in units of 1/(n+1): window k spans (k - 1/3, k + 1/3).
    const std::size_t third = s / m;  // index of the 1/(3(n+1)) slot
    if (third < 3) {
      samples.push_back(cover.sets.front());
    } else if (third >= 3 * n + 1) {
      samples.push_back(cover.sets.back());
    } else {
      const std::size_t k = (third + 1) / 3;  // 1-based window containing or preceding
      if (third + 1 == 3 * k || third == 3 * k) {
        samples.push_back(cover.sets[k - 1]);
      } else {
        // Gap slot 3k + 1 between windows k and k + 1.
        const double lambda =
            (static_cast<double>(s - (3 * k + 1) * m) + 0.5) / static_cast<double>(m);
        const auto& a = cover.sets[k - 1];
        const auto& b = cover.sets[k];
        if (a.capacity() != b.capacity() || a.eta() != b.eta())
          throw Error("discrete cover sets must share capacity and margin");
        const CenterPath seg{{a.center(), b.center()}, false};
        samples.push_back(make_disk(cover.surface, seg.at(cover.surface, lambda), a.capacity(), opts));
      }
    }
  }
  ip.cover = make_continuous_cover(cover.surface, std::move(samples));

  ip.partition.kind = PartitionKind::Continuous;
  ip.partition.surface = cover.surface;
  ip.partition.cells = total;
  const double scale = 1.5 * static_cast<double>(n + 1);
  const double weight = 1.0 / static_cast<double>(total);
  for (std::size_t k = 0; k < n; ++k) {
    if (by_set[k] == nullptr) continue;
    const ScalarField field = scale * by_set[k]->field;
    const auto [first, last] = ip.window(k);
    for (std::size_t s = first; s < last; ++s) ip.partition.members.push_back({cover.sets[k], field, weight, s});
  }
  return ip;
}

std::vector<double> window_weights(const Interpolated& ip, std::span<const double> alpha) {
  if (alpha.size() != ip.cover.size()) throw Error("weight size does not match the t-grid");
  std::vector<double> out(ip.sets, 0.0);
  for (std::size_t k = 0; k < ip.sets; ++k) {
    const auto [first, last] = ip.window(k);
    double acc = 0.0;
    for (std::size_t s = first; s < last; ++s) acc += alpha[s];
    out[k] = acc / static_cast<double>(last - first);
  }
  return out;
}

}  // namespace pbcover
