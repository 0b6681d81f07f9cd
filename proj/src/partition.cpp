#include "pbcover/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace pbcover {

std::string to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::SmoothstepPower:
      return "smoothstep-power";
    case ProfileKind::Polynomial:
      return "polynomial";
    case ProfileKind::FlatExponential:
      return "flat-exponential";
  }
  return "unknown";
}

ProfileKind profile_kind_from_string(const std::string& name) {
  if (name == "smoothstep-power") return ProfileKind::SmoothstepPower;
  if (name == "polynomial") return ProfileKind::Polynomial;
  if (name == "flat-exponential") return ProfileKind::FlatExponential;
  throw Error("unknown profile kind '" + name + "'");
}

void validate(const BumpProfile& profile) {
  if (!(profile.exponent >= 2.0) || !std::isfinite(profile.exponent))
    throw Error("bump exponent must be at least 2");
  if (!(profile.plateau >= 0.0 && profile.plateau < 1.0))
    throw Error("plateau fraction must lie in [0, 1)");
  if (!(profile.offset_fraction >= 0.0 && profile.offset_fraction < 1.0))
    throw Error("offset fraction must lie in [0, 1)");
}

double profile_value(const BumpProfile& profile, double s) {
  if (s >= 1.0) return 0.0;
  if (s < 0.0) s = 0.0;
  switch (profile.kind) {
    case ProfileKind::SmoothstepPower: {
      const double w = std::clamp((s - profile.plateau) / (1.0 - profile.plateau), 0.0, 1.0);
      return std::pow(1.0 - w * w, profile.exponent);
    }
    case ProfileKind::Polynomial:
      return std::pow(1.0 - s, profile.exponent);
    case ProfileKind::FlatExponential:
      return std::exp(-s / (1.0 - s));
  }
  return 0.0;
}

ScalarField bump_field(const DiskEmbedding& e, const BumpProfile& profile, double amplitude,
                       Point2 offset) {
  validate(profile);
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw Error("bump amplitude must be nonnegative");
  const double r_in = e.inner_radius();
  const double bound = profile.offset_fraction * r_in;
  const double off = std::hypot(offset.x, offset.y);
  if (off > bound * (1.0 + 1e-12)) throw Error("bump offset exceeds the support margin");
  const double r_b = r_in - bound;
  const double reach2 = (r_b + off) * (r_b + off);
  const auto& s = e.surface();
  ScalarField g(s);
  if (amplitude == 0.0) return g;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point2 p = s.point(k);
    if (e.flat_radius_sq(p) >= reach2) continue;
    const Point2 u = e.inverse(p);
    const double dx = u.x - offset.x;
    const double dy = u.y - offset.y;
    g[k] = amplitude * profile_value(profile, (dx * dx + dy * dy) / (r_b * r_b));
  }
  return g;
}

// ---------------------------------------------------------------------------

ScalarField Partition::total() const {
  ScalarField out(surface);
  for (const auto& m : members) out.axpy(m.weight, m.field);
  return out;
}

Partition normalized_partition(const ChartedSurface& surface, PartitionKind kind,
                               std::span<const DiskEmbedding> sets, std::span<const double> weights,
                               const BumpProfile& profile, std::span<const double> amplitudes,
                               std::span<const Point2> offsets) {
  const std::size_t n = sets.size();
  if (n == 0) throw Error("a partition needs at least one set");
  if (weights.size() != n || amplitudes.size() != n || offsets.size() != n)
    throw Error("partition parameter blocks do not match the set count");
  Partition out;
  out.kind = kind;
  out.surface = surface;
  out.cells = n;
  out.members.reserve(n);
  // Extended precision keeps the rounding of F_k to a single final step.
  std::vector<long double> mass(surface.size(), 0.0L);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(sets[k].surface() == surface)) throw Error("embedding lives on a different surface or grid");
    PartitionMember m{sets[k], bump_field(sets[k], profile, amplitudes[k], offsets[k]), weights[k], k};
    const auto v = m.field.values();
    for (std::size_t i = 0; i < v.size(); ++i) mass[i] += static_cast<long double>(weights[k]) * v[i];
    out.members.push_back(std::move(m));
  }
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (!(mass[i] > 0.0)) {
      const Point2 p = surface.point(i);
      std::ostringstream msg;
      msg << "zero bump mass at grid point (" << p.x << ", " << p.y
          << "): cover too thin for the profile support";
      throw Error(msg.str());
    }
  }
  for (auto& m : out.members) {
    auto v = m.field.values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(v[i] / mass[i]);
  }
  return out;
}

namespace {

Partition canonical_from(const ChartedSurface& surface, PartitionKind kind,
                         std::span<const DiskEmbedding> sets, double weight,
                         const BumpProfile& profile) {
  const std::vector<double> weights(sets.size(), weight);
  const std::vector<double> ones(sets.size(), 1.0);
  const std::vector<Point2> zero(sets.size());
  return normalized_partition(surface, kind, sets, weights, profile, ones, zero);
}

}  // namespace

Partition canonical_partition(const DiscreteCover& cover, const BumpProfile& profile) {
  return canonical_from(cover.surface, PartitionKind::Discrete, cover.sets, 1.0, profile);
}

Partition canonical_partition(const ContinuousCover& cover, const BumpProfile& profile) {
  return canonical_from(cover.surface, PartitionKind::Continuous, cover.samples,
                        1.0 / static_cast<double>(cover.size()), profile);
}

Partition canonical_partition(const SquareCover& cover, const BumpProfile& profile) {
  return canonical_from(cover.surface, PartitionKind::Continuous, cover.sets,
                        1.0 / static_cast<double>(cover.sets.size()), profile);
}

PartitionReport verify_partition(const Partition& partition) {
  PartitionReport r;
  const auto total = partition.total();
  for (std::size_t i = 0; i < total.size(); ++i)
    r.max_deviation = std::max(r.max_deviation, std::abs(total[i] - 1.0));
  r.min_value = partition.members.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  const auto& s = partition.surface;
  for (std::size_t k = 0; k < partition.members.size(); ++k) {
    const auto& m = partition.members[k];
    const double inner = m.embedding.inner_radius() * m.embedding.inner_radius();
    for (std::size_t i = 0; i < m.field.size(); ++i) {
      const double v = m.field[i];
      r.min_value = std::min(r.min_value, v);
      if (v != 0.0 && !(m.embedding.flat_radius_sq(s.point(i)) < inner)) {
        if (r.supports_ok) r.first_bad_member = k;
        r.supports_ok = false;
        ++r.support_violations;
      }
    }
  }
  return r;
}

Partition extend_partition_to_bicover(const Partition& inner, const Bicover& bicover) {
  if (inner.kind != PartitionKind::Continuous || inner.cells != bicover.inner.size())
    throw Error("inner partition does not match the bicover's interval cover");
  if (std::abs(bicover.fiber_mass() - 1.0) > 1e-12) throw Error("fiber profile does not have unit mass");
  const int m = bicover.combined.cells;
  Partition out;
  out.kind = PartitionKind::Continuous;
  out.surface = inner.surface;
  out.cells = static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
  const double weight = 1.0 / static_cast<double>(out.cells);
  for (const auto& member : inner.members) {
    if (!(member.embedding == bicover.inner.samples[member.cell]))
      throw Error("inner partition is not subordinated to the bicover's interval cover");
    const int a = bicover.col0 + static_cast<int>(member.cell);
    for (int b = 0; b < bicover.rows; ++b) {
      const double scale = bicover.rho[static_cast<std::size_t>(b)] / bicover.slab_volume;
      const std::size_t cell =
          static_cast<std::size_t>(bicover.row0 + b) * static_cast<std::size_t>(m) + static_cast<std::size_t>(a);
      out.members.push_back({bicover.combined.sets[cell], scale * member.field, weight, cell});
    }
  }
  std::sort(out.members.begin(), out.members.end(),
            [](const PartitionMember& x, const PartitionMember& y) { return x.cell < y.cell; });
  return out;
}

Partition reparametrize_by_curve(const Partition& square, const HilbertCurve& curve) {
  if (curve.dimension() != 2) throw Error("square parameter spaces need a planar curve");
  if (square.kind != PartitionKind::Continuous || square.cells != curve.cell_count())
    throw Error("square partition grid is not aligned with the curve order");
  const std::uint32_t side = 1U << curve.order();
  Partition out = square;
  for (auto& m : out.members) {
    const std::uint32_t q = static_cast<std::uint32_t>(m.cell);
    const std::vector<std::uint32_t> cell{q % side, q / side};
    m.cell = curve.index(cell);
  }
  std::sort(out.members.begin(), out.members.end(),
            [](const PartitionMember& x, const PartitionMember& y) { return x.cell < y.cell; });
  return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kExponentMax = 6.0;
constexpr double kPlateauMax = 0.8;
constexpr double kAmplitudeMax = 2.0;

}  // namespace

PartitionFamily::PartitionFamily(DiscreteCover cover, FamilySpec spec)
    : cover_(std::move(cover)), spec_(spec) {
  if (cover_.size() == 0) throw Error("empty cover");
  if (spec_.offsets && !(spec_.offset_fraction > 0.0 && spec_.offset_fraction < 1.0))
    throw Error("offset fraction must lie in (0, 1)");
  lower_ = {2.0, 0.0};
  upper_ = {kExponentMax, kPlateauMax};
  const std::size_t n = cover_.size();
  if (spec_.amplitudes) {
    lower_.insert(lower_.end(), n, 0.0);
    upper_.insert(upper_.end(), n, kAmplitudeMax);
  }
  if (spec_.offsets) {
    lower_.insert(lower_.end(), 2 * n, -1.0);
    upper_.insert(upper_.end(), 2 * n, 1.0);
  }
}

BumpProfile PartitionFamily::base_profile() const {
  return {spec_.kind, 2.0, 0.0, spec_.offsets ? spec_.offset_fraction : 0.0};
}

std::vector<double> PartitionFamily::default_theta() const {
  std::vector<double> theta{2.0, 0.0};
  const std::size_t n = cover_.size();
  if (spec_.amplitudes) theta.insert(theta.end(), n, 1.0);
  if (spec_.offsets) theta.insert(theta.end(), 2 * n, 0.0);
  return theta;
}

bool PartitionFamily::admissible(std::span<const double> theta) const {
  if (theta.size() != dimension()) return false;
  for (std::size_t k = 0; k < theta.size(); ++k)
    if (!(theta[k] >= lower_[k] && theta[k] <= upper_[k])) return false;
  return true;
}

Partition PartitionFamily::operator()(std::span<const double> theta) const {
  if (!admissible(theta)) throw Error("partition parameters outside the admissible box");
  BumpProfile profile = base_profile();
  profile.exponent = theta[0];
  profile.plateau = theta[1];
  const std::size_t n = cover_.size();
  std::size_t at = 2;
  std::vector<double> amplitudes(n, 1.0);
  if (spec_.amplitudes) {
    std::copy_n(theta.begin() + static_cast<std::ptrdiff_t>(at), n, amplitudes.begin());
    at += n;
  }
  std::vector<Point2> offsets(n);
  if (spec_.offsets) {
    for (std::size_t k = 0; k < n; ++k) {
      double ox = theta[at + 2 * k];
      double oy = theta[at + 2 * k + 1];
      const double norm = std::hypot(ox, oy);
      if (norm > 1.0) {
        ox /= norm;
        oy /= norm;
      }
      const double bound = profile.offset_fraction * cover_.sets[k].inner_radius();
      offsets[k] = {bound * ox, bound * oy};
    }
  }
  const std::vector<double> weights(n, 1.0);
  return normalized_partition(cover_.surface, PartitionKind::Discrete, cover_.sets, weights, profile,
                              amplitudes, offsets);
}

double lipschitz_estimate(const PartitionFamily& family, std::span<const double> theta, double h) {
  const Partition base = family(theta);
  double worst = 0.0;
  std::vector<double> probe(theta.begin(), theta.end());
  for (std::size_t k = 0; k < probe.size(); ++k) {
    const double saved = probe[k];
    probe[k] = saved + h <= family.upper()[k] ? saved + h : saved - h;
    const Partition moved = family(probe);
    for (std::size_t j = 0; j < base.members.size(); ++j)
      worst = std::max(worst, sup_norm(moved.members[j].field - base.members[j].field) / h);
    probe[k] = saved;
  }
  return worst;
}

}  // namespace pbcover
