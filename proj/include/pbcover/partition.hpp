#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pbcover/cover.hpp"
#include "pbcover/spacefill.hpp"
#include "pbcover/surface.hpp"

namespace pbcover {

enum class ProfileKind { SmoothstepPower, Polynomial, FlatExponential };

std::string to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(const std::string& name);

/// Radial bump on the inner disk.  With s = |u - delta|^2 / r_b^2:
///   smoothstep-power   (1 - w^2)^p,  w = clamp((s - q)/(1 - q), 0, 1)
///   polynomial         (1 - s)^p
///   flat-exponential   exp(-s / (1 - s))
/// where r_b = r_in - offset_bound.
struct BumpProfile {
  ProfileKind kind = ProfileKind::SmoothstepPower;
  double exponent = 2.0;  ///< p >= 2
  double plateau = 0.0;   ///< q in [0, 1)
  /// Largest in-disk centre offset, as a fraction of the inner radius.
  double offset_fraction = 0.0;
};

void validate(const BumpProfile& profile);
/// Profile value at normalized squared radius s (zero for s >= 1).
double profile_value(const BumpProfile& profile, double s);

/// g(x) = amplitude * profile(|G^{-1}(x) - delta|^2 / r_b^2).
ScalarField bump_field(const DiskEmbedding& e, const BumpProfile& profile, double amplitude = 1.0,
                       Point2 offset = {});

// ---------------------------------------------------------------------------

enum class PartitionKind { Discrete, Continuous };

/// One atom of a partition: the field F_k, its quadrature weight (1 for
/// discrete partitions, the t-cell measure for continuous ones), the
/// embedding it is subordinated to and its parameter cell.
struct PartitionMember {
  DiskEmbedding embedding;
  ScalarField field;
  double weight = 1.0;
  std::size_t cell = 0;
};

/// sum_k weight_k F_k = 1.  Identically zero members may be left out.
struct Partition {
  PartitionKind kind = PartitionKind::Discrete;
  ChartedSurface surface;
  /// Number of sets (discrete) or parameter cells (continuous).
  std::size_t cells = 0;
  std::vector<PartitionMember> members;

  std::size_t size() const { return members.size(); }
  ScalarField total() const;
};

Partition canonical_partition(const DiscreteCover& cover, const BumpProfile& profile = {});
Partition canonical_partition(const ContinuousCover& cover, const BumpProfile& profile = {});
/// Continuous partition over the square T (cell a + M b, weight 1/M^2).
Partition canonical_partition(const SquareCover& cover, const BumpProfile& profile = {});

/// Normalized bumps g_k / sum_j w_j g_j with per-set amplitudes and offsets.
/// Throws when some grid point has zero bump mass.
Partition normalized_partition(const ChartedSurface& surface, PartitionKind kind,
                               std::span<const DiskEmbedding> sets, std::span<const double> weights,
                               const BumpProfile& profile, std::span<const double> amplitudes,
                               std::span<const Point2> offsets);

struct PartitionReport {
  double max_deviation = 0.0;  ///< max_x |sum_k w_k F_k(x) - 1|
  double min_value = 0.0;
  bool supports_ok = true;
  std::size_t support_violations = 0;  ///< samples with F > 0 outside the inner disk
  std::size_t first_bad_member = 0;
  bool ok(double tol = 1e-10) const { return max_deviation < tol && min_value >= 0.0 && supports_ok; }
};

PartitionReport verify_partition(const Partition& partition);

/// Extension by rho(x) V_I^{-1} F_I(u, .) along the bicover slab; zero
/// elsewhere.  The result is a continuous partition over the bicover's T-grid.
Partition extend_partition_to_bicover(const Partition& inner, const Bicover& bicover);

/// F_I(i) = F_T(c(i)): the square partition read along the curve (order m
/// with 2^m cells per axis, one I-cell per T-cell).
Partition reparametrize_by_curve(const Partition& square, const HilbertCurve& curve);

// ---------------------------------------------------------------------------

/// Search space for the outer infimum.  theta = [p, q, amplitudes...,
/// offsets (2 per set)...]; amplitudes and offsets are optional blocks.
struct FamilySpec {
  ProfileKind kind = ProfileKind::SmoothstepPower;
  bool amplitudes = true;
  bool offsets = false;
  /// Offset bound as a fraction of the inner radius (offsets only).
  double offset_fraction = 0.25;
};

class PartitionFamily {
 public:
  PartitionFamily(DiscreteCover cover, FamilySpec spec = {});

  const DiscreteCover& cover() const { return cover_; }
  const FamilySpec& spec() const { return spec_; }
  std::size_t dimension() const { return lower_.size(); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  /// The point reproducing canonical_partition(cover, base_profile()).
  std::vector<double> default_theta() const;
  BumpProfile base_profile() const;

  bool admissible(std::span<const double> theta) const;
  /// Throws for theta outside the box or degenerate coverage.
  Partition operator()(std::span<const double> theta) const;

 private:
  DiscreteCover cover_;
  FamilySpec spec_;
  std::vector<double> lower_;
  std::vector<double> upper_;
};

/// max_k sup_x |F(theta + h e_k) - F(theta)| / h over coordinates and
/// fields (finite-difference Lipschitz estimate at theta).
double lipschitz_estimate(const PartitionFamily& family, std::span<const double> theta,
                          double h = 1e-4);

}  // namespace pbcover
