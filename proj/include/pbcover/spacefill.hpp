#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pbcover/surface.hpp"

namespace pbcover {

/// Exact rational with 64-bit parts, always reduced with a positive denominator.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  /// Exact conversion of a dyadic double (denominator at most 2^62).
  static Rational from_dyadic(double v);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend bool operator==(const Rational&, const Rational&) = default;
  friend bool operator<(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::string to_string(const Rational& r);

/// A level-k dyadic cell of [0,1]^d: coordinates in [0, 2^k).
struct DyadicCell {
  int level = 0;
  std::vector<std::uint32_t> coords;
};

/// d-dimensional Hilbert curve of finite order m.
///
/// Orientation convention "hamilton-gray": the classical base pattern is the
/// binary reflected Gray code; each sub-cell w is entered at the corner
/// e(w) = gc(2*floor((w-1)/2)) and traversed along intra-direction d(w), with
/// the state carried top-down so every order refines the previous one.  The
/// curve enters the cube at the origin.  For d = 2 the order-1 visit order is
/// (0,0), (0,1), (1,1), (1,0) in cell units and the curve exits at (1,0).
class HilbertCurve {
 public:
  static constexpr const char* kConvention = "hamilton-gray";

  HilbertCurve(int dimension, int order);

  int dimension() const { return dimension_; }
  int order() const { return order_; }
  /// 2^(d*m)
  std::uint64_t cell_count() const { return std::uint64_t{1} << (dimension_ * order_); }

  /// Order-m cell visited by the index-th curve interval.
  std::vector<std::uint32_t> cell(std::uint64_t index) const;
  /// Inverse of cell().
  std::uint64_t index(std::span<const std::uint32_t> cell) const;
  /// Linearized cell coordinate, axis 0 fastest.
  std::uint64_t flat_cell(std::span<const std::uint32_t> cell) const;

  /// Corner where the limit curve enters / leaves the index-th cell, in
  /// lattice units of 2^-m.
  std::vector<std::uint32_t> entry_corner(std::uint64_t index) const;
  std::vector<std::uint32_t> exit_corner(std::uint64_t index) const;

  /// Order-m approximant: piecewise-linear interpolation of the limit curve
  /// between its exact values at t = i / 2^(d m).  Exact at those nodes, so
  /// consecutive orders differ by at most sqrt(d) 2^-m.
  std::vector<double> point(double t) const;

  /// Centre of the order-m cell visited at parameter t (the cell map used
  /// for quadrature of f o c).
  std::vector<double> cell_center(double t) const;

 private:
  std::vector<std::uint32_t> cell_at_order(std::uint64_t index, int order) const;

  int dimension_;
  int order_;
};

/// Preimage measure of a dyadic cell under the curve, by enumeration of the
/// order-m curve intervals mapped into the cell.  Exact.
Rational preimage_measure(const HilbertCurve& curve, const DyadicCell& cell);

/// Number of order-m curve intervals landing in each level-k cell (flat cell
/// index, axis 0 fastest).  The measure of cell q is counts[q] / 2^(d m).
std::vector<std::uint64_t> preimage_counts(const HilbertCurve& curve, int level);

/// True when every level-k cell (k <= m) has preimage measure exactly
/// 2^(-d k) and each level-k curve interval lies inside a single level-k cell.
struct MeasureCheck {
  bool ok = true;
  int failing_level = -1;
  std::uint64_t failing_cell = 0;
  Rational measure;
};
MeasureCheck check_measure_preservation(const HilbertCurve& curve);

// ---------------------------------------------------------------------------

/// Axis-aligned box in [0,1]^d with dyadic corners.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};

/// Symmetry of the unit cube: q -> (flip_j ? 1 - q_{perm_j} : q_{perm_j}).
struct CubeSymmetry {
  std::vector<int> perm;
  std::vector<bool> flip;
  std::vector<double> apply(std::span<const double> q) const;
};

/// Boxes tiling the parameter square/cube T = [0,1]^d, in curve order.
struct CubePaving {
  int dimension = 0;
  std::vector<Box> boxes;
  std::vector<Rational> volumes;  ///< exact, sum to 1
};

/// Validates the tiling (exact total volume 1, pairwise disjoint interiors,
/// consecutive boxes touching).
CubePaving make_paving(int dimension, std::vector<Box> boxes);

/// Regular 2^k-per-axis paving visited in the order of a level-k Hilbert curve.
CubePaving hilbert_ordered_paving(int dimension, int level);

/// Concatenation of per-box Hilbert curves c_k(u) = phi_k(c_H((u - U_{k-1})/V_k))
/// with affine measure-preserving phi_k (box scaling composed with a cube
/// symmetry chosen so consecutive pieces share endpoints).
class PavedCurve {
 public:
  PavedCurve(CubePaving paving, int order);

  const CubePaving& paving() const { return paving_; }
  const HilbertCurve& curve() const { return curve_; }
  const std::vector<CubeSymmetry>& symmetries() const { return symmetries_; }
  int dimension() const { return paving_.dimension; }

  std::vector<double> point(double u) const;
  std::vector<double> cell_center(double u) const;
  /// Exact preimage measure of a dyadic box (closed box with dyadic corners).
  Rational preimage_measure(const Box& target) const;

 private:
  friend PavedCurve concat_paving_curve(const CubePaving& paving, int order);

  std::size_t piece(double u, double* local) const;
  std::vector<double> to_box(std::size_t k, std::span<const double> q) const;

  CubePaving paving_;
  HilbertCurve curve_;
  std::vector<CubeSymmetry> symmetries_;
  std::vector<double> offsets_;  ///< U_{k-1}
};

/// Builds the concatenated curve; throws when no choice of cube symmetries
/// makes consecutive pieces share endpoints.
PavedCurve concat_paving_curve(const CubePaving& paving, int order);

// ---------------------------------------------------------------------------

/// Piecewise-constant weight on I = [0,1] with values in [-1,1].
class IntervalWeight {
 public:
  IntervalWeight(std::vector<double> breakpoints, std::vector<double> values);
  static IntervalWeight constant(double value);
  /// Uniform pieces of length 1/values.size().
  static IntervalWeight uniform(std::vector<double> values);

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }
  double value_at(double u) const;
  /// Mean of the weight over [a, b].
  double average(double a, double b) const;
  /// True when every breakpoint is a multiple of 2^-level.
  bool aligned_to(int level) const;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

/// Piecewise-constant weight on the order-m cells of [0,1]^d (flat index,
/// axis 0 fastest).
struct CellWeight {
  int dimension = 0;
  int level = 0;
  std::vector<double> values;
  /// False when the source weight was not aligned with the curve's dyadic
  /// intervals; values are then conditional averages.
  bool exact = true;
};

/// Radon-Nikodym density of the pushforward of alpha(u) du by the curve.
CellWeight pushforward_weight(const IntervalWeight& alpha, const HilbertCurve& curve);

/// |midpoint quadrature of f on [0,1]^d - (1/n) sum_j f(c(u_j))| with
/// u_j = (j + 1/2)/n and c the cell map.  n must be a power of two.
using CubeFunction = std::function<double(std::span<const double>)>;
double change_of_variables_residual(const CubeFunction& f, const HilbertCurve& curve,
                                    std::uint64_t n_samples);
double change_of_variables_residual(const CubeFunction& f, const PavedCurve& curve,
                                    std::uint64_t n_samples);

/// CSV with header `t,x1,...,xd` of the approximant at n+1 uniform t values.
void write_curve_csv(std::ostream& out, const HilbertCurve& curve, std::size_t n);

}  // namespace pbcover
