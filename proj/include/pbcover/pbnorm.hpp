#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pbcover/coarsen.hpp"
#include "pbcover/partition.hpp"
#include "pbcover/surface.hpp"

namespace pbcover {

/// Dense N x N matrix, row-major.
struct SquareMatrix {
  std::size_t n = 0;
  std::vector<double> values;

  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t size) : n(size), values(size * size, 0.0) {}
  double operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values[i * n + j]; }
};

/// a^T P b.
double bilinear(const SquareMatrix& p, std::span<const int> a, std::span<const int> b);

struct NormResult {
  double value = 0.0;
  std::vector<int> a;  ///< entries +-1
  std::vector<int> b;
};

/// max over a, b in [-1,1]^N of a^T P b, i.e. max over a in {+-1}^N of
/// |a^T P|_1, by Gray-code enumeration of the 2^(N-1) classes a ~ -a.
NormResult inf1_norm_exact(const SquareMatrix& p, std::size_t max_n = 16);

/// Alternating sign ascent (b = sign(a^T P), a = sign(P b)) to a fixpoint,
/// then single flips of a, best over seeded restarts.  A lower bound on the
/// exact value.
NormResult inf1_norm_heuristic(const SquareMatrix& p, int restarts = 32, std::uint64_t seed = 1);

/// Exact value for P = u v^T - v u^T: a^T P b = det(sum a_k g_k, sum b_k g_k)
/// with g_k = (u_k, v_k), maximized over the vertices of the zonotope
/// spanned by the g_k.  O(N^2).
NormResult inf1_norm_rank2(std::span<const double> u, std::span<const double> v);

// ---------------------------------------------------------------------------

/// P_kl(x) = w_k w_l {F_k, F_l}(x) for a partition on a surface.  Kept in
/// factored form: P_kl = u_k v_l - v_k u_l with u_k = w_k dF_k/dx and
/// v_k = w_k dF_k/dy.
class BracketMatrixField {
 public:
  BracketMatrixField(const Partition& partition, const BracketOptions& options = {});

  const ChartedSurface& surface() const { return surface_; }
  std::size_t dimension() const { return n_; }
  std::size_t points() const { return points_; }
  /// Factors at grid point x (length N each).
  std::span<const double> u(std::size_t x) const { return {u_.data() + x * n_, n_}; }
  std::span<const double> v(std::size_t x) const { return {v_.data() + x * n_, n_}; }
  double entry(std::size_t x, std::size_t k, std::size_t l) const;
  SquareMatrix at(std::size_t x) const;
  /// Field of one entry across the grid.
  ScalarField entry_field(std::size_t k, std::size_t l) const;
  /// sum_{k,l} |P_kl(x)|, an upper bound on the box maximum at x.
  double abs_sum(std::size_t x) const;
  /// True when every entry is exactly zero at every grid point.
  bool identically_zero() const;

 private:
  ChartedSurface surface_;
  std::size_t n_ = 0;
  std::size_t points_ = 0;
  std::vector<double> u_;
  std::vector<double> v_;
};

enum class PbMethod { Exact, Heuristic, Rank2, Auto };

std::string to_string(PbMethod method);
PbMethod pb_method_from_string(const std::string& name);

struct PbOptions {
  /// Auto uses the rank-2 evaluator (always exact for surfaces).
  PbMethod method = PbMethod::Auto;
  int restarts = 32;
  std::uint64_t seed = 1;
  std::size_t exact_limit = 16;
  BracketOptions bracket{};
  /// 0 picks the hardware concurrency.
  int threads = 1;
  bool prune = true;
};

struct PbReport {
  double value = 0.0;
  std::vector<int> a;
  std::vector<int> b;
  std::size_t argmax = 0;  ///< grid index
  Point2 point;
  PbMethod method = PbMethod::Auto;  ///< method actually used
  int restarts = 0;
  std::size_t dimension = 0;
  std::size_t evaluated_points = 0;
  /// P vanishes identically on the grid (value 0 is then exact).
  bool zero_certificate = false;
  double seconds = 0.0;
  /// Per-point box maximum (pruned points hold -1).
  std::vector<double> pointwise;
};

PbReport pb_of_bracket_field(const BracketMatrixField& field, const PbOptions& options = {});
PbReport pb_of_partition(const Partition& partition, const PbOptions& options = {});

/// a^T P(x*) b recomputed from the report's witnesses.
double recompute_from_witness(const BracketMatrixField& field, const PbReport& report);

/// sup_x | sum_j a'_j F'_j(x) - sum_s alpha_s w_s F_s(x) | with alpha the
/// interval weight induced by the coarse-graining.
double weight_correspondence_residual(const Partition& continuous, const CoarseGrain& cg,
                                      std::span<const double> a_prime);

}  // namespace pbcover
