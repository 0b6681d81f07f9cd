#include "pbcover/pbnorm.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>
#include <random>
#include <thread>

namespace pbcover {

namespace {

int sign_of(double x) { return x < 0.0 ? -1 : 1; }

double row_value(const SquareMatrix& p, std::span<const int> a, std::vector<double>& y) {
  const std::size_t n = p.n;
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (a[k] == 0) continue;
    const double s = a[k];
    for (std::size_t l = 0; l < n; ++l) y[l] += s * p(k, l);
  }
  double total = 0.0;
  for (double t : y) total += std::abs(t);
  return total;
}

std::vector<int> signs_of(std::span<const double> y) {
  std::vector<int> out(y.size());
  for (std::size_t l = 0; l < y.size(); ++l) out[l] = sign_of(y[l]);
  return out;
}

}  // namespace

double bilinear(const SquareMatrix& p, std::span<const int> a, std::span<const int> b) {
  if (a.size() != p.n || b.size() != p.n) throw Error("weight vectors do not match the matrix size");
  double total = 0.0;
  for (std::size_t k = 0; k < p.n; ++k) {
    if (a[k] == 0) continue;
    double row = 0.0;
    for (std::size_t l = 0; l < p.n; ++l) row += p(k, l) * b[l];
    total += a[k] * row;
  }
  return total;
}

NormResult inf1_norm_exact(const SquareMatrix& p, std::size_t max_n) {
  const std::size_t n = p.n;
  if (n > max_n)
    throw Error("matrix size " + std::to_string(n) + " exceeds the exact enumeration limit " +
                std::to_string(max_n));
  if (n > 62) throw Error("matrix too large for exact enumeration");
  NormResult best;
  best.a.assign(n, 1);
  best.b.assign(n, 1);
  if (n == 0) return best;
  std::vector<int> a(n, 1);
  std::vector<double> y(n);
  best.value = row_value(p, a, y);
  best.b = signs_of(y);
  // Gray code over a_1..a_{n-1} with a_0 = +1 fixed.
  const std::uint64_t classes = std::uint64_t{1} << (n - 1);
  for (std::uint64_t step = 1; step < classes; ++step) {
    const std::size_t k = static_cast<std::size_t>(std::countr_zero(step)) + 1;
    const double s = -2.0 * a[k];
    a[k] = -a[k];
    double total = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      y[l] += s * p(k, l);
      total += std::abs(y[l]);
    }
    if (total > best.value) {
      best.value = total;
      best.a = a;
      best.b = signs_of(y);
    }
  }
  // Recompute from the witnesses so the value matches them exactly.
  best.value = bilinear(p, best.a, best.b);
  return best;
}

NormResult inf1_norm_heuristic(const SquareMatrix& p, int restarts, std::uint64_t seed) {
  if (restarts < 1) throw Error("heuristic needs at least one restart");
  const std::size_t n = p.n;
  NormResult best;
  best.a.assign(n, 1);
  best.b.assign(n, 1);
  if (n == 0) return best;
  best.value = -1.0;
  std::vector<double> y(n), z(n);
  for (int r = 0; r < restarts; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    std::vector<int> a(n);
    for (auto& x : a) x = (rng() & 1U) ? 1 : -1;
    if (r == 0) std::fill(a.begin(), a.end(), 1);
    double value = row_value(p, a, y);
    for (;;) {
      bool improved = false;
      // b = sign(a^T P), then a = sign(P b).
      const auto b = signs_of(y);
      for (std::size_t k = 0; k < n; ++k) {
        double t = 0.0;
        for (std::size_t l = 0; l < n; ++l) t += p(k, l) * b[l];
        z[k] = t;
      }
      auto next = signs_of(z);
      const double v = row_value(p, next, y);
      if (v > value * (1.0 + 1e-15) + 1e-300) {
        a = std::move(next);
        value = v;
        improved = true;
      } else {
        row_value(p, a, y);
      }
      // Single flips.
      for (std::size_t k = 0; k < n && !improved; ++k) {
        double total = 0.0;
        const double s = -2.0 * a[k];
        for (std::size_t l = 0; l < n; ++l) total += std::abs(y[l] + s * p(k, l));
        if (total > value * (1.0 + 1e-15) + 1e-300) {
          a[k] = -a[k];
          value = row_value(p, a, y);
          improved = true;
        }
      }
      if (!improved) break;
    }
    if (value > best.value) {
      best.value = value;
      best.a = a;
      best.b = signs_of(y);
    }
  }
  best.value = bilinear(p, best.a, best.b);
  return best;
}

NormResult inf1_norm_rank2(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw Error("rank-2 factors differ in length");
  const std::size_t n = u.size();
  NormResult best;
  best.a.assign(n, 1);
  best.b.assign(n, 1);
  // Normal directions of the generators, folded to [0, pi).
  std::vector<double> angles;
  angles.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (u[k] == 0.0 && v[k] == 0.0) continue;
    double phi = std::atan2(v[k], u[k]) + 0.5 * std::numbers::pi;
    phi = std::fmod(phi, std::numbers::pi);
    if (phi < 0.0) phi += std::numbers::pi;
    angles.push_back(phi);
  }
  if (angles.empty()) return best;
  std::sort(angles.begin(), angles.end());
  angles.erase(std::unique(angles.begin(), angles.end()), angles.end());

  std::vector<int> a(n);
  double best_value = -1.0;
  const std::size_t m = angles.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double lo = angles[i];
    const double hi = i + 1 < m ? angles[i + 1] : angles[0] + std::numbers::pi;
    const double mid = 0.5 * (lo + hi);
    const double dx = std::cos(mid), dy = std::sin(mid);
    double px = 0.0, py = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      a[k] = sign_of(u[k] * dx + v[k] * dy);
      px += a[k] * u[k];
      py += a[k] * v[k];
    }
    // max over q of det(p, q) = sum_k |det(p, g_k)|.
    double value = 0.0;
    for (std::size_t k = 0; k < n; ++k) value += std::abs(px * v[k] - py * u[k]);
    if (value > best_value) {
      best_value = value;
      best.a = a;
      for (std::size_t k = 0; k < n; ++k) best.b[k] = sign_of(px * v[k] - py * u[k]);
    }
  }
  // a^T P b with P = u v^T - v u^T.
  double au = 0.0, av = 0.0, bu = 0.0, bv = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    au += best.a[k] * u[k];
    av += best.a[k] * v[k];
    bu += best.b[k] * u[k];
    bv += best.b[k] * v[k];
  }
  best.value = au * bv - av * bu;
  if (best.value < 0.0) {
    for (int& x : best.b) x = -x;
    best.value = -best.value;
  }
  return best;
}

// ---------------------------------------------------------------------------

BracketMatrixField::BracketMatrixField(const Partition& partition, const BracketOptions& options)
    : surface_(partition.surface), n_(partition.members.size()), points_(partition.surface.size()) {
  if (options.polar == PolarPolicy::Strict && surface_.kind() == SurfaceKind::Sphere) {
    std::size_t varying = 0;
    for (const auto& m : partition.members)
      if (!constant_on_polar_bands(m.field, options.order)) ++varying;
    if (varying > 1)
      throw Error("several partition functions vary inside a polar band; use the mask policy");
  }
  u_.assign(points_ * n_, 0.0);
  v_.assign(points_ * n_, 0.0);
  for (std::size_t k = 0; k < n_; ++k) {
    const auto& m = partition.members[k];
    if (!(m.field.surface() == surface_)) throw Error("partition member lives on a different grid");
    const Gradient g = gradient(m.field, options.order);
    for (std::size_t x = 0; x < points_; ++x) {
      u_[x * n_ + k] = m.weight * g.dx[x];
      v_[x * n_ + k] = m.weight * g.dy[x];
    }
  }
  if (options.eliminate_last && n_ > 0) {
    for (std::size_t x = 0; x < points_; ++x) {
      double su = 0.0, sv = 0.0;
      for (std::size_t k = 0; k + 1 < n_; ++k) su += u_[x * n_ + k], sv += v_[x * n_ + k];
      u_[x * n_ + n_ - 1] = -su;
      v_[x * n_ + n_ - 1] = -sv;
    }
  }
}

double BracketMatrixField::entry(std::size_t x, std::size_t k, std::size_t l) const {
  const std::size_t o = x * n_;
  return u_[o + k] * v_[o + l] - v_[o + k] * u_[o + l];
}

SquareMatrix BracketMatrixField::at(std::size_t x) const {
  SquareMatrix p(n_);
  for (std::size_t k = 0; k < n_; ++k)
    for (std::size_t l = k + 1; l < n_; ++l) {
      const double e = entry(x, k, l);
      p(k, l) = e;
      p(l, k) = -e;
    }
  return p;
}

ScalarField BracketMatrixField::entry_field(std::size_t k, std::size_t l) const {
  if (k >= n_ || l >= n_) throw Error("bracket matrix index out of range");
  ScalarField f(surface_);
  for (std::size_t x = 0; x < points_; ++x) f[x] = entry(x, k, l);
  return f;
}

double BracketMatrixField::abs_sum(std::size_t x) const {
  // sum_{k,l} |u_k v_l - v_k u_l| <= 2 (sum |u|)(sum |v|).
  double su = 0.0, sv = 0.0;
  const std::size_t o = x * n_;
  for (std::size_t k = 0; k < n_; ++k) {
    su += std::abs(u_[o + k]);
    sv += std::abs(v_[o + k]);
  }
  return 2.0 * su * sv;
}

bool BracketMatrixField::identically_zero() const {
  for (std::size_t x = 0; x < points_; ++x)
    for (std::size_t k = 0; k < n_; ++k)
      for (std::size_t l = k + 1; l < n_; ++l)
        if (entry(x, k, l) != 0.0) return false;
  return true;
}

// ---------------------------------------------------------------------------

std::string to_string(PbMethod method) {
  switch (method) {
    case PbMethod::Exact: return "exact";
    case PbMethod::Heuristic: return "heuristic";
    case PbMethod::Rank2: return "rank2";
    case PbMethod::Auto: return "auto";
  }
  return "auto";
}

PbMethod pb_method_from_string(const std::string& name) {
  for (auto m : {PbMethod::Exact, PbMethod::Heuristic, PbMethod::Rank2, PbMethod::Auto})
    if (to_string(m) == name) return m;
  throw Error("unknown pb method '" + name + "'");
}

PbReport pb_of_bracket_field(const BracketMatrixField& field, const PbOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  PbReport report;
  const std::size_t n = field.dimension();
  const std::size_t points = field.points();
  report.dimension = n;
  report.method = options.method == PbMethod::Auto ? PbMethod::Rank2 : options.method;
  if (report.method == PbMethod::Exact && n > options.exact_limit)
    throw Error("set count " + std::to_string(n) + " exceeds the exact limit; use the heuristic or rank2 method");
  report.restarts = report.method == PbMethod::Heuristic ? options.restarts : 0;
  report.a.assign(n, 1);
  report.b.assign(n, 1);
  report.pointwise.assign(points, -1.0);

  auto solve = [&](std::size_t x) -> NormResult {
    switch (report.method) {
      case PbMethod::Exact: return inf1_norm_exact(field.at(x), options.exact_limit);
      case PbMethod::Heuristic: return inf1_norm_heuristic(field.at(x), options.restarts, options.seed);
      default: return inf1_norm_rank2(field.u(x), field.v(x));
    }
  };

  // Largest bounds first so the incumbent tightens early.
  std::vector<double> bound(points);
  for (std::size_t x = 0; x < points; ++x) bound[x] = field.abs_sum(x);
  std::vector<std::size_t> order(points);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) { return bound[p] > bound[q]; });

  int threads = options.threads > 0 ? options.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, static_cast<int>(std::max<std::size_t>(points / 64, 1))));

  std::mutex mutex;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> evaluated{0};
  double incumbent = -1.0;
  std::size_t best_x = points;
  NormResult best;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= points) return;
      const std::size_t x = order[i];
      if (options.prune) {
        std::lock_guard lock(mutex);
        if (bound[x] < incumbent) continue;
      }
      NormResult r = solve(x);
      evaluated.fetch_add(1);
      std::lock_guard lock(mutex);
      report.pointwise[x] = r.value;
      if (r.value > incumbent || (r.value == incumbent && x < best_x)) {
        incumbent = r.value;
        best_x = x;
        best = std::move(r);
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  report.evaluated_points = evaluated.load();
  if (best_x < points) {
    report.value = std::max(0.0, best.value);
    report.a = std::move(best.a);
    report.b = std::move(best.b);
    report.argmax = best_x;
    report.point = field.surface().point(best_x);
  }
  report.zero_certificate = field.identically_zero();
  if (report.zero_certificate) report.value = 0.0;
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

PbReport pb_of_partition(const Partition& partition, const PbOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const BracketMatrixField field(partition, options.bracket);
  PbReport report = pb_of_bracket_field(field, options);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

double recompute_from_witness(const BracketMatrixField& field, const PbReport& report) {
  if (report.a.size() != field.dimension() || report.b.size() != field.dimension())
    throw Error("witness size does not match the bracket field");
  return bilinear(field.at(report.argmax), report.a, report.b);
}

double weight_correspondence_residual(const Partition& continuous, const CoarseGrain& cg,
                                      std::span<const double> a_prime) {
  if (continuous.kind != PartitionKind::Continuous || continuous.cells != cg.windows * cg.per_window)
    throw Error("continuous partition does not match the coarse-graining");
  const auto alpha = induced_interval_weight(cg, a_prime);
  ScalarField lhs(continuous.surface), rhs(continuous.surface);
  for (const auto& m : cg.partition.members) lhs.axpy(a_prime[m.cell], m.field);
  for (const auto& m : continuous.members) rhs.axpy(alpha[m.cell] * m.weight, m.field);
  double worst = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) worst = std::max(worst, std::abs(lhs[i] - rhs[i]));
  return worst;
}

}  // namespace pbcover
