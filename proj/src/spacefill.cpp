#include "pbcover/spacefill.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace pbcover {

// --------------------------------------------------------------- Rational --

namespace {

__extension__ typedef __int128 i128;

Rational reduce(i128 num, i128 den) {
  if (den == 0) throw Error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 a = num < 0 ? -num : num;
  i128 b = den;
  while (b != 0) {
    const i128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  constexpr i128 limit = static_cast<i128>(INT64_MAX);
  if (num > limit || num < -limit || den > limit) throw Error("rational overflow");
  return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g > 1 ? num / g : num;
  den_ = g > 1 ? den / g : den;
}

Rational Rational::from_dyadic(double v) {
  if (!std::isfinite(v)) throw Error("non-finite value is not dyadic");
  if (v == 0.0) return Rational(0);
  int exp = 0;
  const double mant = std::frexp(v, &exp);  // v = mant * 2^exp, |mant| in [0.5, 1)
  auto m = static_cast<std::int64_t>(std::ldexp(mant, 53));
  int shift = exp - 53;
  while (shift < 0 && (m % 2) == 0) {
    m /= 2;
    ++shift;
  }
  if (shift >= 0) {
    if (shift > 62 || std::abs(m) > (INT64_MAX >> shift)) throw Error("dyadic value too large");
    return Rational(m << shift);
  }
  if (-shift > 62) throw Error("dyadic denominator exceeds 2^62");
  return Rational(m, std::int64_t{1} << (-shift));
}

Rational operator+(const Rational& a, const Rational& b) {
  return reduce(static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_,
                static_cast<i128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
  return reduce(static_cast<i128>(a.num_) * b.den_ - static_cast<i128>(b.num_) * a.den_,
                static_cast<i128>(a.den_) * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
  return reduce(static_cast<i128>(a.num_) * b.num_, static_cast<i128>(a.den_) * b.den_);
}

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<i128>(a.num_) * b.den_ < static_cast<i128>(b.num_) * a.den_;
}

std::string to_string(const Rational& r) {
  return std::to_string(r.num()) + "/" + std::to_string(r.den());
}

// ----------------------------------------------------------- Hilbert curve --

namespace {

std::uint64_t gray(std::uint64_t i) { return i ^ (i >> 1); }

std::uint64_t gray_inverse(std::uint64_t g) {
  std::uint64_t i = g;
  for (std::uint64_t s = g >> 1; s != 0; s >>= 1) i ^= s;
  return i;
}

int trailing_set_bits(std::uint64_t i) {
  int n = 0;
  while (i & 1U) {
    ++n;
    i >>= 1;
  }
  return n;
}

std::uint64_t rotl(std::uint64_t x, int k, int n) {
  const std::uint64_t mask = (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
  k %= n;
  if (k == 0) return x & mask;
  return ((x << k) | (x >> (n - k))) & mask;
}

std::uint64_t rotr(std::uint64_t x, int k, int n) { return rotl(x, n - (k % n), n); }

// Entry corner of sub-cell w in the base Gray-code pattern.
std::uint64_t entry_of(std::uint64_t w) {
  if (w == 0) return 0;
  return gray(2 * ((w - 1) / 2));
}

// Intra-cell direction of sub-cell w.
int direction_of(std::uint64_t w, int n) {
  if (w == 0) return 0;
  if (w % 2 == 0) return trailing_set_bits(w - 1) % n;
  return trailing_set_bits(w) % n;
}

}  // namespace

HilbertCurve::HilbertCurve(int dimension, int order) : dimension_(dimension), order_(order) {
  if (dimension < 1) throw Error("Hilbert curve dimension must be >= 1");
  if (order < 1) throw Error("Hilbert curve order must be >= 1");
  if (dimension * (order + 1) > 62) throw Error("Hilbert curve too fine for 64-bit indices");
}

std::vector<std::uint32_t> HilbertCurve::cell_at_order(std::uint64_t h, int order) const {
  const int n = dimension_;
  std::vector<std::uint32_t> p(static_cast<std::size_t>(n), 0);
  std::uint64_t e = 0;
  int d = 0;
  const std::uint64_t digit_mask = (std::uint64_t{1} << n) - 1;
  for (int i = order - 1; i >= 0; --i) {
    const std::uint64_t w = (h >> (i * n)) & digit_mask;
    const std::uint64_t l = rotl(gray(w), d + 1, n) ^ e;
    for (int j = 0; j < n; ++j)
      p[static_cast<std::size_t>(j)] |= static_cast<std::uint32_t>((l >> j) & 1U) << i;
    e ^= rotl(entry_of(w), d + 1, n);
    d = (d + direction_of(w, n) + 1) % n;
  }
  return p;
}

std::vector<std::uint32_t> HilbertCurve::cell(std::uint64_t index) const {
  if (index >= cell_count()) throw Error("Hilbert index out of range");
  return cell_at_order(index, order_);
}

std::uint64_t HilbertCurve::index(std::span<const std::uint32_t> cell) const {
  const int n = dimension_;
  if (cell.size() != static_cast<std::size_t>(n)) throw Error("cell dimension mismatch");
  std::uint64_t h = 0;
  std::uint64_t e = 0;
  int d = 0;
  for (int i = order_ - 1; i >= 0; --i) {
    std::uint64_t l = 0;
    for (int j = 0; j < n; ++j) l |= static_cast<std::uint64_t>((cell[j] >> i) & 1U) << j;
    const std::uint64_t w = gray_inverse(rotr(l ^ e, d + 1, n));
    e ^= rotl(entry_of(w), d + 1, n);
    d = (d + direction_of(w, n) + 1) % n;
    h = (h << n) | w;
  }
  return h;
}

std::uint64_t HilbertCurve::flat_cell(std::span<const std::uint32_t> cell) const {
  std::uint64_t flat = 0;
  for (int j = dimension_ - 1; j >= 0; --j) flat = (flat << order_) | cell[j];
  return flat;
}

std::vector<std::uint32_t> HilbertCurve::entry_corner(std::uint64_t index) const {
  auto p = cell(index);
  const auto sub = cell_at_order(index << dimension_, order_ + 1);
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = p[j] + (sub[j] - 2 * p[j]);
  return p;
}

std::vector<std::uint32_t> HilbertCurve::exit_corner(std::uint64_t index) const {
  auto p = cell(index);
  const std::uint64_t last = (index << dimension_) | ((std::uint64_t{1} << dimension_) - 1);
  const auto sub = cell_at_order(last, order_ + 1);
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = p[j] + (sub[j] - 2 * p[j]);
  return p;
}

std::vector<double> HilbertCurve::point(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw Error("curve parameter outside [0,1]");
  const std::uint64_t n = cell_count();
  const double s = t * static_cast<double>(n);
  auto i = static_cast<std::uint64_t>(std::floor(s));
  if (i >= n) i = n - 1;
  const double frac = s - static_cast<double>(i);
  const auto a = entry_corner(i);
  const auto b = exit_corner(i);
  const double scale = std::ldexp(1.0, -order_);
  std::vector<double> out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double aj = a[j];
    const double bj = b[j];
    out[j] = (aj + frac * (bj - aj)) * scale;
  }
  return out;
}

std::vector<double> HilbertCurve::cell_center(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw Error("curve parameter outside [0,1]");
  const std::uint64_t n = cell_count();
  auto i = static_cast<std::uint64_t>(std::floor(t * static_cast<double>(n)));
  if (i >= n) i = n - 1;
  const auto c = cell(i);
  const double scale = std::ldexp(1.0, -order_);
  std::vector<double> out(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) out[j] = (c[j] + 0.5) * scale;
  return out;
}

Rational preimage_measure(const HilbertCurve& curve, const DyadicCell& target) {
  const int m = curve.order();
  if (target.level < 0 || target.level > m) throw Error("cell level exceeds curve order");
  if (target.coords.size() != static_cast<std::size_t>(curve.dimension()))
    throw Error("cell dimension mismatch");
  const int shift = m - target.level;
  std::uint64_t count = 0;
  for (std::uint64_t i = 0; i < curve.cell_count(); ++i) {
    const auto c = curve.cell(i);
    bool inside = true;
    for (std::size_t j = 0; j < c.size() && inside; ++j)
      inside = (c[j] >> shift) == target.coords[j];
    if (inside) ++count;
  }
  return Rational(static_cast<std::int64_t>(count), static_cast<std::int64_t>(curve.cell_count()));
}

std::vector<std::uint64_t> preimage_counts(const HilbertCurve& curve, int level) {
  const int m = curve.order();
  const int d = curve.dimension();
  if (level < 0 || level > m) throw Error("cell level exceeds curve order");
  std::vector<std::uint64_t> counts(std::size_t{1} << (d * level), 0);
  const int shift = m - level;
  for (std::uint64_t i = 0; i < curve.cell_count(); ++i) {
    const auto c = curve.cell(i);
    std::uint64_t flat = 0;
    for (int j = d - 1; j >= 0; --j) flat = (flat << level) | (c[j] >> shift);
    ++counts[flat];
  }
  return counts;
}

MeasureCheck check_measure_preservation(const HilbertCurve& curve) {
  const int m = curve.order();
  const int d = curve.dimension();
  const std::uint64_t n = curve.cell_count();
  std::vector<std::vector<std::uint32_t>> cells(n);
  for (std::uint64_t i = 0; i < n; ++i) cells[i] = curve.cell(i);

  MeasureCheck result;
  for (int k = 0; k <= m; ++k) {
    const int shift = m - k;
    const std::uint64_t per_interval = std::uint64_t{1} << (d * shift);
    std::vector<std::uint64_t> counts(std::size_t{1} << (d * k), 0);
    for (std::uint64_t i = 0; i < n; ++i) {
      std::uint64_t flat = 0;
      for (int j = d - 1; j >= 0; --j) flat = (flat << k) | (cells[i][j] >> shift);
      ++counts[flat];
      // Nesting: a level-k interval stays inside the cell of its first index.
      const std::uint64_t first = (i / per_interval) * per_interval;
      for (int j = 0; j < d; ++j) {
        if ((cells[i][j] >> shift) != (cells[first][j] >> shift)) {
          result.ok = false;
          result.failing_level = k;
          result.failing_cell = flat;
          result.measure = Rational(-1);
          return result;
        }
      }
    }
    const Rational expected(1, static_cast<std::int64_t>(std::uint64_t{1} << (d * k)));
    for (std::uint64_t q = 0; q < counts.size(); ++q) {
      const Rational measure(static_cast<std::int64_t>(counts[q]), static_cast<std::int64_t>(n));
      if (!(measure == expected)) {
        result.ok = false;
        result.failing_level = k;
        result.failing_cell = q;
        result.measure = measure;
        return result;
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------- paving --

std::vector<double> CubeSymmetry::apply(std::span<const double> q) const {
  std::vector<double> out(perm.size());
  for (std::size_t j = 0; j < perm.size(); ++j) {
    const double v = q[static_cast<std::size_t>(perm[j])];
    out[j] = flip[j] ? 1.0 - v : v;
  }
  return out;
}

namespace {

std::vector<CubeSymmetry> all_symmetries(int d) {
  std::vector<CubeSymmetry> out;
  std::vector<int> perm(static_cast<std::size_t>(d));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    for (std::uint32_t mask = 0; mask < (1U << d); ++mask) {
      CubeSymmetry s;
      s.perm = perm;
      s.flip.resize(static_cast<std::size_t>(d));
      for (int j = 0; j < d; ++j) s.flip[static_cast<std::size_t>(j)] = (mask >> j) & 1U;
      out.push_back(std::move(s));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

bool boxes_touch(const Box& a, const Box& b) {
  for (std::size_t j = 0; j < a.lo.size(); ++j)
    if (a.lo[j] > b.hi[j] || b.lo[j] > a.hi[j]) return false;
  return true;
}

bool interiors_overlap(const Box& a, const Box& b) {
  for (std::size_t j = 0; j < a.lo.size(); ++j)
    if (a.hi[j] <= b.lo[j] || b.hi[j] <= a.lo[j]) return false;
  return true;
}

}  // namespace

CubePaving make_paving(int dimension, std::vector<Box> boxes) {
  if (dimension < 1) throw Error("paving dimension must be >= 1");
  if (boxes.empty()) throw Error("empty paving");
  CubePaving p;
  p.dimension = dimension;
  Rational total(0);
  for (const auto& b : boxes) {
    if (b.lo.size() != static_cast<std::size_t>(dimension) || b.hi.size() != b.lo.size())
      throw Error("paving box dimension mismatch");
    Rational vol(1);
    for (std::size_t j = 0; j < b.lo.size(); ++j) {
      if (!(b.lo[j] >= 0.0 && b.hi[j] <= 1.0 && b.lo[j] < b.hi[j]))
        throw Error("paving box outside the unit cube or degenerate");
      vol = vol * (Rational::from_dyadic(b.hi[j]) - Rational::from_dyadic(b.lo[j]));
    }
    p.volumes.push_back(vol);
    total = total + vol;
  }
  if (!(total == Rational(1))) throw Error("paving volumes sum to " + to_string(total) + ", not 1");
  for (std::size_t a = 0; a < boxes.size(); ++a)
    for (std::size_t b = a + 1; b < boxes.size(); ++b)
      if (interiors_overlap(boxes[a], boxes[b])) throw Error("paving boxes overlap");
  for (std::size_t k = 0; k + 1 < boxes.size(); ++k)
    if (!boxes_touch(boxes[k], boxes[k + 1]))
      throw Error("consecutive paving boxes do not share a boundary point");
  p.boxes = std::move(boxes);
  return p;
}

CubePaving hilbert_ordered_paving(int dimension, int level) {
  const HilbertCurve curve(dimension, level);
  const double side = std::ldexp(1.0, -level);
  std::vector<Box> boxes;
  for (std::uint64_t i = 0; i < curve.cell_count(); ++i) {
    const auto c = curve.cell(i);
    Box b;
    for (auto v : c) {
      b.lo.push_back(v * side);
      b.hi.push_back((v + 1) * side);
    }
    boxes.push_back(std::move(b));
  }
  return make_paving(dimension, std::move(boxes));
}

PavedCurve::PavedCurve(CubePaving paving, int order)
    : paving_(std::move(paving)), curve_(paving_.dimension, order) {}

std::vector<double> PavedCurve::to_box(std::size_t k, std::span<const double> q) const {
  const auto sq = symmetries_[k].apply(q);
  const Box& b = paving_.boxes[k];
  std::vector<double> out(sq.size());
  for (std::size_t j = 0; j < sq.size(); ++j) out[j] = b.lo[j] + (b.hi[j] - b.lo[j]) * sq[j];
  return out;
}

std::size_t PavedCurve::piece(double u, double* local) const {
  if (!(u >= 0.0 && u <= 1.0)) throw Error("curve parameter outside [0,1]");
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), u);
  std::size_t k = static_cast<std::size_t>(it - offsets_.begin()) - 1;
  if (k >= paving_.boxes.size()) k = paving_.boxes.size() - 1;
  const double v = paving_.volumes[k].to_double();
  *local = std::clamp((u - offsets_[k]) / v, 0.0, 1.0);
  return k;
}

std::vector<double> PavedCurve::point(double u) const {
  double s = 0.0;
  const std::size_t k = piece(u, &s);
  return to_box(k, curve_.point(s));
}

std::vector<double> PavedCurve::cell_center(double u) const {
  double s = 0.0;
  const std::size_t k = piece(u, &s);
  return to_box(k, curve_.cell_center(s));
}

Rational PavedCurve::preimage_measure(const Box& target) const {
  const int d = dimension();
  const double scale = std::ldexp(1.0, -curve_.order());
  Rational total(0);
  const Rational per_cell(1, static_cast<std::int64_t>(curve_.cell_count()));
  for (std::size_t k = 0; k < paving_.boxes.size(); ++k) {
    std::int64_t count = 0;
    for (std::uint64_t i = 0; i < curve_.cell_count(); ++i) {
      const auto c = curve_.cell(i);
      std::vector<double> lo(static_cast<std::size_t>(d));
      std::vector<double> hi(static_cast<std::size_t>(d));
      for (int j = 0; j < d; ++j) {
        lo[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j)] * scale;
        hi[static_cast<std::size_t>(j)] = (c[static_cast<std::size_t>(j)] + 1) * scale;
      }
      const auto a = to_box(k, lo);
      const auto b = to_box(k, hi);
      bool inside = true;
      for (std::size_t j = 0; j < a.size() && inside; ++j) {
        const double l = std::min(a[j], b[j]);
        const double h = std::max(a[j], b[j]);
        inside = l >= target.lo[j] && h <= target.hi[j];
      }
      if (inside) ++count;
    }
    total = total + Rational(count) * per_cell * paving_.volumes[k];
  }
  return total;
}

PavedCurve concat_paving_curve(const CubePaving& paving, int order) {
  PavedCurve pc(paving, order);
  const int d = paving.dimension;
  const auto candidates = all_symmetries(d);
  const std::size_t n = paving.boxes.size();

  const auto& curve = pc.curve_;
  const auto exit_lattice = curve.exit_corner(curve.cell_count() - 1);
  std::vector<double> exit_unit(exit_lattice.size());
  for (std::size_t j = 0; j < exit_unit.size(); ++j)
    exit_unit[j] = std::ldexp(static_cast<double>(exit_lattice[j]), -order);
  const std::vector<double> origin(static_cast<std::size_t>(d), 0.0);

  pc.symmetries_.assign(n, candidates.front());
  std::vector<std::size_t> choice(n, 0);
  // Depth-first search over cube symmetries so that piece k ends where k+1 starts.
  std::size_t k = 0;
  while (true) {
    bool placed = false;
    while (choice[k] < candidates.size()) {
      pc.symmetries_[k] = candidates[choice[k]];
      ++choice[k];
      if (k > 0 && pc.to_box(k, origin) != pc.to_box(k - 1, exit_unit)) continue;
      placed = true;
      break;
    }
    if (placed) {
      if (k + 1 == n) break;
      ++k;
      choice[k] = 0;
      continue;
    }
    if (k == 0) throw Error("no cube symmetries make consecutive paving curves meet");
    --k;
  }

  pc.offsets_.resize(n);
  Rational acc(0);
  for (std::size_t i = 0; i < n; ++i) {
    pc.offsets_[i] = acc.to_double();
    acc = acc + paving.volumes[i];
  }
  return pc;
}

// ---------------------------------------------------------------- weights --

IntervalWeight::IntervalWeight(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (values_.empty() || breakpoints_.size() != values_.size() + 1)
    throw Error("interval weight needs one more breakpoint than values");
  if (breakpoints_.front() != 0.0 || breakpoints_.back() != 1.0)
    throw Error("interval weight breakpoints must span [0,1]");
  for (std::size_t k = 0; k + 1 < breakpoints_.size(); ++k)
    if (!(breakpoints_[k] < breakpoints_[k + 1]))
      throw Error("interval weight breakpoints must be strictly increasing");
  for (double v : values_)
    if (!(v >= -1.0 && v <= 1.0)) throw Error("weight values must lie in [-1,1]");
}

IntervalWeight IntervalWeight::constant(double value) { return IntervalWeight({0.0, 1.0}, {value}); }

IntervalWeight IntervalWeight::uniform(std::vector<double> values) {
  const std::size_t n = values.size();
  std::vector<double> b(n + 1);
  for (std::size_t k = 0; k <= n; ++k) b[k] = static_cast<double>(k) / static_cast<double>(n);
  b.back() = 1.0;
  return IntervalWeight(std::move(b), std::move(values));
}

double IntervalWeight::value_at(double u) const {
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), u);
  std::size_t k = static_cast<std::size_t>(it - breakpoints_.begin());
  k = k == 0 ? 0 : k - 1;
  return values_[std::min(k, values_.size() - 1)];
}

double IntervalWeight::average(double a, double b) const {
  if (!(b > a)) throw Error("empty averaging interval");
  double acc = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const double lo = std::max(a, breakpoints_[k]);
    const double hi = std::min(b, breakpoints_[k + 1]);
    if (hi > lo) acc += values_[k] * (hi - lo);
  }
  return acc / (b - a);
}

bool IntervalWeight::aligned_to(int level) const {
  for (double b : breakpoints_) {
    const double scaled = std::ldexp(b, level);
    if (scaled != std::floor(scaled)) return false;
  }
  return true;
}

CellWeight pushforward_weight(const IntervalWeight& alpha, const HilbertCurve& curve) {
  const std::uint64_t n = curve.cell_count();
  CellWeight out;
  out.dimension = curve.dimension();
  out.level = curve.order();
  out.values.assign(n, 0.0);
  out.exact = alpha.aligned_to(curve.dimension() * curve.order());
  const double h = 1.0 / static_cast<double>(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double a = static_cast<double>(i) * h;
    const double b = (i + 1 == n) ? 1.0 : static_cast<double>(i + 1) * h;
    const double v = out.exact ? alpha.value_at(0.5 * (a + b)) : alpha.average(a, b);
    out.values[curve.flat_cell(curve.cell(i))] = v;
  }
  return out;
}

namespace {

double midpoint_cube(const CubeFunction& f, int d, int level) {
  const std::uint64_t per_axis = std::uint64_t{1} << level;
  const std::uint64_t total = std::uint64_t{1} << (d * level);
  const double h = std::ldexp(1.0, -level);
  std::vector<double> x(static_cast<std::size_t>(d));
  double acc = 0.0;
  for (std::uint64_t q = 0; q < total; ++q) {
    std::uint64_t r = q;
    for (int j = 0; j < d; ++j) {
      x[static_cast<std::size_t>(j)] = (static_cast<double>(r % per_axis) + 0.5) * h;
      r /= per_axis;
    }
    acc += f(x);
  }
  return acc / static_cast<double>(total);
}

int reference_level(int d, int m) {
  const int cap = std::max(1, 24 / d);
  return std::max(m, std::min(m + 3, cap));
}

void require_power_of_two(std::uint64_t n) {
  if (n == 0 || (n & (n - 1)) != 0) throw Error("sample count must be a power of two");
}

template <class Curve>
double composite_average(const CubeFunction& f, const Curve& curve, std::uint64_t n) {
  double acc = 0.0;
  for (std::uint64_t j = 0; j < n; ++j) {
    const double u = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
    acc += f(curve.cell_center(u));
  }
  return acc / static_cast<double>(n);
}

}  // namespace

double change_of_variables_residual(const CubeFunction& f, const HilbertCurve& curve,
                                    std::uint64_t n_samples) {
  require_power_of_two(n_samples);
  const double lhs =
      midpoint_cube(f, curve.dimension(), reference_level(curve.dimension(), curve.order()));
  return std::abs(lhs - composite_average(f, curve, n_samples));
}

double change_of_variables_residual(const CubeFunction& f, const PavedCurve& curve,
                                    std::uint64_t n_samples) {
  require_power_of_two(n_samples);
  const int d = curve.dimension();
  const double lhs = midpoint_cube(f, d, reference_level(d, curve.curve().order() + 1));
  return std::abs(lhs - composite_average(f, curve, n_samples));
}

void write_curve_csv(std::ostream& out, const HilbertCurve& curve, std::size_t n) {
  const auto old_precision = out.precision(17);
  out << 't';
  for (int j = 1; j <= curve.dimension(); ++j) out << ",x" << j;
  out << '\n';
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = (k == n) ? 1.0 : static_cast<double>(k) / static_cast<double>(n);
    out << t;
    for (double v : curve.point(t)) out << ',' << v;
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace pbcover
