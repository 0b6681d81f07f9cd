#include "pbcover/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace pbcover {

using std::numbers::pi;

namespace {

std::mt19937_64 seeded(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

Point2 sphere_chart_point(const ChartedSurface& sphere, const std::array<double, 3>& d) {
  const double zmax = sphere.area() / (4.0 * pi);
  double theta = std::atan2(d[1], d[0]);
  if (theta < 0.0) theta += 2.0 * pi;
  if (std::abs(d[0]) < 1e-15 && std::abs(d[1]) < 1e-15) theta = 0.0;
  return {theta, zmax * std::clamp(d[2], -1.0, 1.0)};
}

}  // namespace

DiscreteCover lattice_torus_cover(const ChartedSurface& torus, double capacity,
                                  const EmbeddingOptions& options, int max_k) {
  if (torus.kind() != SurfaceKind::Torus) throw Error("lattice covers need a torus");
  for (int k = 1; k <= max_k; ++k) {
    std::vector<DiskEmbedding> sets;
    try {
      for (int j = 0; j < k; ++j)
        for (int i = 0; i < k; ++i)
          sets.push_back(translated_disk(
              torus, {torus.x0() + (i + 0.5) * torus.width() / k, torus.y0() + (j + 0.5) * torus.height() / k},
              capacity, options));
    } catch (const Error&) {
      continue;
    }
    if (certify_covering(torus, sets, 1.0 - options.eta).covered)
      return make_discrete_cover(torus, std::move(sets));
  }
  std::ostringstream msg;
  msg << "capacity " << capacity << " is below the lattice template threshold (k <= " << max_k << ")";
  throw Error(msg.str());
}

DiscreteCover three_disk_torus_cover(const ChartedSurface& torus, double capacity,
                                     const EmbeddingOptions& options) {
  if (torus.kind() != SurfaceKind::Torus) throw Error("the three-disk scenario needs a torus");
  const double w = torus.width(), h = torus.height();
  const std::array<Point2, 3> unit{{{0.0, 0.0}, {1.0 / 3, 2.0 / 3}, {2.0 / 3, 1.0 / 3}}};
  std::vector<DiskEmbedding> sets;
  for (const auto& u : unit)
    sets.push_back(translated_disk(torus, {torus.x0() + (u.x + 1.0 / 6) * w, torus.y0() + (u.y + 1.0 / 6) * h},
                                   capacity, options));
  return make_discrete_cover(torus, std::move(sets));
}

CenterPath two_row_path(const ChartedSurface& torus) {
  const double w = torus.width(), h = torus.height();
  const double x0 = torus.x0(), y0 = torus.y0();
  CenterPath path;
  path.closed = true;
  for (int k = 0; k <= 3; ++k) path.vertices.push_back({x0 + k * w / 3, y0 + 0.25 * h});
  for (int k = 3; k >= 0; --k) path.vertices.push_back({x0 + k * w / 3, y0 + 0.75 * h});
  return path;
}

std::vector<std::array<double, 3>> symmetric_directions(int count) {
  const double s3 = std::sqrt(3.0) / 2.0;
  switch (count) {
    case 2: return {{0, 0, 1}, {0, 0, -1}};
    case 4: {
      const double r = std::sqrt(8.0) / 3.0;
      return {{0, 0, 1}, {r, 0, -1.0 / 3}, {-0.5 * r, s3 * r, -1.0 / 3}, {-0.5 * r, -s3 * r, -1.0 / 3}};
    }
    case 5: return {{0, 0, 1}, {0, 0, -1}, {1, 0, 0}, {-0.5, s3, 0}, {-0.5, -s3, 0}};
    case 6: return {{0, 0, 1}, {0, 0, -1}, {1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}};
    default: throw Error("symmetric arrangements exist for 2, 4, 5 or 6 caps");
  }
}

std::array<double, 9> euler_rotation(double alpha, double beta, double gamma) {
  auto rz = [](double t) {
    return std::array<double, 9>{std::cos(t), -std::sin(t), 0, std::sin(t), std::cos(t), 0, 0, 0, 1};
  };
  const std::array<double, 9> ry{std::cos(beta), 0, std::sin(beta), 0, 1, 0, -std::sin(beta), 0, std::cos(beta)};
  auto mul = [](const std::array<double, 9>& a, const std::array<double, 9>& b) {
    std::array<double, 9> c{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) c[3 * i + j] += a[3 * i + k] * b[3 * k + j];
    return c;
  };
  return mul(mul(rz(alpha), ry), rz(gamma));
}

DiscreteCover symmetric_cap_cover(const ChartedSurface& sphere, int count, double capacity,
                                  const std::array<double, 9>& rotation, const EmbeddingOptions& options) {
  if (sphere.kind() != SurfaceKind::Sphere) throw Error("cap covers need a sphere");
  std::vector<DiskEmbedding> sets;
  for (const auto& d : symmetric_directions(count)) {
    std::array<double, 3> r{};
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) r[i] += rotation[3 * i + k] * d[k];
    sets.push_back(cap_embedding(sphere, sphere_chart_point(sphere, r), capacity, options));
  }
  if (!certify_covering(sphere, sets, 1.0 - options.eta).covered)
    throw Error("inner caps do not cover the sphere");
  return make_discrete_cover(sphere, std::move(sets));
}

DiscreteCover minimal_cap_cover(const ChartedSurface& sphere, double capacity, const EmbeddingOptions& options) {
  const auto identity = euler_rotation(0.0, 0.0, 0.0);
  for (int count : {2, 4, 5, 6}) {
    try {
      return symmetric_cap_cover(sphere, count, capacity, identity, options);
    } catch (const Error&) {
    }
  }
  std::ostringstream msg;
  msg << "capacity " << capacity << " is below the cap template threshold (6 caps)";
  throw Error(msg.str());
}

// ---------------------------------------------------------------------------

BoxMinimum minimize_in_box(const std::function<double(std::span<const double>)>& f,
                           std::span<const double> lower, std::span<const double> upper,
                           std::span<const double> x0, const OptimizerConfig& config) {
  const std::size_t d = lower.size();
  if (upper.size() != d || x0.size() != d) throw Error("optimizer bounds and start differ in dimension");
  if (config.restarts < 1 || config.evaluations < 1) throw Error("optimizer budget must be positive");
  for (std::size_t k = 0; k < d; ++k)
    if (!(lower[k] <= upper[k])) throw Error("optimizer box is empty");

  BoxMinimum best;
  best.value = std::numeric_limits<double>::infinity();
  auto project = [&](std::vector<double>& x) {
    for (std::size_t k = 0; k < d; ++k) x[k] = std::clamp(x[k], lower[k], upper[k]);
  };

  for (int restart = 0; restart < config.restarts; ++restart) {
    int used = 0;
    auto eval = [&](std::vector<double>& x) {
      project(x);
      ++used;
      double v;
      try {
        v = f(x);
      } catch (const Error&) {
        v = std::numeric_limits<double>::infinity();
      }
      if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
      if (v < best.value) {
        best.value = v;
        best.x = x;
      }
      return v;
    };

    std::vector<double> start(x0.begin(), x0.end());
    if (restart > 0) {
      auto rng = seeded(config.seed, static_cast<std::uint64_t>(restart));
      for (std::size_t k = 0; k < d; ++k) {
        std::uniform_real_distribution<double> u(lower[k], upper[k]);
        start[k] = u(rng);
      }
    }
    std::vector<std::vector<double>> simplex{start};
    for (std::size_t k = 0; k < d; ++k) {
      auto x = start;
      const double step = config.initial_step * (upper[k] - lower[k]);
      x[k] = x[k] + step <= upper[k] ? x[k] + step : x[k] - step;
      simplex.push_back(std::move(x));
    }
    std::vector<double> fv;
    for (auto& x : simplex) fv.push_back(eval(x));
    if (d == 0) {
      best.evaluations += used;
      continue;
    }

    std::vector<std::size_t> order(d + 1);
    while (used < config.evaluations) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
      const std::size_t lo = order.front(), hi = order.back(), second = order[d - 1];
      const double range = fv[hi] - fv[lo];
      if (std::isfinite(range) && range <= config.tolerance * std::max(std::abs(fv[lo]), 1e-300)) break;
      if (std::isfinite(fv[lo]) && fv[lo] == 0.0 && fv[hi] == 0.0) break;

      std::vector<double> centroid(d, 0.0);
      for (std::size_t i = 0; i <= d; ++i)
        if (i != hi)
          for (std::size_t k = 0; k < d; ++k) centroid[k] += simplex[i][k] / static_cast<double>(d);
      auto along = [&](double t) {
        std::vector<double> x(d);
        for (std::size_t k = 0; k < d; ++k) x[k] = centroid[k] + t * (simplex[hi][k] - centroid[k]);
        return x;
      };

      auto xr = along(-1.0);
      const double fr = eval(xr);
      if (fr < fv[lo]) {
        auto xe = along(-2.0);
        const double fe = eval(xe);
        if (fe < fr) {
          simplex[hi] = std::move(xe);
          fv[hi] = fe;
        } else {
          simplex[hi] = std::move(xr);
          fv[hi] = fr;
        }
      } else if (fr < fv[second]) {
        simplex[hi] = std::move(xr);
        fv[hi] = fr;
      } else {
        const bool outside = fr < fv[hi];
        auto xc = along(outside ? -0.5 : 0.5);
        const double fc = eval(xc);
        if (fc < (outside ? fr : fv[hi])) {
          simplex[hi] = std::move(xc);
          fv[hi] = fc;
        } else {
          for (std::size_t i = 0; i <= d; ++i) {
            if (i == lo) continue;
            for (std::size_t k = 0; k < d; ++k) simplex[i][k] = simplex[lo][k] + 0.5 * (simplex[i][k] - simplex[lo][k]);
            fv[i] = eval(simplex[i]);
          }
        }
      }
    }
    best.evaluations += used;
  }
  if (best.x.empty()) throw Error("no admissible point found in the optimizer box");
  return best;
}

MinimizeResult minimize_pb(const PartitionFamily& family, const OptimizerConfig& config, const PbOptions& pb) {
  auto objective = [&](std::span<const double> theta) { return pb_of_partition(family(theta), pb).value; };
  const auto theta0 = family.default_theta();
  MinimizeResult result;
  result.canonical_value = objective(theta0);
  const auto best = minimize_in_box(objective, family.lower(), family.upper(), theta0, config);
  result.theta = best.x;
  result.evaluations = best.evaluations + 1;
  result.report = pb_of_partition(family(best.x), pb);
  return result;
}

// ---------------------------------------------------------------------------

DiscreteCover template_cover(const ChartedSurface& surface, double capacity, const EmbeddingOptions& options) {
  switch (surface.kind()) {
    case SurfaceKind::Torus: return lattice_torus_cover(surface, capacity, options);
    case SurfaceKind::Sphere: return minimal_cap_cover(surface, capacity, options);
    default: break;
  }
  throw Error("pb(c) sweeps are defined on the torus and the sphere");
}

std::vector<DiscreteCover> template_covers(const ChartedSurface& surface, double capacity,
                                           const EmbeddingOptions& options, int extra) {
  std::vector<DiscreteCover> out;
  out.push_back(template_cover(surface, capacity, options));
  if (surface.kind() == SurfaceKind::Torus) {
    const int k0 = static_cast<int>(std::lround(std::sqrt(static_cast<double>(out.front().size()))));
    for (int k = k0 + 1; k <= k0 + extra; ++k) {
      try {
        std::vector<DiskEmbedding> sets;
        for (int j = 0; j < k; ++j)
          for (int i = 0; i < k; ++i)
            sets.push_back(translated_disk(surface,
                                           {surface.x0() + (i + 0.5) * surface.width() / k,
                                            surface.y0() + (j + 0.5) * surface.height() / k},
                                           capacity, options));
        out.push_back(make_discrete_cover(surface, std::move(sets)));
      } catch (const Error&) {
      }
    }
  } else {
    const auto identity = euler_rotation(0.0, 0.0, 0.0);
    int added = 0;
    for (int count : {2, 4, 5, 6}) {
      if (count <= static_cast<int>(out.front().size()) || added >= extra) continue;
      try {
        out.push_back(symmetric_cap_cover(surface, count, capacity, identity, options));
        ++added;
      } catch (const Error&) {
      }
    }
  }
  return out;
}

namespace {

std::string describe_cover(const DiscreteCover& cover) {
  std::ostringstream out;
  if (cover.surface.kind() == SurfaceKind::Torus) {
    const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(cover.size()))));
    out << "torus lattice " << k << "x" << k;
  } else {
    out << "sphere " << cover.size() << " symmetric caps";
  }
  return out.str();
}

}  // namespace

SweepTable pb_curve_sweep(const ChartedSurface& surface, std::span<const double> capacities,
                          const FamilySpec& family, const OptimizerConfig& config, const PbOptions& pb,
                          const EmbeddingOptions& options, int extra_templates) {
  for (std::size_t i = 1; i < capacities.size(); ++i)
    if (!(capacities[i] > capacities[i - 1])) throw Error("sweep capacities must be strictly increasing");
  SweepTable table;
  for (double c : capacities) {
    SweepRow best;
    bool have = false;
    for (const auto& cover : template_covers(surface, c, options, extra_templates)) {
      const PartitionFamily fam(cover, family);
      const auto result = minimize_pb(fam, config, pb);
      if (!have || result.report.value < best.value) {
        best = {c, result.report.value, result.canonical_value, result.evaluations, result.theta,
                describe_cover(cover)};
        have = true;
      }
    }
    table.rows.push_back(std::move(best));
  }
  return table;
}

std::vector<std::size_t> monotonicity_report(const SweepTable& table, double tol) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    if (!(table.rows[i].capacity > table.rows[i - 1].capacity))
      throw Error("sweep table capacities are not strictly increasing");
    const double prev = table.rows[i - 1].value;
    if (table.rows[i].value > prev * (1.0 + tol) + 1e-12) out.push_back(i);
  }
  return out;
}

// ---------------------------------------------------------------------------

bool ConsistencyReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const ConsistencyCheck& c) { return c.pass; });
}

void ConsistencyReport::add(std::string id, double lhs, double rhs, bool pass) {
  checks.push_back({std::move(id), lhs, rhs, lhs - rhs, pass});
}

namespace {

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

/// sum over members of coefficient(member) * weight * field.
ScalarField combine(const Partition& p, const std::function<double(const PartitionMember&)>& coefficient) {
  ScalarField out(p.surface);
  for (const auto& m : p.members) out.axpy(coefficient(m) * m.weight, m.field);
  return out;
}

std::vector<double> random_weights(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> out(n);
  for (double& x : out) x = u(rng);
  return out;
}

}  // namespace

ConsistencyReport polterovich_consistency(const DiscreteCover& cover, const Partition& partition,
                                          const PbOptions& pb) {
  if (cover.surface.kind() != SurfaceKind::Sphere) throw Error("the consistency check uses sphere caps");
  if (partition.kind != PartitionKind::Discrete || partition.cells != cover.size())
    throw Error("partition does not match the cover");
  double width = 0.0;
  for (const auto& e : cover.sets) {
    const double energy = displacement_energy_cap(e.capacity(), cover.surface.area());
    if (!std::isfinite(energy)) throw Error("cap is not displaceable (area at least half the sphere)");
    width = std::max(width, energy);
  }
  const double n = static_cast<double>(cover.size());
  const auto report = pb_of_partition(partition, pb);
  ConsistencyReport out;
  const auto norm = verify_partition(partition);
  out.add("partition_deviation", norm.max_deviation, 1e-10, norm.ok(1e-10));
  const double lhs = report.value * 8.0 * n * n * width;
  out.add("pb_times_width", lhs, 1.0, lhs >= 1.0);
  return out;
}

ConsistencyReport reduction_check(const ChartedSurface& torus, const ReductionConfig& config, const PbOptions& pb) {
  if (torus.kind() != SurfaceKind::Torus) throw Error("the reduction suite runs on the torus");
  if (config.curve_order < 1 || config.curve_order > 5) throw Error("curve order must lie in 1..5");
  ConsistencyReport out;
  const double tol = config.tolerance;
  auto rng = seeded(config.seed, 0);

  // Square parameter space read along the curve.
  const int side = 1 << config.curve_order;
  const auto square = square_translation_cover(torus, side, config.capacity);
  const auto ft = canonical_partition(square);
  const HilbertCurve curve(2, config.curve_order);
  const auto fi = reparametrize_by_curve(ft, curve);
  const double pb_t = pb_of_partition(ft, pb).value;
  const double pb_i = pb_of_partition(fi, pb).value;
  out.add("square_ge_interval", pb_t, pb_i - tol, pb_t >= pb_i - tol);

  double residual = 0.0;
  for (int draw = 0; draw < config.weight_draws; ++draw) {
    const auto values = random_weights(rng, curve.cell_count());
    const auto alpha_i = IntervalWeight::uniform(values);
    const auto alpha_t = pushforward_weight(alpha_i, curve);
    const auto lhs = combine(ft, [&](const PartitionMember& m) { return alpha_t.values[m.cell]; });
    const auto rhs = combine(fi, [&](const PartitionMember& m) { return values[m.cell]; });
    residual = std::max(residual, max_abs_diff(lhs, rhs));
  }
  out.add("pushforward_residual", residual, tol, residual < tol);

  // Bicover extension of an interval cover.
  const auto base = square_translation_cover(torus, config.bicover_cells, config.capacity);
  const auto inner = make_continuous_cover(torus, two_row_path(torus), config.capacity, config.inner_samples);
  const auto bc = make_bicover(base, inner);
  out.add("bicover_defects", static_cast<double>(bicover_defects(bc)), 0.0, bicover_defects(bc) == 0);
  const auto f_in = canonical_partition(inner);
  const auto ext = extend_partition_to_bicover(f_in, bc);
  const double pb_in = pb_of_partition(f_in, pb).value;
  const double pb_ext = pb_of_partition(ext, pb).value;
  out.add("bicover_le_interval", pb_ext, pb_in + tol, pb_ext <= pb_in + tol);

  double fiber = 0.0;
  for (int draw = 0; draw < config.weight_draws; ++draw) {
    const auto alpha = random_weights(rng, ext.cells);
    const auto alpha_i = bc.fiber_average(alpha);
    const auto lhs = combine(ext, [&](const PartitionMember& m) { return alpha[m.cell]; });
    const auto rhs = combine(f_in, [&](const PartitionMember& m) { return alpha_i[m.cell]; });
    fiber = std::max(fiber, max_abs_diff(lhs, rhs));
  }
  out.add("fiber_weight_residual", fiber, tol, fiber < tol);
  return out;
}

ConsistencyReport coarse_graining_check(const DiscreteCover& cover, int cells_per_third, std::uint64_t seed,
                                        const PbOptions& pb) {
  ConsistencyReport out;
  auto rng = seeded(seed, 1);
  const std::size_t n = cover.size();
  const auto fd = canonical_partition(cover);
  const auto ip = continuous_from_discrete(cover, fd, cells_per_third);
  const auto norm = verify_partition(ip.partition);
  out.add("continuous_deviation", norm.max_deviation, 1e-10, norm.ok(1e-10));

  // Discrete -> continuous: a'(k) from window means of alpha.
  double up = 0.0;
  for (int draw = 0; draw < 8; ++draw) {
    const auto alpha = random_weights(rng, ip.cover.size());
    const auto ap = window_weights(ip, alpha);
    const auto lhs = combine(fd, [&](const PartitionMember& m) { return ap[m.cell]; });
    const auto rhs = combine(ip.partition, [&](const PartitionMember& m) { return alpha[m.cell]; });
    up = std::max(up, max_abs_diff(lhs, rhs));
  }
  out.add("interpolation_weight_residual", up, 1e-12, up < 1e-12);

  const double pb_d = pb_of_partition(fd, pb).value;
  const double pb_c = pb_of_partition(ip.partition, pb).value;
  out.add("continuous_ge_discrete", pb_c, pb_d - 1e-9, pb_c >= pb_d - 1e-9);

  // Continuous -> discrete.
  const auto cg = coarse_grain(ip.cover, ip.partition, 3 * (n + 1));
  double down = 0.0;
  std::vector<std::vector<double>> probes{std::vector<double>(cg.cover.size(), 1.0)};
  for (std::size_t j = 0; j < cg.cover.size(); ++j) {
    std::vector<double> e(cg.cover.size(), 0.0);
    e[j] = 1.0;
    probes.push_back(std::move(e));
  }
  for (int draw = 0; draw < 8; ++draw) {
    std::vector<double> signs(cg.cover.size());
    for (double& x : signs) x = (rng() & 1U) ? 1.0 : -1.0;
    probes.push_back(std::move(signs));
  }
  for (const auto& a : probes) down = std::max(down, weight_correspondence_residual(ip.partition, cg, a));
  out.add("coarse_weight_residual", down, 1e-12, down < 1e-12);

  const double pb_cg = pb_of_partition(cg.partition, pb).value;
  out.add("coarse_le_continuous", pb_cg, pb_c + 1e-9, pb_cg <= pb_c + 1e-9);

  double trip = 0.0;
  if (cg.cover.size() == n) {
    for (std::size_t j = 0; j < n; ++j) trip = std::max(trip, max_abs_diff(cg.partition.members[j].field, fd.members[j].field));
  } else {
    trip = std::numeric_limits<double>::infinity();
  }
  out.add("round_trip", trip, 1e-12, trip < 1e-12);
  return out;
}

ConsistencyReport restriction_check(const DiscreteCover& cover, double larger_capacity, const PbOptions& pb) {
  ConsistencyReport out;
  const auto f = canonical_partition(cover);
  Partition g = f;
  for (auto& m : g.members) {
    if (!(larger_capacity > m.embedding.capacity())) throw Error("restriction needs a larger capacity");
    m.embedding = make_disk(cover.surface, m.embedding.center(), larger_capacity, {.eta = m.embedding.eta()});
  }
  const auto norm = verify_partition(g);
  out.add("supports_contained", static_cast<double>(norm.support_violations), 0.0, norm.supports_ok);
  const double pf = pb_of_partition(f, pb).value;
  const double pg = pb_of_partition(g, pb).value;
  out.add("restriction_equal", pg, pf, pg == pf);
  return out;
}

void write_report_csv(std::ostream& out, const ConsistencyReport& report) {
  out << "id,lhs,rhs,margin,pass\n";
  out.precision(17);
  for (const auto& c : report.checks)
    out << c.id << ',' << c.lhs << ',' << c.rhs << ',' << c.margin << ',' << (c.pass ? "true" : "false") << '\n';
}

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
  out << "capacity,pb,canonical_pb,evaluations,cover,theta\n";
  out.precision(17);
  for (const auto& r : table.rows) {
    out << r.capacity << ',' << r.value << ',' << r.canonical_value << ',' << r.evaluations << ',' << r.cover << ',';
    for (std::size_t k = 0; k < r.theta.size(); ++k) out << (k ? ";" : "") << r.theta[k];
    out << '\n';
  }
}

void write_sweep_dat(std::ostream& out, const SweepTable& table) {
  out << "# c pb\n";
  out.precision(17);
  for (const auto& r : table.rows) out << r.capacity << ' ' << r.value << '\n';
}

}  // namespace pbcover
