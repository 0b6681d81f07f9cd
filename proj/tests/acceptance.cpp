// Acceptance run: one PASS/FAIL line per criterion, with pinned tolerances
// and wall-time budgets.  `acceptance 3 7` runs a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "pbcover/cli.hpp"

using namespace pbcover;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

const fs::path kScenarios = fs::path(PBCOVER_SOURCE_DIR) / "scenarios";

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

PbOptions raw_stencils(PbOptions o) {
  o.bracket.eliminate_last = false;
  return o;
}

// ---------------------------------------------------------------------------

Outcome two_set_vanishing() {
  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0, worst_raw = 0.0;
  int torus = 0, sphere = 0;

  const auto t = make_surface(SurfaceKind::Torus, 1.0, {128, 128});
  const EmbeddingOptions wrap{.allow_overflow = true};
  while (torus < 10) {
    const Point2 a{u(rng), u(rng)};
    const Point2 b{a.x + 0.5 + 0.02 * (u(rng) - 0.5), a.y + 0.5 + 0.02 * (u(rng) - 0.5)};
    const double c = 0.93 + 0.05 * u(rng);
    std::vector<DiskEmbedding> sets{translated_disk(t, a, c, wrap), translated_disk(t, t.wrap(b), c, wrap)};
    if (!certify_covering(t, sets, 0.9).covered) continue;
    const auto p = canonical_partition(make_discrete_cover(t, std::move(sets)));
    worst = std::max(worst, pb_of_partition(p).value);
    worst_raw = std::max(worst_raw, pb_of_partition(p, raw_stencils({})).value);
    ++torus;
  }

  const auto s = make_surface(SurfaceKind::Sphere, 4 * pi, {128, 64});
  const PbOptions masked{.bracket = {.polar = PolarPolicy::Mask}};
  int attempts = 0;
  while (sphere < 10 && attempts < 1000) {
    ++attempts;
    const double c = (2.15 + 0.25 * u(rng)) * pi;
    const double alpha = 2 * pi * u(rng), beta = 0.9 * u(rng);
    DiscreteCover cover;
    try {
      cover = symmetric_cap_cover(s, 2, c, euler_rotation(alpha, beta, 0.0), {.eta = 0.04});
    } catch (const Error&) {
      continue;
    }
    const auto p = canonical_partition(cover);
    worst = std::max(worst, pb_of_partition(p, masked).value);
    worst_raw = std::max(worst_raw, pb_of_partition(p, raw_stencils(masked)).value);
    ++sphere;
  }
  return {torus == 10 && sphere == 10 && worst < 1e-12 && worst_raw < 1e-12,
          fmt("%d torus + %d sphere configs, max pb %.3g (raw stencils %.3g) < 1e-12", torus, sphere, worst,
              worst_raw)};
}

Outcome hilbert_measure() {
  int curves = 0;
  for (int d : {2, 3})
    for (int m = 1; m <= 6; ++m) {
      const auto r = check_measure_preservation(HilbertCurve(d, m));
      if (!r.ok)
        return {false, fmt("d=%d m=%d fails at level %d cell %llu (measure %s)", d, m, r.failing_level,
                           static_cast<unsigned long long>(r.failing_cell), to_string(r.measure).c_str())};
      ++curves;
    }
  return {true, fmt("%d curves, every dyadic cell exact", curves)};
}

Outcome normalization() {
  double worst = 0.0;
  int partitions = 0, scenarios = 0, negative = 0;
  auto check = [&](const Partition& p) {
    worst = std::max(worst, verify_partition(p).max_deviation);
    ++partitions;
  };
  for (const auto& entry : fs::directory_iterator(kScenarios)) {
    const auto config = load_run_config(entry.path());
    ++scenarios;
    if (config.kind == RunKind::Hilbert) continue;
    Scenario sc;
    try {
      sc = build_scenario(config);
    } catch (const Error&) {
      ++negative;
      continue;
    }
    if (sc.discrete || sc.continuous) check(sc.partition());
    if (config.kind == RunKind::Sweep)
      for (double c : config.document["sweep"]["capacities"].get<std::vector<double>>())
        for (const auto& cover : template_covers(sc.surface, c, sc.embedding)) check(canonical_partition(cover));
    if (config.kind == RunKind::Check && config.document["check"]["name"] == "reduction") {
      const auto& rc = config.document["check"];
      check(canonical_partition(
          square_translation_cover(sc.surface, 1 << rc.value("curve_order", 2), rc.value("capacity", 0.3))));
    }
  }
  return {worst < 1e-10 && negative <= 1,
          fmt("%d partitions from %d scenarios (%d negative control), max deviation %.3g < 1e-10", partitions,
              scenarios, negative, worst)};
}

double brute_force(const SquareMatrix& p) {
  const std::size_t n = p.n;
  double best = 0.0;
  std::vector<int> a(n), b(n);
  for (std::uint64_t ma = 0; ma < (1ull << n); ++ma)
    for (std::uint64_t mb = 0; mb < (1ull << n); ++mb) {
      for (std::size_t k = 0; k < n; ++k) {
        a[k] = (ma >> k) & 1 ? 1 : -1;
        b[k] = (mb >> k) & 1 ? 1 : -1;
      }
      best = std::max(best, bilinear(p, a, b));
    }
  return best;
}

SquareMatrix random_antisymmetric(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SquareMatrix p(n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = k + 1; l < n; ++l) {
      p(k, l) = u(rng);
      p(l, k) = -p(k, l);
    }
  return p;
}

Outcome norm_oracle() {
  std::mt19937_64 rng(4242);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const auto p = random_antisymmetric(1 + static_cast<std::size_t>(t % 8), rng);
    worst = std::max(worst, std::abs(inf1_norm_exact(p).value - brute_force(p)));
  }

  // Fixtures: the documented small cases, padded rank-2 blocks, random dense
  // matrices and bracket matrices sampled from lattice partitions.
  std::vector<SquareMatrix> fixtures;
  SquareMatrix j(2);
  j(0, 1) = 1, j(1, 0) = -1;
  fixtures.push_back(j);
  SquareMatrix three(3);
  three(0, 1) = 1, three(0, 2) = 2, three(1, 0) = -1, three(2, 0) = -2;
  fixtures.push_back(three);
  fixtures.push_back(SquareMatrix(12));
  SquareMatrix padded(8);
  padded(0, 1) = 3.5, padded(1, 0) = -3.5;
  fixtures.push_back(padded);
  for (std::size_t n = 2; n <= 12; ++n)
    for (int t = 0; t < 10; ++t) fixtures.push_back(random_antisymmetric(n, rng));
  const auto torus = make_surface(SurfaceKind::Torus, 1.0, {48, 48});
  for (double c : {0.2, 0.3, 0.45}) {
    const BracketMatrixField field(canonical_partition(lattice_torus_cover(torus, c)));
    if (field.dimension() > 12) continue;
    for (std::size_t x = 0; x < field.points(); x += 173) fixtures.push_back(field.at(x));
  }
  int mismatches = 0;
  double worst_h = 0.0;
  for (const auto& p : fixtures) {
    const double exact = inf1_norm_exact(p).value;
    const double h = inf1_norm_heuristic(p, 32, 1).value;
    const double gap = std::abs(exact - h);
    worst_h = std::max(worst_h, gap / std::max(1.0, exact));
    if (gap > 1e-12 * std::max(1.0, exact)) ++mismatches;
  }
  return {worst < 1e-12 && mismatches == 0,
          fmt("200 matrices: max |exact-brute| %.3g < 1e-12; heuristic(32) vs exact on %zu fixtures: %d mismatches "
              "(max rel gap %.3g)",
              worst, fixtures.size(), mismatches, worst_h)};
}

double check_value(const ConsistencyReport& r, const std::string& id, bool lhs = true) {
  for (const auto& c : r.checks)
    if (c.id == id) return lhs ? c.lhs : c.rhs;
  throw Error("missing check " + id);
}

Outcome correspondences() {
  const auto config = load_run_config(kScenarios / "torus_coarse_graining_check.json");
  const auto sc = build_scenario(config);
  double residual = 0.0, coarse_margin = -1e300, cont_margin = -1e300;
  bool ok = true;
  for (int m : {1, 2, 3}) {
    const auto r = coarse_graining_check(*sc.discrete, m, *config.seed);
    for (const char* id : {"interpolation_weight_residual", "coarse_weight_residual", "round_trip"})
      residual = std::max(residual, check_value(r, id));
    const double pb_c = check_value(r, "continuous_ge_discrete");
    const double pb_d = check_value(r, "continuous_ge_discrete", false) + 1e-9;
    const double pb_cg = check_value(r, "coarse_le_continuous");
    coarse_margin = std::max(coarse_margin, pb_cg - pb_c);
    cont_margin = std::max(cont_margin, pb_d - pb_c);
    ok = ok && check_value(r, "continuous_deviation") < 1e-10;
  }
  ok = ok && residual < 1e-12 && coarse_margin <= 1e-9 && cont_margin <= 1e-9;
  return {ok, fmt("cells per third 1..3: max weight residual %.3g < 1e-12; max pb(F')-pb(F) %.3g <= 1e-9; "
                  "max pb(F_disc)-pb(F_cont) %.3g <= 1e-9",
                  residual, coarse_margin, cont_margin)};
}

Outcome reduction_suite() {
  const auto config = load_run_config(kScenarios / "torus_reduction_check.json");
  const auto sc = build_scenario(config);
  double residual = 0.0, square_gap = -1e300, bicover_gap = -1e300;
  std::size_t defects = 0;
  for (int order : {2, 3}) {
    ReductionConfig rc;
    rc.curve_order = order;
    rc.weight_draws = 32;
    rc.seed = *config.seed;
    const auto r = reduction_check(sc.surface, rc);
    residual = std::max({residual, check_value(r, "pushforward_residual"), check_value(r, "fiber_weight_residual")});
    square_gap = std::max(square_gap, check_value(r, "square_ge_interval", false) + 1e-9 -
                                          check_value(r, "square_ge_interval"));
    bicover_gap = std::max(bicover_gap, check_value(r, "bicover_le_interval") -
                                            (check_value(r, "bicover_le_interval", false) - 1e-9));
    defects += static_cast<std::size_t>(check_value(r, "bicover_defects"));
  }
  const bool ok = residual < 1e-9 && square_gap <= 1e-9 && bicover_gap <= 1e-9 && defects == 0;
  return {ok, fmt("curve orders 2..3, 32 weights: max residual %.3g < 1e-9; max pb(F_I)-pb(F_T) %.3g <= 1e-9; "
                  "max pb(F~_I)-pb(F_I) %.3g <= 1e-9",
                  residual, square_gap, bicover_gap)};
}

Outcome polterovich() {
  const auto s = make_surface(SurfaceKind::Sphere, 4 * pi, {256, 128});
  const PbOptions masked{.bracket = {.polar = PolarPolicy::Mask}};
  struct Config {
    int count;
    double capacity;
    double alpha;
  };
  std::vector<Config> configs;
  for (double c : {1.5, 1.6, 1.7, 1.8})
    for (double alpha : {0.0, 1.0}) configs.push_back({4, c * pi, alpha});
  for (double alpha : {0.0, 1.0}) configs.push_back({6, 1.1 * pi, alpha});
  double min_lhs = 1e300;
  int passed = 0;
  std::ostringstream log;
  for (const auto& c : configs) {
    const auto cover = symmetric_cap_cover(s, c.count, c.capacity, euler_rotation(c.alpha, 0.0, 0.0), {.eta = 0.05});
    const auto r = polterovich_consistency(cover, canonical_partition(cover), masked);
    const double lhs = check_value(r, "pb_times_width");
    min_lhs = std::min(min_lhs, lhs);
    passed += r.all_pass();
    log << fmt(" N=%d c=%.1fpi a=%.0f: %.4g;", c.count, c.capacity / pi, c.alpha, lhs);
  }
  return {passed == static_cast<int>(configs.size()),
          fmt("%d/%zu covers pass, min pb*8N^2*e_H = %.4g >= 1;", passed, configs.size(), min_lhs) + log.str()};
}

Outcome half_area() {
  double worst = 0.0, worst_raw = 0.0;
  const PbOptions masked{.bracket = {.polar = PolarPolicy::Mask}};
  for (GridSpec g : {GridSpec{64, 32}, GridSpec{128, 64}, GridSpec{256, 128}}) {
    const auto s = make_surface(SurfaceKind::Sphere, 4 * pi, g);
    const auto cover = symmetric_cap_cover(s, 2, 2.2 * pi, euler_rotation(0, 0, 0), {.eta = 0.04});
    const auto p = canonical_partition(cover);
    for (const auto& o : {PbOptions{}, masked}) {
      worst = std::max(worst, pb_of_partition(p, o).value);
      worst_raw = std::max(worst_raw, pb_of_partition(p, raw_stencils(o)).value);
    }
  }
  return {worst < 1e-12 && worst_raw < 1e-12,
          fmt("two caps of 2.2pi on 3 grids: max pb %.3g (raw stencils %.3g) < 1e-12", worst, worst_raw)};
}

Outcome monotonicity() {
  const auto config = load_run_config(kScenarios / "torus_sweep.json");
  const auto sc = build_scenario(config);
  const auto& sw = config.document["sweep"];
  const auto caps = sw["capacities"].get<std::vector<double>>();
  const auto table = pb_curve_sweep(sc.surface, caps, sc.family, optimizer_config(config), pb_options(config),
                                    sc.embedding, sw.value("extra_templates", 2));
  const auto bad = monotonicity_report(table, 0.05);
  std::ostringstream rows;
  for (const auto& r : table.rows) rows << fmt(" c=%.2f: %.6g (%s);", r.capacity, r.value, r.cover.c_str());

  const auto rconfig = load_run_config(kScenarios / "torus_restriction_check.json");
  const auto rsc = build_scenario(rconfig);
  bool restriction = restriction_check(*rsc.discrete, rconfig.document["check"]["larger_capacity"]).all_pass();
  for (double c : caps) {
    const auto cover = template_cover(sc.surface, c);
    restriction = restriction && restriction_check(cover, c * 1.2).all_pass();
  }
  return {bad.empty() && restriction,
          fmt("%zu violations at 5%%, restriction equality %s;", bad.size(), restriction ? "exact" : "BROKEN") +
              rows.str()};
}

Outcome bracket_order() {
  struct Case {
    std::string name;
    SurfaceKind kind;
    double area;
    int aspect;
    std::function<double(double, double)> f, fx, fy, g, gx, gy;
  };
  const double tp = 2 * pi;
  std::vector<Case> cases;
  cases.push_back({"torus", SurfaceKind::Torus, 1.0, 1,
                   [=](double x, double y) { return std::sin(tp * (x + 2 * y)); },
                   [=](double x, double y) { return tp * std::cos(tp * (x + 2 * y)); },
                   [=](double x, double y) { return 2 * tp * std::cos(tp * (x + 2 * y)); },
                   [=](double x, double y) { return std::cos(tp * (3 * x - y)); },
                   [=](double x, double y) { return -3 * tp * std::sin(tp * (3 * x - y)); },
                   [=](double x, double y) { return tp * std::sin(tp * (3 * x - y)); }});
  cases.push_back({"plane", SurfaceKind::Plane, 1.0, 1,
                   [](double x, double y) { return std::exp(0.5 * x) * std::cos(2 * y); },
                   [](double x, double y) { return 0.5 * std::exp(0.5 * x) * std::cos(2 * y); },
                   [](double x, double y) { return -2 * std::exp(0.5 * x) * std::sin(2 * y); },
                   [](double x, double y) { return std::sin(3 * x) * y * y; },
                   [](double x, double y) { return 3 * std::cos(3 * x) * y * y; },
                   [](double x, double y) { return 2 * y * std::sin(3 * x); }});
  auto bump = [](double z) { return std::pow(1 - z * z, 4); };
  auto dbump = [](double z) { return -8 * z * std::pow(1 - z * z, 3); };
  cases.push_back({"sphere", SurfaceKind::Sphere, 4 * pi, 2,
                   [=](double t, double z) { return std::cos(t) * bump(z); },
                   [=](double t, double z) { return -std::sin(t) * bump(z); },
                   [=](double t, double z) { return std::cos(t) * dbump(z); },
                   [=](double t, double z) { return std::sin(2 * t) * z * bump(z); },
                   [=](double t, double z) { return 2 * std::cos(2 * t) * z * bump(z); },
                   [=](double t, double z) { return std::sin(2 * t) * (bump(z) + z * dbump(z)); }});

  double min_order = 1e300, max_c = 0.0;
  std::ostringstream log;
  for (const auto& c : cases) {
    std::vector<double> errors;
    const std::vector<int> sizes{32, 64, 128, 256};
    for (int n : sizes) {
      const double band = c.kind == SurfaceKind::Sphere ? 0.25 : 0.0;
      const auto s = make_surface(c.kind, c.area, {c.aspect * n, n}, band);
      const auto f = ScalarField::sample(s, c.f);
      const auto g = ScalarField::sample(s, c.g);
      const auto b = poisson_bracket(f, g, {.order = 2, .polar = PolarPolicy::Mask});
      double err = 0.0;
      for (int j = 0; j < s.ny(); ++j) {
        if (s.kind() == SurfaceKind::Sphere && s.near_polar_band(j, 1)) continue;
        for (int i = 0; i < s.nx(); ++i) {
          const double x = s.x(i), y = s.y(j);
          const double exact = c.fx(x, y) * c.gy(x, y) - c.fy(x, y) * c.gx(x, y);
          err = std::max(err, std::abs(b.at(i, j) - exact));
        }
      }
      errors.push_back(err);
      max_c = std::max(max_c, err / (s.hy() * s.hy()));
    }
    log << " " << c.name << ":";
    for (std::size_t k = 1; k < errors.size(); ++k) {
      const double order = std::log2(errors[k - 1] / errors[k]);
      min_order = std::min(min_order, order);
      log << fmt(" %.3f", order);
    }
    log << ";";
  }
  return {min_order >= 1.9, fmt("min observed order %.3f >= 1.9, max err/h^2 %.3g;", min_order, max_c) + log.str()};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  Outcome (*fn)();
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "two-set vanishing", 10, two_set_vanishing},
      {2, "Hilbert measure preservation", 30, hilbert_measure},
      {3, "partition normalization", 5, normalization},
      {4, "exact vs brute-force norm oracle", 60, norm_oracle},
      {5, "discrete/continuous correspondences", 120, correspondences},
      {6, "reduction suite", 120, reduction_suite},
      {7, "displaceable-cap consistency", 180, polterovich},
      {8, "half-area vanishing", 10, half_area},
      {9, "pb(c) monotonicity", 900, monotonicity},
      {10, "bracket numerics", 60, bracket_order},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.budget_seconds;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s [%d] %s: %s (%.2f s of %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                seconds, c.budget_seconds, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
