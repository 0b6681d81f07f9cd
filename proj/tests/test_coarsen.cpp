#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pbcover/coarsen.hpp"

using namespace pbcover;

namespace {

CenterPath two_row_path() {
  const double third = 1.0 / 3.0;
  return {{{0, 0.25}, {third, 0.25}, {2 * third, 0.25}, {1, 0.25},
           {1, 0.75}, {2 * third, 0.75}, {third, 0.75}, {0, 0.75}},
          true};
}

DiscreteCover three_disk_torus(int n = 48) {
  const auto torus = make_surface(SurfaceKind::Torus, 1.0, {n, n});
  const double s = 1.0 / 6.0;
  return make_discrete_cover(torus, {translated_disk(torus, {s, s}, 0.6),
                                     translated_disk(torus, {1.0 / 3 + s, 2.0 / 3 + s}, 0.6),
                                     translated_disk(torus, {2.0 / 3 + s, 1.0 / 3 + s}, 0.6)});
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("single set interpolates to three on the middle window") {
  const auto plane = make_surface(SurfaceKind::Plane, 1.0, {16, 16});
  const auto big = translated_disk(plane, {0.5, 0.5}, 4.0, {.allow_overflow = true});
  const auto cover = make_discrete_cover(plane, {big});
  const auto fp = canonical_partition(cover);
  const auto ip = continuous_from_discrete(cover, fp, 2);
  CHECK(ip.cover.size() == 12);
  const auto [first, last] = ip.window(0);
  CHECK(first == 4);
  CHECK(last == 8);
  REQUIRE(ip.partition.size() == 4);
  for (const auto& m : ip.partition.members) {
    CHECK(m.cell >= first);
    CHECK(m.cell < last);
    for (double v : m.field.values()) CHECK(v == 3.0);
  }
  CHECK(verify_partition(ip.partition).max_deviation < 1e-15);
  const std::vector<double> ones(12, 1.0);
  for (double a : window_weights(ip, ones)) CHECK(a == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("discrete to continuous on three disks") {
  const auto cover = three_disk_torus();
  const auto fp = canonical_partition(cover);
  const auto ip = continuous_from_discrete(cover, fp);
  CHECK(ip.cover.size() == 12);
  CHECK(ip.cover.samples[2] == cover.sets[0]);
  CHECK(ip.cover.samples[3] == cover.sets[0]);
  CHECK(ip.cover.samples[8] == cover.sets[2]);
  CHECK(ip.cover.samples[11] == cover.sets[2]);
  const auto r = verify_partition(ip.partition);
  CHECK(r.max_deviation < 1e-12);
  CHECK(r.supports_ok);

  // sum_k a'_k F'_k = sum_s alpha_s w_s F_s for alpha piecewise constant.
  std::vector<double> alpha(12);
  for (std::size_t s = 0; s < 12; ++s) alpha[s] = 0.25 + 0.1 * static_cast<double>(s / 4);
  const auto ap = window_weights(ip, alpha);
  ScalarField lhs(cover.surface), rhs(cover.surface);
  for (const auto& m : fp.members) lhs.axpy(ap[m.cell], m.field);
  for (const auto& m : ip.partition.members) rhs.axpy(alpha[m.cell] * m.weight, m.field);
  CHECK(max_abs_diff(lhs, rhs) < 1e-12);
}

TEST_CASE("round trip through the interpolation") {
  const auto cover = three_disk_torus();
  const auto fp = canonical_partition(cover);
  for (int m : {1, 2}) {
    const auto ip = continuous_from_discrete(cover, fp, m);
    const auto cg = coarse_grain(ip.cover, ip.partition, 12);
    REQUIRE(cg.cover.size() == 3);
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(cg.cover.sets[j] == cover.sets[j]);
      CHECK(max_abs_diff(cg.partition.members[j].field, fp.members[j].field) < 1e-12);
    }
  }
}

TEST_CASE("coarse graining the two-row cover") {
  const auto torus = make_surface(SurfaceKind::Torus, 1.0, {48, 48});
  const auto cover = make_continuous_cover(torus, two_row_path(), 0.45, 128, {.eta = 0.5});
  const auto p = canonical_partition(cover);
  const auto leb = lebesgue_windows(cover);
  CHECK(leb.min_run == 9);
  CHECK(leb.windows == 16);

  // A thin margin forces one window per sample.
  const auto thin = make_continuous_cover(torus, two_row_path(), 0.45, 64);
  CHECK(lebesgue_windows(thin).windows == 64);

  const auto cg = coarse_grain(cover, p, 16);
  CHECK(cg.per_window == 8);
  CHECK(verify_partition(cg.partition).max_deviation < 1e-10);
  for (std::size_t k = 0; k < 16; ++k) {
    const auto& e = cover.samples[cg.window_sample[k]];
    CHECK(e == cg.cover.sets[cg.window_set[k]]);
  }

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> ap(cg.cover.size());
  for (double& a : ap) a = u(rng);
  const auto alpha = induced_interval_weight(cg, ap);
  ScalarField lhs(torus), rhs(torus);
  for (const auto& m : cg.partition.members) lhs.axpy(ap[m.cell], m.field);
  for (const auto& m : p.members) rhs.axpy(alpha[m.cell] * m.weight, m.field);
  CHECK(max_abs_diff(lhs, rhs) < 1e-12);
}

TEST_CASE("constant-in-t partition") {
  const auto plane = make_surface(SurfaceKind::Plane, 1.0, {16, 16});
  const CenterPath still{{{0.5, 0.5}}, false};
  const auto cover = make_continuous_cover(plane, still, 4.0, 8, {.allow_overflow = true});
  const auto p = canonical_partition(cover);
  const auto cg = coarse_grain(cover, p, 4);
  REQUIRE(cg.cover.size() == 1);
  for (double v : cg.partition.members[0].field.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(lebesgue_windows(cover).windows == 1);
}

TEST_CASE("coarse graining errors") {
  const auto torus = make_surface(SurfaceKind::Torus, 1.0, {32, 32});
  const auto cover = make_continuous_cover(torus, two_row_path(), 0.3, 64);
  const auto p = canonical_partition(cover);
  CHECK_THROWS_AS(coarse_grain(cover, p, 1), Error);
  CHECK_THROWS_AS(coarse_grain(cover, p, 3), Error);
  CHECK_THROWS_AS(coarse_grain(cover, p, 0), Error);
  const auto other = make_continuous_cover(torus, two_row_path(), 0.3, 32);
  CHECK_THROWS_AS(coarse_grain(other, p, 4), Error);

  const auto disc = three_disk_torus(32);
  CHECK_THROWS_AS(continuous_from_discrete(disc, canonical_partition(disc), 0), Error);
  CHECK_THROWS_AS(continuous_from_discrete(disc, p), Error);
}
