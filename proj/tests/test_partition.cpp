#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pbcover/partition.hpp"

using namespace pbcover;
using std::numbers::pi;

namespace {

CenterPath two_row_path() {
  const double third = 1.0 / 3.0;
  return {{{0, 0.25}, {third, 0.25}, {2 * third, 0.25}, {1, 0.25},
           {1, 0.75}, {2 * third, 0.75}, {third, 0.75}, {0, 0.75}},
          true};
}

DiscreteCover two_disk_torus(int n = 64) {
  const auto torus = make_surface(SurfaceKind::Torus, 1.0, {n, n});
  // Two embedded disks cannot cover the torus; the collars wrap.
  const EmbeddingOptions wrap{.allow_overflow = true};
  return make_discrete_cover(torus, {translated_disk(torus, {0.25, 0.25}, 0.95, wrap),
                                     translated_disk(torus, {0.75, 0.75}, 0.95, wrap)});
}

DiscreteCover two_cap_sphere() {
  const auto sphere = make_surface(SurfaceKind::Sphere, 4 * pi, {64, 32});
  const EmbeddingOptions narrow{.eta = 0.04};
  return make_discrete_cover(sphere, {cap_embedding(sphere, {0.0, 1.0}, 2.2 * pi, narrow),
                                      cap_embedding(sphere, {0.0, -1.0}, 2.2 * pi, narrow)});
}

}  // namespace

TEST_CASE("profile kinds") {
  CHECK(profile_kind_from_string(to_string(ProfileKind::Polynomial)) == ProfileKind::Polynomial);
  CHECK(profile_kind_from_string(to_string(ProfileKind::FlatExponential)) == ProfileKind::FlatExponential);
  CHECK_THROWS_AS(profile_kind_from_string("gaussian"), Error);
  for (auto kind : {ProfileKind::SmoothstepPower, ProfileKind::Polynomial, ProfileKind::FlatExponential}) {
    const BumpProfile p{kind, 3.0, 0.2};
    CHECK(profile_value(p, 0.0) == doctest::Approx(1.0));
    CHECK(profile_value(p, 1.0) == 0.0);
    CHECK(profile_value(p, 1.5) == 0.0);
    CHECK(profile_value(p, 0.5) > 0.0);
  }
  CHECK(profile_value({ProfileKind::SmoothstepPower, 2.0, 0.5}, 0.4) == 1.0);
}

TEST_CASE("profile validation") {
  CHECK_THROWS_AS(validate({ProfileKind::SmoothstepPower, 1.5}), Error);
  CHECK_THROWS_AS(validate({ProfileKind::SmoothstepPower, 2.0, 1.0}), Error);
  CHECK_THROWS_AS(validate({ProfileKind::SmoothstepPower, 2.0, -0.1}), Error);
  CHECK_THROWS_AS(validate({ProfileKind::SmoothstepPower, 2.0, 0.0, 1.0}), Error);
  CHECK_NOTHROW(validate({ProfileKind::Polynomial, 6.0, 0.99}));
}

TEST_CASE("single set gives the constant function") {
  const auto plane = make_surface(SurfaceKind::Plane, 1.0, {32, 32});
  const auto cover =
      make_discrete_cover(plane, {translated_disk(plane, {0.5, 0.5}, 4.0, {.allow_overflow = true})});
  const auto p = canonical_partition(cover);
  REQUIRE(p.size() == 1);
  for (double v : p.members[0].field.values()) CHECK(v == 1.0);
  CHECK(verify_partition(p).ok());
}

TEST_CASE("two-disk torus partition") {
  const auto cover = two_disk_torus();
  const auto p = canonical_partition(cover);
  REQUIRE(p.size() == 2);
  const auto r = verify_partition(p);
  CHECK(r.ok());
  CHECK(r.max_deviation < 1e-15);
  for (std::size_t i = 0; i < p.members[0].field.size(); ++i)
    CHECK(p.members[0].field[i] + p.members[1].field[i] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("continuous two-row partition") {
  const auto torus = make_surface(SurfaceKind::Torus, 1.0, {64, 64});
  const auto cover = make_continuous_cover(torus, two_row_path(), 0.3, 128);
  const auto p = canonical_partition(cover);
  CHECK(p.kind == PartitionKind::Continuous);
  CHECK(p.cells == 128);
  const auto r = verify_partition(p);
  CHECK(r.max_deviation < 1e-10);
  CHECK(r.min_value >= 0.0);
  CHECK(r.supports_ok);
}

TEST_CASE("verify flags corruption and support violations") {
  const auto cover = two_disk_torus(32);
  auto p = canonical_partition(cover);
  p.members[0].field[100] += 0.1;
  const auto r = verify_partition(p);
  CHECK(r.max_deviation == doctest::Approx(0.1).epsilon(1e-9));
  CHECK_FALSE(r.ok());

  auto q = canonical_partition(cover);
  const auto& e = q.members[1].embedding;
  for (std::size_t i = 0; i < q.surface.size(); ++i)
    if (e.covers(q.surface.point(i))) q.members[1].field[i] += 0.0 + 1e-3;
  const auto s = verify_partition(q);
  CHECK_FALSE(s.supports_ok);
  CHECK(s.first_bad_member == 1);
  CHECK(s.support_violations > 0);
}

TEST_CASE("zero bump mass is an error") {
  const auto torus = make_surface(SurfaceKind::Torus, 1.0, {32, 32});
  const auto cover = two_disk_torus(32);
  const std::vector<double> w{1.0, 1.0};
  const std::vector<double> amps{1.0, 0.0};
  const std::vector<Point2> offs(2);
  CHECK_THROWS_AS(normalized_partition(torus, PartitionKind::Discrete, cover.sets, w, {}, amps, offs), Error);
  const std::vector<double> bad{1.0};
  CHECK_THROWS_AS(normalized_partition(torus, PartitionKind::Discrete, cover.sets, w, {}, bad, offs), Error);
}

TEST_CASE("family default matches canonical") {
  const auto cover = two_disk_torus(32);
  const PartitionFamily fam(cover);
  CHECK(fam.dimension() == 4);
  const auto a = fam(fam.default_theta());
  const auto b = canonical_partition(cover, fam.base_profile());
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t i = 0; i < a.members[k].field.size(); ++i)
      CHECK(a.members[k].field[i] == b.members[k].field[i]);
}

TEST_CASE("family amplitude zero on a redundant set") {
  const auto sphere = make_surface(SurfaceKind::Sphere, 4 * pi, {64, 32});
  const auto cover = make_discrete_cover(
      sphere, {cap_embedding(sphere, {0.0, 1.0}, 2.2 * pi), cap_embedding(sphere, {0.0, -1.0}, 2.2 * pi),
               cap_embedding(sphere, {0.0, 0.0}, 1.0)});
  const PartitionFamily fam(cover);
  const std::vector<double> theta{2.0, 0.0, 1.0, 1.0, 0.0};
  const auto p = fam(theta);
  CHECK(verify_partition(p).ok());
  double mass = 0.0;
  for (const auto& m : p.members)
    if (m.cell == 2)
      for (double v : m.field.values()) mass += std::abs(v);
  CHECK(mass == 0.0);
}

TEST_CASE("family bounds") {
  const auto plane = make_surface(SurfaceKind::Plane, 1.0, {32, 32});
  const auto big = translated_disk(plane, {0.5, 0.5}, 8.0, {.allow_overflow = true});
  const auto cover = make_discrete_cover(plane, {big, big});
  const PartitionFamily fam(cover, {.offsets = true});
  CHECK(fam.dimension() == 8);
  CHECK(verify_partition(PartitionFamily(two_cap_sphere())(std::vector<double>{2.0, 0.0, 1.0, 1.0})).ok());
  auto theta = fam.default_theta();
  CHECK(fam.admissible(theta));
  theta[1] = 0.95;  // plateau towards 1
  CHECK_FALSE(fam.admissible(theta));
  CHECK_THROWS_AS(fam(theta), Error);
  theta[1] = 0.0;
  theta[4] = 1.0;
  theta[5] = 1.0;  // projected back to the unit disk
  CHECK(verify_partition(fam(theta)).ok());
  CHECK_FALSE(fam.admissible(std::vector<double>{2.0}));
  const double lip = lipschitz_estimate(fam, fam.default_theta());
  CHECK(std::isfinite(lip));
  CHECK(lip > 0.0);
}

TEST_CASE("bicover extension keeps normalization") {
  const auto torus = make_surface(SurfaceKind::Torus, 1.0, {32, 32});
  const auto base = square_translation_cover(torus, 32, 0.3);
  const auto inner = make_continuous_cover(torus, two_row_path(), 0.3, 16);
  const auto bc = make_bicover(base, inner);
  const auto fi = canonical_partition(inner);
  const auto ext = extend_partition_to_bicover(fi, bc);
  CHECK(ext.cells == 1024);
  CHECK(ext.size() == fi.size() * 2);
  const auto r = verify_partition(ext);
  CHECK(r.max_deviation < 1e-12);
  CHECK(r.supports_ok);
  CHECK_THROWS_AS(extend_partition_to_bicover(canonical_partition(base), bc), Error);
}

TEST_CASE("square partition along a curve") {
  const auto torus = make_surface(SurfaceKind::Torus, 1.0, {32, 32});
  const auto base = square_translation_cover(torus, 4, 0.3);
  const auto sq = canonical_partition(base);
  const HilbertCurve curve(2, 2);
  const auto along = reparametrize_by_curve(sq, curve);
  CHECK(verify_partition(along).max_deviation < 1e-12);
  for (std::size_t k = 0; k < along.size(); ++k) CHECK(along.members[k].cell == k);
  CHECK_THROWS_AS(reparametrize_by_curve(sq, HilbertCurve(2, 3)), Error);
}
