#include <doctest.h>

#include <numeric>

#include "expd/dsl.hpp"
#include "expd/errors.hpp"
#include "expd/es_pipeline.hpp"
#include "oracles.hpp"

using namespace expd;

namespace {

FiniteRelation3 from_expr(const char* text, const GridSpec& g) { return instantiate3(parse(text), g, g, g).relation; }

FiniteRelation3 sum_mod5() { return from_expr("x+y=z mod 5", GridSpec::full_mod()); }

std::set<std::pair<std::uint64_t, std::uint64_t>> edge_set(const FiniteRelation2& g) {
  std::set<std::pair<std::uint64_t, std::uint64_t>> s;
  for (auto [i, j] : g.edges()) s.insert({i, j});
  return s;
}

Subset full(const Universe& u) { return Subset::full(u); }

std::uint64_t count_all(const FiniteRelation3& f) { return count_grid3(f, full(f.x()), full(f.y()), full(f.z())); }

}  // namespace

TEST_CASE("delta_degree examples") {
  auto d5 = delta_degree(sum_mod5(), 1);
  REQUIRE(d5.d);
  CHECK(*d5.d == 1);
  CHECK(d5.pairing_max == std::array<std::uint64_t, 3>{1, 1, 1});

  auto d4 = delta_degree(from_expr("x+y=z", GridSpec::range(0, 4)), 1);
  CHECK(d4.d == 1u);

  Universe b("B", 2);
  std::vector<Triple> cube;
  for (std::size_t i = 0; i < 8; ++i) cube.push_back({i & 1, (i >> 1) & 1, (i >> 2) & 1});
  auto dc = delta_degree(build_relation3(b, b, b, cube), 1);
  CHECK(!dc.d);
  CHECK(dc.pairing_max == std::array<std::uint64_t, 3>{2, 2, 2});
  CHECK(delta_degree(build_relation3(b, b, b, cube), 2).d == 2u);
}

TEST_CASE("cylindrical_witness examples") {
  // I × (J × K) block with |I| = |J| = |K| = 3
  std::vector<Triple> t;
  for (std::size_t x = 0; x < 3; ++x)
    for (std::size_t y = 0; y < 3; ++y)
      for (std::size_t z = 0; z < 3; ++z) t.push_back({x, y, z});
  Universe u("U", 5);
  auto f = build_relation3(u, u, u, t);
  auto w = cylindrical_witness(f, 3);
  REQUIRE(w);
  CHECK(w->axis == 0);
  CHECK(w->block.s_side == std::vector<std::size_t>{0, 1, 2});

  CHECK(!cylindrical_witness(sum_mod5(), 2));
  CHECK(!cylindrical_witness(build_relation3(u, u, u, {}), 2));
}

TEST_CASE("property: cylindrical_witness agrees with exhaustive search on every split") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed, 31);
    auto f = oracle::random_bounded_degree(2 + rng.below(4), 2 + rng.below(3), 2 + rng.below(3), 3, 60, rng);
    for (std::size_t k = 2; k <= 3; ++k) {
      bool any = false;
      for (std::size_t axis = 0; axis < 3; ++axis) any = any || oracle::has_kst(flatten(f, axis), k, k);
      CHECK(cylindrical_witness(f, k).has_value() == any);
    }
  }
}

TEST_CASE("derive_G examples") {
  auto f = sum_mod5();
  auto g = derive_G(f);
  CHECK(g.edge_count() == 125);
  CHECK(g.u().size == 25);
  for (auto [yy, zz] : g.edges()) {
    const std::size_t y = yy / 5, y2 = yy % 5, z = zz / 5, z2 = zz % 5;
    CHECK((z + 5 - y) % 5 == (z2 + 5 - y2) % 5);
  }

  Universe u("U", 3);
  CHECK(derive_G(build_relation3(u, u, u, {})).edge_count() == 0);
  auto single = derive_G(build_relation3(u, u, u, {{2, 1, 0}}));
  REQUIRE(single.edge_count() == 1);
  CHECK(single.edges()[0] == std::pair<std::size_t, std::size_t>{1 * 3 + 1, 0});

  CHECK_THROWS_AS(derive_G(f, 600), CapacityError);
}

TEST_CASE("property: derive_G equals brute-force quadruples") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed, 32);
    auto f = oracle::random_bounded_degree(1 + rng.below(6), 1 + rng.below(6), 1 + rng.below(6), 6, 80, rng);
    auto g = derive_G(f);
    CHECK(edge_set(g) == oracle::g_brute(f));
    Subset b = oracle::random_subset(f.y(), 0.6, rng), c = oracle::random_subset(f.z(), 0.6, rng);
    auto within = g_edges_within(f, b, c);
    std::size_t expect = 0;
    const std::size_t ny = f.y().size, nz = f.z().size;
    for (auto [yy, zz] : oracle::g_brute(f))
      expect += b.contains(yy / ny) && b.contains(yy % ny) && c.contains(zz / nz) && c.contains(zz % nz);
    CHECK(within.size() == expect);
  }
}

TEST_CASE("check_G_fiber_bounds") {
  Rng rng(1);
  auto f = sum_mod5();
  auto deg = delta_degree(f, 1);
  auto rep = check_G_fiber_bounds(f, derive_G(f), deg, rng);
  CHECK(rep.ok);
  CHECK(rep.max_z_fiber == 1);
  CHECK(rep.max_y_fiber == 1);
  CHECK(rep.bound == 1);

  auto units = from_expr("x*y*z = 1 mod 7", GridSpec::range(1, 7));
  auto du = delta_degree(units, 1);
  auto ru = check_G_fiber_bounds(units, derive_G(units), du, rng);
  CHECK(ru.ok);
  CHECK(ru.max_z_fiber == 1);

  // edge-list form agrees
  auto edges = g_edges_within(units, full(units.y()), full(units.z()));
  Rng rng2(1);
  auto re = check_G_fiber_bounds(units, edges, du, rng2);
  CHECK(re.max_z_fiber == ru.max_z_fiber);
  CHECK(re.max_y_fiber == ru.max_y_fiber);
  CHECK(re.ok);

  DeltaDegree none;
  CHECK_THROWS_AS(check_G_fiber_bounds(f, derive_G(f), none, rng), PreconditionError);
}

TEST_CASE("cauchy_schwarz_check") {
  auto f = sum_mod5();
  auto deg = delta_degree(f, 1);
  auto rep = cauchy_schwarz_check(f, full(f.x()), full(f.y()), full(f.z()), deg);
  CHECK(rep.f_count == 25);
  CHECK(rep.g_count == 125);
  CHECK(rep.rhs == doctest::Approx(25.0));
  CHECK(rep.equality);
  CHECK(rep.ok());

  Subset one(f.x(), {3});
  auto single = cauchy_schwarz_check(f, one, full(f.y()), full(f.z()), deg);
  CHECK(single.w_count == single.f_count * single.f_count);
  CHECK(single.cs_step);

  CHECK_THROWS_AS(cauchy_schwarz_check(f, full(f.x()), full(f.y()), full(f.z()), DeltaDegree{}),
                  PreconditionError);
}

TEST_CASE("property: d^2 law and Cauchy-Schwarz on random bounded-degree relations") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed, 33);
    const std::size_t dmax = 1 + rng.below(3);
    auto f = oracle::random_bounded_degree(3 + rng.below(8), 3 + rng.below(8), 3 + rng.below(8), dmax, 300, rng);
    auto deg = delta_degree(f, dmax);
    REQUIRE(deg.d);
    CHECK(deg.pairing_max == oracle::pairing_max(f));
    const std::uint64_t d = *deg.d;

    auto g = derive_G(f);
    auto fr = check_G_fiber_bounds(f, g, deg, rng);
    CHECK(fr.ok);
    CHECK(fr.max_z_fiber <= d * d);
    CHECK(fr.max_y_fiber <= d * d);

    Subset a = oracle::random_subset(f.x(), 0.7, rng), b = oracle::random_subset(f.y(), 0.7, rng),
           c = oracle::random_subset(f.z(), 0.7, rng);
    auto cs = cauchy_schwarz_check(f, a, b, c, deg);
    auto brute = oracle::cs_counts(f, a, b, c);
    CHECK(cs.f_count == brute.f);
    CHECK(cs.w_count == brute.w);
    CHECK(cs.g_count == brute.g);
    CHECK(cs.ok());
    const unsigned __int128 lhs = static_cast<unsigned __int128>(brute.f) * brute.f;
    const unsigned __int128 rhs = static_cast<unsigned __int128>(d) * d * a.cardinality() * brute.g;
    CHECK(lhs <= rhs);
  }
}

TEST_CASE("large_subset_trim") {
  auto f = sum_mod5();
  auto g = derive_G(f);
  Subset b = full(f.y()), c = full(f.z());
  Subset y0(g.u()), z0(g.v());

  auto none = large_subset_trim(g, b, c, y0, z0, 1);
  CHECK(none.boundary_y == 0);
  CHECK(none.boundary_z == 0);
  CHECK(none.main == none.total);
  CHECK(none.ok);

  for (std::size_t i = 0; i < 5; ++i) y0.insert(i * 5 + i);
  auto diag = large_subset_trim(g, b, c, y0, z0, 1);
  CHECK(diag.b_square_in_y0 == 5);
  CHECK(diag.boundary_y <= 25);
  CHECK(diag.ok);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed, 34);
    Subset ry(g.u()), rz(g.v());
    for (std::size_t k = 0; k < 10; ++k) ry.insert(rng.below(25));
    for (std::size_t k = 0; k < 6; ++k) rz.insert(rng.below(25));
    auto rep = large_subset_trim(g, b, c, ry, rz, 1);
    CHECK(rep.decomposition_holds);
    CHECK(rep.ok);
    CHECK(rep.boundary_y <= 2 * 5 * 5);
  }
}

TEST_CASE("families") {
  GroupLikeSpec cyc;
  auto fam = make_family(cyc);
  auto f5 = fam.generate(5);
  CHECK(f5.relation.size() == 25);
  for (const auto& t : f5.relation.triples()) CHECK((t[0] + t[1] + t[2]) % 5 == 0);

  GroupLikeSpec units;
  units.group = GroupLikeSpec::Group::UnitsModP;
  auto u7 = make_family(units).generate(7);
  CHECK(u7.relation.size() == 36);
  CHECK_THROWS_AS(make_family(units).generate(8), ParameterError);

  CylindricalSpec cyl;
  for (std::uint64_t n : {4, 9}) CHECK(count_all(make_family(cyl).generate(n).relation) >= n * n);

  GroupLikeSpec bad;
  bad.twists[1] = Twist::affine(2, 0);
  CHECK_THROWS_AS(make_family(bad).generate(8), FamilyError);
  CHECK_THROWS_AS(make_family(GroupLikeSpec{GroupLikeSpec::Group::Cyclic,
                                            {Twist::identity(), Twist::explicit_map({0, 0}), Twist::identity()}}),
                  FamilyError);

  DslFamilySpec dsl;
  dsl.expr = "x+y=z";
  auto dfam = make_family(dsl);
  CHECK(count_all(dfam.generate(4).relation) == 10);
  CHECK(dfam.name() == "dsl:x + y = z");
}

TEST_CASE("property: twists are relabelings") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    Rng rng(seed, 35);
    auto f = oracle::random_bounded_degree(4 + rng.below(4), 4 + rng.below(4), 4 + rng.below(4), 2, 120, rng);
    std::array<std::vector<std::size_t>, 3> perm;
    for (std::size_t k = 0; k < 3; ++k) perm[k] = Twist::random(rng.next()).materialize(f.axis(k).size);
    auto g = twist_relation(f, perm[0], perm[1], perm[2]);

    auto df = delta_degree(f, 2), dg = delta_degree(g, 2);
    CHECK(df.d == dg.d);
    CHECK(df.pairing_max == dg.pairing_max);
    CHECK(cylindrical_witness(f, 2).has_value() == cylindrical_witness(g, 2).has_value());
    CHECK(derive_G(f).edge_count() == derive_G(g).edge_count());

    Subset a = oracle::random_subset(f.x(), 0.5, rng), b = oracle::random_subset(f.y(), 0.5, rng),
           c = oracle::random_subset(f.z(), 0.5, rng);
    Subset a2(f.x()), b2(f.y()), c2(f.z());
    for (auto i : a.elements()) a2.insert(perm[0][i]);
    for (auto i : b.elements()) b2.insert(perm[1][i]);
    for (auto i : c.elements()) c2.insert(perm[2][i]);
    CHECK(count_grid3(f, a, b, c) == count_grid3(g, a2, b2, c2));
  }
}

TEST_CASE("property: group-like cyclic counts are n^2") {
  for (std::uint64_t n : {1, 2, 5, 12, 33}) {
    GroupLikeSpec s;
    CHECK(count_all(make_family(s).generate(n).relation) == n * n);
    s.twists = {Twist::random(n), Twist::affine(5, 3), Twist::random(n + 1)};
    if (std::gcd<std::uint64_t>(5, n) == 1) CHECK(count_all(make_family(s).generate(n).relation) == n * n);
  }
}
