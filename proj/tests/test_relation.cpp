#include <doctest.h>

#include <numeric>
#include <thread>

#include "expd/errors.hpp"
#include "expd/generators.hpp"
#include "expd/relation.hpp"
#include "expd/relation_io.hpp"
#include "oracles.hpp"

using namespace expd;

namespace {

FiniteRelation3 sum_mod(std::size_t m) {
  std::vector<Triple> t;
  for (std::size_t x = 0; x < m; ++x)
    for (std::size_t y = 0; y < m; ++y)
      for (std::size_t z = 0; z < m; ++z)
        if ((x + y) % m == z) t.push_back({x, y, z});
  return build_relation3(Universe("X", m), Universe("Y", m), Universe("Z", m), t);
}

}  // namespace

TEST_CASE("build_relation2 basics") {
  Universe u("U", 2), v("V", 2);
  CHECK(build_relation2(u, v, {}).edge_count() == 0);
  auto k22 = build_relation2(u, v, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  CHECK(k22.edge_count() == 4);
  CHECK(k22.recount() == 4);
  auto id = build_relation2(Universe("U", 3), Universe("V", 3), {{0, 0}, {1, 1}, {2, 2}});
  CHECK(id.edge_count() == 3);

  SUBCASE("duplicates are idempotent") {
    auto d = build_relation2(u, v, {{0, 1}, {0, 1}, {0, 1}});
    CHECK(d.edge_count() == 1);
    CHECK(d.recount() == 1);
  }
  SUBCASE("out of range names the pair") {
    try {
      build_relation2(u, v, {{0, 0}, {2, 1}});
      FAIL("expected InputError");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()).find("(2,1)") != std::string::npos);
    }
  }
}

TEST_CASE("build_relation3 basics") {
  Universe b("B", 2);
  CHECK(build_relation3(b, b, b, {}).size() == 0);
  std::vector<Triple> cube;
  for (std::size_t i = 0; i < 8; ++i) cube.push_back({i & 1, (i >> 1) & 1, (i >> 2) & 1});
  cube.push_back({0, 0, 0});
  CHECK(build_relation3(b, b, b, cube).size() == 8);
  CHECK(sum_mod(5).size() == 25);
  CHECK_THROWS_AS(build_relation3(b, b, b, {{0, 0, 2}}), InputError);
}

TEST_CASE("fiber2") {
  auto id = identity_matching(3);
  CHECK(fiber2(id, Side::Left, 1).elements() == std::vector<std::size_t>{1});
  auto k22 = build_relation2(Universe("U", 2), Universe("V", 2), {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  CHECK(fiber2(k22, Side::Left, 0).elements() == std::vector<std::size_t>{0, 1});
  CHECK(fiber2(k22, Side::Right, 1).elements() == std::vector<std::size_t>{0, 1});
  auto empty = build_relation2(Universe("U", 3), Universe("V", 4), {});
  CHECK(fiber2(empty, Side::Right, 3).cardinality() == 0);
  CHECK_THROWS_AS(fiber2(empty, Side::Left, 3), InputError);
}

TEST_CASE("count_grid2") {
  auto k22 = build_relation2(Universe("U", 2), Universe("V", 2), {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  CHECK(count_grid2(k22, Subset::full(k22.u()), Subset::full(k22.v())) == 4);
  CHECK(count_grid2(k22, Subset(k22.u(), {0}), Subset::full(k22.v())) == 2);

  auto pg = projective_plane_incidence(7);
  CHECK(pg.u().size == 57);
  CHECK(count_grid2(pg, Subset::full(pg.u()), Subset::full(pg.v())) == 456);
  CHECK(oracle::count2(pg) == 456);

  CHECK_THROWS_AS(count_grid2(k22, Subset::full(Universe("W", 2)), Subset::full(k22.v())), InputError);
}

TEST_CASE("count_grid3") {
  auto f = sum_mod(5);
  CHECK(count_grid3(f, Subset::full(f.x()), Subset::full(f.y()), Subset::full(f.z())) == 25);

  std::vector<Triple> t;
  for (std::size_t x = 0; x < 4; ++x)
    for (std::size_t y = 0; y < 4; ++y)
      if (x + y <= 3) t.push_back({x, y, x + y});
  Universe u4("N", 4);
  auto g = build_relation3(u4, u4, u4, t);
  CHECK(count_grid3(g, Subset::full(u4), Subset::full(u4), Subset::full(u4)) == 10);

  auto e = build_relation3(u4, u4, u4, {});
  CHECK(count_grid3(e, Subset::full(u4), Subset::full(u4), Subset::full(u4)) == 0);
}

TEST_CASE("pair_universe") {
  auto p3 = pair_universe(Universe("Y", 3));
  CHECK(p3.universe().size == 9);
  CHECK(p3.encode(1, 2) == 5);
  CHECK(p3.decode(5) == std::pair<std::size_t, std::size_t>{1, 2});
  auto p1 = pair_universe(Universe("Y", 1));
  CHECK(p1.universe().size == 1);
  CHECK(p1.encode(0, 0) == 0);
  CHECK(pair_universe(Universe("Y", 5)).universe().size == 25);
  CHECK_THROWS_AS(pair_universe(Universe("Y", std::size_t{1} << 40)), CapacityError);
}

TEST_CASE("universe labels are validated") {
  CHECK_THROWS_AS(Universe("L", std::vector<Label>{std::int64_t{1}, std::int64_t{1}}).validate(), InputError);
  CHECK_NOTHROW(Universe("L", std::vector<Label>{std::int64_t{1}, std::string("1")}).validate());
}

TEST_CASE("property: counting identities on random relations") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed, 7);
    const std::size_t m = 1 + rng.below(24), n = 1 + rng.below(24);
    auto rel = random_bipartite(m, n, 0.05 + 0.9 * (rng.below(100) / 100.0), rng);
    auto a = oracle::random_subset(rel.u(), 0.6, rng);
    auto b = oracle::random_subset(rel.v(), 0.6, rng);

    CHECK(count_grid2(rel, a, b) == oracle::count2(rel, a, b));
    CHECK(count_grid2(rel, Subset::full(rel.u()), Subset::full(rel.v())) == rel.edge_count());

    std::uint64_t by_fibers = 0;
    for (auto i : a.elements()) by_fibers += (fiber2(rel, Side::Left, i).bits() & b.bits()).count();
    CHECK(count_grid2(rel, a, b) == by_fibers);

    // Relabel both sides by random bijections.
    std::vector<std::size_t> pu(m), pv(n);
    std::iota(pu.begin(), pu.end(), std::size_t{0});
    std::iota(pv.begin(), pv.end(), std::size_t{0});
    rng.shuffle(pu);
    rng.shuffle(pv);
    std::vector<std::pair<std::size_t, std::size_t>> moved;
    for (auto [i, j] : rel.edges()) moved.push_back({pu[i], pv[j]});
    auto rel2 = build_relation2(rel.u(), rel.v(), moved);
    Subset a2(rel.u()), b2(rel.v());
    for (auto i : a.elements()) a2.insert(pu[i]);
    for (auto j : b.elements()) b2.insert(pv[j]);
    CHECK(count_grid2(rel2, a2, b2) == count_grid2(rel, a, b));
  }
}

TEST_CASE("property: count_grid3 matches brute force and relabelling") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Rng rng(seed, 8);
    auto f = oracle::random_bounded_degree(1 + rng.below(8), 1 + rng.below(8), 1 + rng.below(8), 4, 200, rng);
    auto a = oracle::random_subset(f.x(), 0.7, rng);
    auto b = oracle::random_subset(f.y(), 0.7, rng);
    auto c = oracle::random_subset(f.z(), 0.7, rng);
    const auto expect = oracle::count3(f, a, b, c);
    CHECK(count_grid3(f, a, b, c) == expect);

    std::array<std::vector<std::size_t>, 3> perm;
    for (std::size_t k = 0; k < 3; ++k) {
      perm[k].resize(f.axis(k).size);
      std::iota(perm[k].begin(), perm[k].end(), std::size_t{0});
      rng.shuffle(perm[k]);
    }
    std::vector<Triple> moved;
    for (const auto& t : f.triples()) moved.push_back({perm[0][t[0]], perm[1][t[1]], perm[2][t[2]]});
    auto g = build_relation3(f.x(), f.y(), f.z(), moved);
    Subset a2(f.x()), b2(f.y()), c2(f.z());
    for (auto i : a.elements()) a2.insert(perm[0][i]);
    for (auto i : b.elements()) b2.insert(perm[1][i]);
    for (auto i : c.elements()) c2.insert(perm[2][i]);
    CHECK(count_grid3(g, a2, b2, c2) == expect);
  }
}

TEST_CASE("fiber maps are built once under concurrent access") {
  auto f = sum_mod(31);
  std::vector<std::thread> pool;
  std::vector<const FiniteRelation3::FiberMap*> seen(8);
  for (std::size_t i = 0; i < seen.size(); ++i)
    pool.emplace_back([&, i] { seen[i] = &f.fibers(Pairing::XY); });
  for (auto& t : pool) t.join();
  for (auto* p : seen) CHECK(p == seen[0]);
  CHECK(seen[0]->size() == 31 * 31);
}

TEST_CASE("relation JSON round trip") {
  auto rel = build_relation2(Universe("U", std::vector<Label>{std::int64_t{5}, std::string("a")}),
                             Universe("V", 3), {{0, 2}, {1, 0}});
  auto j = to_json(rel);
  CHECK(j["kind"] == "rel2");
  CHECK(relation2_from_json(j) == rel);

  auto f = sum_mod(4);
  auto back = relation3_from_json(to_json(f));
  CHECK(back.triples() == f.triples());

  auto bad = to_json(rel);
  bad["pairs"].push_back({0, 3});
  CHECK_THROWS_AS(relation2_from_json(bad), InputError);
  CHECK(std::holds_alternative<FiniteRelation3>(relation_from_json(to_json(f))));
}
