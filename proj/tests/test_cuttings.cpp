#include <doctest.h>

#include "expd/cuttings.hpp"
#include "expd/errors.hpp"
#include "expd/generators.hpp"
#include "oracles.hpp"

using namespace expd;

namespace {

CuttingCover cover_of(const Universe& v, const std::vector<std::vector<std::size_t>>& cells, double r, int D) {
  CuttingCover c;
  for (const auto& cell : cells) c.cells.emplace_back(v, cell);
  c.r = r;
  c.claimed_exponent = D;
  return c;
}

// Independent recheck of a cover against the definition.
void recheck(const FiniteRelation2& rel, const Subset& a, double r, const CuttingCover& cover) {
  std::vector<char> hit(rel.v().size, 0);
  for (const auto& cell : cover.cells) {
    auto members = cell.elements();
    for (auto v : members) hit[v] = 1;
    std::uint64_t crossing = 0;
    for (auto i : a.elements()) crossing += oracle::crosses(rel, i, members);
    CHECK(static_cast<double>(crossing) <= static_cast<double>(a.cardinality()) / r);
  }
  for (auto h : hit) CHECK(h);
}

}  // namespace

TEST_CASE("crossing definition") {
  // V = {1..8} as indices 0..7, one interval [2,5] = indices 1..4.
  auto rel = build_relation2(Universe("A", 1), Universe("V", 8), {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  auto cover = cover_of(rel.v(), {{0, 1}, {2, 3}, {4, 5}, {6, 7}}, 4, 1);
  const Bitset& fiber = rel.row(0);
  CHECK(crosses(fiber, cover.cells[0].bits()));
  CHECK(!crosses(fiber, cover.cells[1].bits()));
  CHECK(crosses(fiber, cover.cells[2].bits()));
  CHECK(!crosses(fiber, cover.cells[3].bits()));
}

TEST_CASE("verify_cutting examples") {
  // single cell V, four fibers of which two cross
  auto rel = build_relation2(Universe("A", 4), Universe("V", 3),
                             {{0, 0}, {1, 0}, {1, 1}, {2, 0}, {2, 1}, {2, 2}});
  Subset a = Subset::full(rel.u());
  auto one = cover_of(rel.v(), {{0, 1, 2}}, 2, 1);
  auto rep = verify_cutting(rel, a, 2, one);
  CHECK(rep.max_crossing == 2);
  CHECK(rep.valid);
  auto rep3 = verify_cutting(rel, a, 3, one);
  CHECK(!rep3.valid);
  REQUIRE(rep3.first_violation);
  CHECK(*rep3.first_violation == 0);

  auto singles = cover_of(rel.v(), {{0}, {1}, {2}}, 100, 1);
  auto rs = verify_cutting(rel, a, 100, singles);
  CHECK(rs.valid);
  CHECK(rs.max_crossing == 0);
  CHECK(rs.cell_count == 3);

  auto gap = cover_of(rel.v(), {{0}, {2}}, 2, 1);
  auto rg = verify_cutting(rel, a, 2, gap);
  CHECK(!rg.valid);
  CHECK(!rg.covers);
  REQUIRE(rg.uncovered);
  CHECK(*rg.uncovered == 1);
}

TEST_CASE("interval_cutting") {
  SUBCASE("all fibers equal V") {
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 10; ++j) e.push_back({i, j});
    auto rel = build_relation2(Universe("A", 5), Universe("V", 10), e);
    auto c = interval_cutting(rel, Subset::full(rel.u()), 4);
    auto rep = verify_cutting(rel, Subset::full(rel.u()), 4, c);
    CHECK(rep.valid);
    CHECK(rep.max_crossing == 0);
  }
  SUBCASE("64 random intervals on 256 points") {
    Rng rng(42);
    auto rel = random_intervals(256, 64, rng);
    Subset a = Subset::full(rel.u());
    auto c = interval_cutting(rel, a, 8);
    auto rep = verify_cutting(rel, a, 8, c);
    CHECK(rep.valid);
    CHECK(rep.cell_count <= 16);
    CHECK(c.claimed_exponent == 1);
    recheck(rel, a, 8, c);
  }
  SUBCASE("non-contiguous fiber") {
    auto rel = build_relation2(Universe("A", 1), Universe("V", 4), {{0, 0}, {0, 2}});
    CHECK_THROWS_AS(interval_cutting(rel, Subset::full(rel.u()), 2), FamilyError);
  }
}

TEST_CASE("box_grid_cutting") {
  SUBCASE("one rectangle covering everything") {
    Rng rng(1);
    auto inst = random_rectangles(4, 4, 0, rng);
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t j = 0; j < 16; ++j) e.push_back({0, j});
    auto rel = build_relation2(Universe("A", 1), inst.relation.v(), e);
    auto c = box_grid_cutting(rel, Subset::full(rel.u()), inst.points, 2);
    auto rep = verify_cutting(rel, Subset::full(rel.u()), 2, c);
    CHECK(rep.valid);
    CHECK(rep.max_crossing == 0);
  }
  SUBCASE("32 random rectangles on a 16x16 grid") {
    Rng rng(7);
    auto inst = random_rectangles(16, 16, 32, rng);
    Subset a = Subset::full(inst.relation.u());
    auto c = box_grid_cutting(inst.relation, a, inst.points, 4);
    auto rep = verify_cutting(inst.relation, a, 4, c);
    CHECK(rep.valid);
    CHECK(c.claimed_exponent == 2);
    CHECK(rep.fitted_c <= 8.0);
    recheck(inst.relation, a, 4, c);
  }
  SUBCASE("empty A") {
    Rng rng(2);
    auto inst = random_rectangles(8, 8, 10, rng);
    Subset none(inst.relation.u());
    auto c = box_grid_cutting(inst.relation, none, inst.points, 4);
    CHECK(verify_cutting(inst.relation, none, 4, c).valid);
  }
  SUBCASE("non-rectangular fiber") {
    Rng rng(3);
    auto inst = random_rectangles(4, 4, 1, rng);
    // points 0 and 15 are opposite corners; their bounding box holds all 16
    auto rel = build_relation2(Universe("A", 1), inst.relation.v(), {{0, 0}, {0, 15}});
    CHECK_THROWS_AS(box_grid_cutting(rel, Subset::full(rel.u()), inst.points, 2), FamilyError);
  }
}

TEST_CASE("greedy_cutting") {
  SUBCASE("few trace classes") {
    // fibers {0,1,2} and {3,4,5}: two trace classes plus nothing else
    auto rel = build_relation2(Universe("A", 2), Universe("V", 6),
                               {{0, 0}, {0, 1}, {0, 2}, {1, 3}, {1, 4}, {1, 5}});
    auto c = greedy_cutting(rel, Subset::full(rel.u()), 4, 100);
    REQUIRE(c);
    auto rep = verify_cutting(rel, Subset::full(rel.u()), 4, *c);
    CHECK(rep.valid);
    CHECK(rep.max_crossing == 0);
    CHECK(rep.cell_count <= 2);
  }
  SUBCASE("identity matching") {
    auto rel = identity_matching(12);
    auto c = greedy_cutting(rel, Subset::full(rel.u()), 6, 100);
    REQUIRE(c);
    auto rep = verify_cutting(rel, Subset::full(rel.u()), 6, *c);
    CHECK(rep.valid);
  }
  SUBCASE("dense random relations: verified cover or failure") {
    std::size_t produced = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng(seed, 21);
      auto rel = random_bipartite(64, 64, 0.5, rng);
      Subset a = Subset::full(rel.u());
      auto c = greedy_cutting(rel, a, 4, 128);
      if (c) {
        ++produced;
        CHECK(verify_cutting(rel, a, 4, *c).valid);
        CHECK(c->cells.size() <= 128);
      }
    }
    MESSAGE("greedy covers produced: " << produced << " / 100");
  }
}

TEST_CASE("property: constructed covers pass the verifier") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed, 22);
    auto iv = random_intervals(50 + rng.below(200), 10 + rng.below(100), rng);
    Subset a = Subset::full(iv.u());
    for (double r : {2.0, 3.0, 8.0}) {
      auto c = interval_cutting(iv, a, r);
      auto rep = verify_cutting(iv, a, r, c);
      CHECK(rep.valid);
      CHECK(static_cast<double>(rep.cell_count) <= 2 * r);
      CHECK(c.crossing_counts.size() == c.cells.size());
    }
    auto rect = random_rectangles(4 + rng.below(12), 4 + rng.below(12), 5 + rng.below(40), rng);
    Subset ra = Subset::full(rect.relation.u());
    auto bc = box_grid_cutting(rect.relation, ra, rect.points, 3);
    CHECK(verify_cutting(rect.relation, ra, 3, bc).valid);
    recheck(rect.relation, ra, 3, bc);

    // singletons and trace classes are never crossed
    auto rel = random_bipartite(10, 12, 0.4, rng);
    for (std::size_t v = 0; v < 12; ++v)
      for (std::size_t i = 0; i < 10; ++i) CHECK(!oracle::crosses(rel, i, {v}));
  }
}

TEST_CASE("cover JSON") {
  Rng rng(9);
  auto rel = random_intervals(40, 10, rng);
  auto c = interval_cutting(rel, Subset::full(rel.u()), 2);
  auto j = to_json(c);
  CHECK(j.contains("r"));
  CHECK(j.contains("D"));
  CHECK(j["cells"].size() == c.cells.size());
  CHECK(j["crossing_counts"].size() == c.cells.size());
  auto back = cover_from_json(j, rel.v());
  CHECK(back.cells == c.cells);
  CHECK(back.crossing_counts == c.crossing_counts);
  CHECK(back.claimed_exponent == 1);
}
