#include <doctest.h>

#include "expd/dsl.hpp"
#include "expd/errors.hpp"
#include "oracles.hpp"

using namespace expd;
using dsl::NodeKind;

namespace {

std::uint64_t count_all(const FiniteRelation3& f) {
  return count_grid3(f, Subset::full(f.x()), Subset::full(f.y()), Subset::full(f.z()));
}

}  // namespace

TEST_CASE("parse examples") {
  auto e = parse("x + y = z");
  CHECK(e.lhs().kind == NodeKind::Add);
  CHECK(e.lhs().lhs->var == 'x');
  CHECK(e.lhs().rhs->var == 'y');
  CHECK(e.rhs().kind == NodeKind::Var);
  CHECK(!e.modulus());

  auto m = parse("x*y*z = 1 mod 7");
  REQUIRE(m.modulus());
  CHECK(*m.modulus() == 7);

  auto p = parse("x^2 + y^3 = z");
  CHECK(p.lhs().lhs->kind == NodeKind::Pow);
  CHECK(p.lhs().lhs->exponent == 2);
  CHECK(p.lhs().rhs->exponent == 3);
}

TEST_CASE("parse errors") {
  try {
    parse("x + \n y * = z");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 6);
  }
  CHECK_THROWS_AS(parse("x + w = z"), InputError);
  CHECK_THROWS_AS(parse("x^-2 = z"), InputError);
  CHECK_THROWS_AS(parse("x = z mod 1"), InputError);
  CHECK_THROWS_AS(parse("x = "), SyntaxError);
  CHECK_THROWS_AS(parse("x = y = z"), SyntaxError);
  CHECK_THROWS_AS(parse("x + z = y", "yz"), InputError);
}

TEST_CASE("canonical printing") {
  CHECK(parse("x+y=z").print() == "x + y = z");
  CHECK(parse("(x+y)*z = 1 mod 7").print() == "(x + y) * z = 1 mod 7");
  CHECK(parse("x - (y - z) = 0").print() == "x - (y - z) = 0");
  CHECK(parse("(x - y) - z = 0").print() == "x - y - z = 0");
  CHECK(parse("(x^2)^3 = y").print() == "(x^2)^3 = y");
  for (const char* text : {"x^2+y^3=z", "x*(y+z)^2 - 3 = 0 mod 11", "((x)) = ((y*z))", "x-y-(z-1)=2*x",
                           "x ^ 0 = 1", "123456789012345678901234567890*x=y"}) {
    auto once = parse(text);
    auto twice = parse(once.print());
    CHECK(once == twice);
    CHECK(twice.print() == once.print());
  }
}

TEST_CASE("instantiate3 examples") {
  auto four = GridSpec::range(0, 4);
  auto f = instantiate3(parse("x+y=z"), four, four, four).relation;
  CHECK(f.size() == 10);
  CHECK(count_all(f) == 10);

  auto units = GridSpec::range(1, 7);
  CHECK(instantiate3(parse("x*y*z = 1 mod 7"), units, units, units).relation.size() == 36);

  auto zero = GridSpec::explicit_list({0});
  auto one = instantiate3(parse("x+y=z"), zero, zero, zero).relation;
  REQUIRE(one.size() == 1);
  CHECK(one.triples()[0] == Triple{0, 0, 0});

  auto full = GridSpec::full_mod();
  CHECK(instantiate3(parse("x+y=z mod 5"), full, full, full).relation.size() == 25);

  CHECK_THROWS_AS(instantiate3(parse("x+y=z"), full, full, full), InputError);
  CHECK_THROWS_AS(instantiate3(parse("x+y=z"), GridSpec::explicit_list({}), four, four), InputError);
}

TEST_CASE("instantiate2 examples") {
  auto five = GridSpec::range(0, 5);
  CHECK(instantiate2(parse("y = z", "yz"), five, five).edge_count() == 5);
  auto units = GridSpec::range(1, 7);
  auto inv = instantiate2(parse("y*z = 1 mod 7", "yz"), units, units);
  CHECK(inv.edge_count() == 6);
  for (std::size_t i = 0; i < 6; ++i) CHECK(inv.row(i).count() == 1);
  CHECK(instantiate2(parse("y + z = 100", "yz"), five, five).edge_count() == 0);
}

TEST_CASE("grid specs") {
  CHECK(grid_values(parse_grid("range:2:11:3"), std::nullopt) == std::vector<BigInt>{2, 5, 8});
  CHECK(grid_values(parse_grid("range:0:4"), std::nullopt).size() == 4);
  CHECK(grid_values(parse_grid("geom:3:4"), std::nullopt) == std::vector<BigInt>{1, 3, 9, 27});
  CHECK(grid_values(parse_grid("list:4,-1,7"), std::nullopt) == std::vector<BigInt>{4, -1, 7});
  CHECK(grid_values(parse_grid("fullmod"), BigInt(4)) == std::vector<BigInt>{0, 1, 2, 3});

  auto r1 = grid_values(parse_grid("rand:20:0:1000", 9), std::nullopt);
  auto r2 = grid_values(parse_grid("rand:20:0:1000", 9), std::nullopt);
  auto r3 = grid_values(parse_grid("rand:20:0:1000", 10), std::nullopt);
  CHECK(r1 == r2);
  CHECK(r1 != r3);
  CHECK(std::set<BigInt>(r1.begin(), r1.end()).size() == 20);
  for (const auto& v : r1) CHECK((v >= 0 && v < 1000));

  CHECK_THROWS_AS(parse_grid("range:0"), InputError);
  CHECK_THROWS_AS(parse_grid("spiral:1:2"), InputError);
  CHECK_THROWS_AS(grid_values(parse_grid("list:1,1"), std::nullopt), InputError);
  CHECK_THROWS_AS(grid_values(parse_grid("rand:10:0:5"), std::nullopt), InputError);
  CHECK_THROWS_AS(grid_values(parse_grid("fullmod"), std::nullopt), InputError);
}

TEST_CASE("large values evaluate exactly") {
  // 2^70 overflows int64; the relation must still be found.
  auto big = GridSpec::geometric(2, 72);
  auto f = instantiate3(parse("x*y = z"), big, GridSpec::explicit_list({1, 2}), big).relation;
  // x*1 = z for all 72 x; x*2 = z for 71 of them.
  CHECK(f.size() == 72 + 71);
  auto labels = grid_universe("X", grid_values(big, std::nullopt));
  REQUIRE(labels.labels);
  CHECK(std::holds_alternative<std::string>(labels.labels->back()));
}

TEST_CASE("property: commuted operands give the same relation") {
  const std::pair<const char*, const char*> pairs[] = {
      {"x + y = z", "y + x = z"},
      {"x*y*z = 1 mod 7", "z*(y*x) = 1 mod 7"},
      {"x^2 + y^3 = z", "y^3 + x^2 = z"},
      {"x*(y + 3) = z - 1", "(3 + y)*x = z - 1"},
      {"x + y = z mod 11", "z = y + x mod 11"},
  };
  auto g = GridSpec::range(-4, 9);
  for (auto [a, b] : pairs) {
    auto fa = instantiate3(parse(a), g, g, g).relation;
    auto fb = instantiate3(parse(b), g, g, g).relation;
    CHECK(fa.triples() == fb.triples());
  }
}

TEST_CASE("property: z-isolated expressions give at most one z per (x, y)") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto gx = GridSpec::random(seed, 12, -50, 50);
    auto gz = GridSpec::random(seed + 100, 40, -200, 200);
    for (const char* text : {"x + y = z", "x*y - 3 = z", "z = x^2 - y"}) {
      auto f = instantiate3(parse(text), gx, gx, gz).relation;
      CHECK(oracle::pairing_max(f)[0] <= 1);
    }
  }
}

TEST_CASE("property: instantiation agrees with direct evaluation") {
  for (const char* text : {"x^2 + y^3 = z", "x*y = z + 1 mod 13", "x - y*y = 2*z"}) {
    auto expr = parse(text);
    auto g = GridSpec::range(-6, 7);
    auto inst = instantiate3(expr, g, g, g);
    std::uint64_t expect = 0;
    BigInt vals[26];
    for (const auto& x : inst.x_values)
      for (const auto& y : inst.y_values)
        for (const auto& z : inst.z_values) {
          vals['x' - 'a'] = x;
          vals['y' - 'a'] = y;
          vals['z' - 'a'] = z;
          BigInt l = evaluate(expr.lhs(), vals), r = evaluate(expr.rhs(), vals);
          bool ok = expr.modulus() ? ((l - r) % *expr.modulus()) == 0 : l == r;
          expect += ok;
        }
    CHECK(inst.relation.size() == expect);
  }
}

TEST_CASE("top_frequent_values") {
  auto xs = grid_values(GridSpec::range(0, 4), std::nullopt);
  // x + y over {0..3}²: 3 is hit 4 times, 2 and 4 three times each.
  auto top = top_frequent_values(parse("x + y = z"), xs, xs, 3);
  CHECK(top == std::vector<BigInt>{2, 3, 4});
  CHECK_THROWS_AS(top_frequent_values(parse("x + y = z*z"), xs, xs, 3), InputError);
}
