#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "expd/relation.hpp"

namespace expd {

using BigInt = boost::multiprecision::cpp_int;

// Polynomial relation language:
//
//   expr   := poly "=" poly ["mod" int]
//   poly   := term (("+" | "-") term)*
//   term   := factor ("*" factor)*
//   factor := atom ["^" uint]
//   atom   := var | int | "(" poly ")"
//
// Whitespace is insignificant. Variables are single letters from the
// declared set ({x,y,z} by default).
namespace dsl {

enum class NodeKind { Var, Int, Add, Sub, Mul, Pow };

struct Node {
  NodeKind kind;
  char var = 0;              // Var
  BigInt value;              // Int
  std::uint32_t exponent = 0;  // Pow
  std::unique_ptr<Node> lhs;  // binary ops, Pow base
  std::unique_ptr<Node> rhs;  // binary ops

  Node clone() const;
  bool uses(char v) const;
  friend bool operator==(const Node& a, const Node& b);
};

}  // namespace dsl

class RelationExpr {
 public:
  RelationExpr(dsl::Node lhs, dsl::Node rhs, std::optional<BigInt> modulus);
  RelationExpr(const RelationExpr& other);
  RelationExpr& operator=(const RelationExpr& other);
  RelationExpr(RelationExpr&&) noexcept = default;
  RelationExpr& operator=(RelationExpr&&) noexcept = default;

  const dsl::Node& lhs() const noexcept { return *lhs_; }
  const dsl::Node& rhs() const noexcept { return *rhs_; }
  const std::optional<BigInt>& modulus() const noexcept { return modulus_; }

  bool uses(char v) const { return lhs_->uses(v) || rhs_->uses(v); }

  // Canonical text: minimal parentheses, single spaces around binary
  // operators, none around '^'.
  std::string print() const;

  friend bool operator==(const RelationExpr& a, const RelationExpr& b);

 private:
  std::unique_ptr<dsl::Node> lhs_;
  std::unique_ptr<dsl::Node> rhs_;
  std::optional<BigInt> modulus_;
};

// Throws SyntaxError (with line/column) or InputError for variables outside
// `variables` and for negative exponents.
RelationExpr parse(std::string_view text, std::string_view variables = "xyz");

std::string print(const dsl::Node& node);

// Exact evaluation; `values` is indexed by variable letter - 'a'.
BigInt evaluate(const dsl::Node& node, const BigInt (&values)[26]);

// True iff lhs = rhs (or lhs ≡ rhs mod m) at the given assignment.
bool holds(const RelationExpr& expr, const BigInt (&values)[26]);

// Grid specifications for one coordinate.
struct GridSpec {
  enum class Kind { Range, Geometric, Explicit, Random, FullMod };
  Kind kind = Kind::Range;
  BigInt lo = 0, hi = 0, step = 1;  // Range: lo, lo+step, ... < hi
  BigInt base = 2;                  // Geometric: base^0 .. base^(count-1)
  std::uint64_t count = 0;          // Geometric, Random
  std::vector<BigInt> values;       // Explicit
  std::uint64_t seed = 0;           // Random: `count` distinct values in [lo, hi)

  static GridSpec range(BigInt lo, BigInt hi, BigInt step = 1);
  static GridSpec geometric(BigInt base, std::uint64_t count);
  static GridSpec explicit_list(std::vector<BigInt> values);
  static GridSpec random(std::uint64_t seed, std::uint64_t count, BigInt lo, BigInt hi);
  static GridSpec full_mod();
};

// Parses `range:lo:hi:step`, `geom:base:count`, `list:v1,v2,...`,
// `rand:count:lo:hi` (using `seed`), `fullmod`.
GridSpec parse_grid(std::string_view text, std::uint64_t seed = 0);

// The concrete grid values (pairwise distinct, in generation order). A
// modulus is required for FullMod.
std::vector<BigInt> grid_values(const GridSpec& spec, const std::optional<BigInt>& modulus);

// Universe labelled by the grid values (int64 labels when they fit, decimal
// strings otherwise).
Universe grid_universe(const std::string& name, const std::vector<BigInt>& values);

struct Instance3 {
  FiniteRelation3 relation;
  std::vector<BigInt> x_values, y_values, z_values;
};

Instance3 instantiate3(const RelationExpr& expr, const GridSpec& gx, const GridSpec& gy,
                       const GridSpec& gz);
Instance3 instantiate3(const RelationExpr& expr, std::vector<BigInt> xs, std::vector<BigInt> ys,
                       std::vector<BigInt> zs);

FiniteRelation2 instantiate2(const RelationExpr& expr, const GridSpec& gy, const GridSpec& gz);
FiniteRelation2 instantiate2(const RelationExpr& expr, const std::vector<BigInt>& ys,
                             const std::vector<BigInt>& zs);

// The `count` most frequent values of the isolated z side over xs × ys
// (reduced mod m when declared), ties to the smaller value; sorted ascending.
std::vector<BigInt> top_frequent_values(const RelationExpr& expr, const std::vector<BigInt>& xs,
                                        const std::vector<BigInt>& ys, std::uint64_t count);

// When one side of the equation is exactly the variable `v` and the other
// side does not mention it, returns that other side.
const dsl::Node* isolated_side(const RelationExpr& expr, char v);

}  // namespace expd
