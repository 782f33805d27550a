#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "expd/relation.hpp"
#include "expd/rng.hpp"
#include "expd/zarankiewicz.hpp"

namespace expd {

// Degree of algebraicity of a ternary relation: the largest number of
// completions of a coordinate pair, per pairing. `threshold` is the finite
// stand-in for "finitely many".
struct DeltaDegree {
  std::optional<std::uint64_t> d;
  std::array<std::uint64_t, 3> pairing_max{};  // (x,y)->z, (x,z)->y, (y,z)->x
  std::uint64_t threshold = 1;
};

DeltaDegree delta_degree(const FiniteRelation3& f, std::uint64_t threshold);

// F seen as a bipartite relation between one axis and the pair universe of
// the other two (in their original order, row-major).
FiniteRelation2 flatten(const FiniteRelation3& f, std::size_t axis);

struct CylindricalWitness {
  std::size_t axis = 0;  // 0 = X, 1 = Y, 2 = Z
  KstWitness block;      // s_side on the axis, t_side in the paired universe
};

// First K_{k,k} found in the flattenings along axes X, Y, Z (in that order).
std::optional<CylindricalWitness> cylindrical_witness(const FiniteRelation3& f, std::size_t k);

constexpr std::uint64_t kDefaultCellBudget = 100'000'000;

// G = {(y,y',z,z') : ∃x (x,y,z) ∈ F and (x,y',z') ∈ F} as a relation
// between pair_universe(Y) and pair_universe(Z). Throws CapacityError when
// |Y|²·|Z|² exceeds `budget_cells`.
FiniteRelation2 derive_G(const FiniteRelation3& f, std::uint64_t budget_cells = kDefaultCellBudget);

// Edges of G inside B²×C² without materializing G: sorted, unique pairs of
// row-major (y,y') and (z,z') indices.
std::vector<std::pair<std::uint64_t, std::uint64_t>> g_edges_within(const FiniteRelation3& f,
                                                                     const Subset& b,
                                                                     const Subset& c);

struct GFiberReport {
  std::uint64_t d = 0;
  std::uint64_t bound = 0;        // d²
  std::uint64_t max_z_fiber = 0;  // max over (y,y',z) of |{z' : G}|
  std::uint64_t max_y_fiber = 0;  // max over (y,z,z') of |{y' : G}|
  // max over tested (pair, C) of |G ∩ ({pair} × C²)| - d²|C| (and the B side);
  // must be <= 0.
  std::int64_t point_set_excess = 0;
  std::size_t point_set_checks = 0;
  bool ok = false;
};

// Fiber laws for G: every (y,y',z)- and (y,z,z')-fiber has at most d²
// elements, and |G ∩ ({pair}×C²)| <= d²|C| for C = Z and `samples` random
// subsets C (symmetrically for B ⊆ Y). Throws PreconditionError when d is
// absent.
GFiberReport check_G_fiber_bounds(const FiniteRelation3& f, const FiniteRelation2& g,
                                  const DeltaDegree& degree, Rng& rng, std::size_t samples = 16);

// Same checks on G given as an edge list (see g_edges_within), for when G is
// too large to materialize.
GFiberReport check_G_fiber_bounds(const FiniteRelation3& f,
                                  const std::vector<std::pair<std::uint64_t, std::uint64_t>>& g_edges,
                                  const DeltaDegree& degree, Rng& rng, std::size_t samples = 16);

struct CauchySchwarzReport {
  std::uint64_t d = 0;
  std::uint64_t a_size = 0;
  std::uint64_t f_count = 0;  // |F'|
  std::uint64_t w_count = 0;  // |W'| = Σ_a |F'_a|²
  std::uint64_t g_count = 0;  // |G'|
  double rhs = 0;             // d |A|^{1/2} |G'|^{1/2}
  double slack = 0;           // rhs - |F'|
  bool cs_step = false;       // |F'|² <= |A| |W'|
  bool fiber_step = false;    // |W'| <= d |G'|
  bool composed = false;      // |F'|² <= d² |A| |G'|
  bool equality = false;      // |F'|² == d² |A| |G'|
  bool ok() const { return cs_step && fiber_step && composed; }
};

CauchySchwarzReport cauchy_schwarz_check(const FiniteRelation3& f, const Subset& a,
                                         const Subset& b, const Subset& c,
                                         const DeltaDegree& degree);

struct TrimReport {
  std::uint64_t total = 0;       // |G ∩ (B² × C²)|
  std::uint64_t main = 0;        // |G ∩ (B' × C')|, B' = B²∖Y0, C' = C²∖Z0
  std::uint64_t boundary_y = 0;  // |G ∩ ((B²∩Y0) × C²)|
  std::uint64_t boundary_z = 0;  // |G ∩ (B² × (C²∩Z0))|
  std::uint64_t b_square_in_y0 = 0;
  std::uint64_t c_square_in_z0 = 0;
  std::uint64_t bound_y = 0;  // d² |B²∩Y0| |C|
  std::uint64_t bound_z = 0;  // d² |C²∩Z0| |B|
  bool decomposition_holds = false;  // total <= main + boundary_y + boundary_z
  bool ok = false;
};

// g must be derive_G of a relation whose Y/Z universes are those of b/c.
TrimReport large_subset_trim(const FiniteRelation2& g, const Subset& b, const Subset& c,
                             const Subset& y0, const Subset& z0, std::uint64_t d);

// ---------------------------------------------------------------------------
// Instance families.

struct Twist {
  enum class Kind { Identity, Affine, Random, Explicit };
  Kind kind = Kind::Identity;
  std::int64_t a = 1, b = 0;              // Affine: i -> a i + b (mod N)
  std::uint64_t seed = 0;                 // Random
  std::vector<std::size_t> permutation;   // Explicit

  static Twist identity() { return {}; }
  static Twist affine(std::int64_t a, std::int64_t b);
  static Twist random(std::uint64_t seed);
  static Twist explicit_map(std::vector<std::size_t> perm);

  // The bijection on 0..size-1; throws FamilyError if it is not one.
  std::vector<std::size_t> materialize(std::size_t size) const;
};

struct GroupLikeSpec {
  enum class Group { Cyclic, UnitsModP };
  Group group = Group::Cyclic;
  std::array<Twist, 3> twists;
};

// F_n ⊇ I × P with |I| = |P| = k(n), P = {(j, j)}, plus random noise.
struct CylindricalSpec {
  std::uint64_t block_num = 1, block_den = 1;  // k(n) = ceil(n · num/den)
  double noise = 0.0;                           // per-triple probability
  std::uint64_t seed = 0;
};

// Grid templates may use the letter n, e.g. "range:0:n:1". The z template
// "top:n" selects the n most frequent values of the isolated z side over
// the x/y grids (ties to the smaller value).
struct DslFamilySpec {
  std::string expr;
  std::string grid_x = "range:0:n:1";
  std::string grid_y = "range:0:n:1";
  std::string grid_z = "range:0:n:1";
  std::uint64_t seed = 0;
};

using FamilySpec = std::variant<GroupLikeSpec, CylindricalSpec, DslFamilySpec>;

struct FamilyInstance {
  FiniteRelation3 relation;
  Subset a, b, c;
};

class RelationFamily {
 public:
  explicit RelationFamily(FamilySpec spec);
  const FamilySpec& spec() const noexcept { return spec_; }
  std::string name() const;
  FamilyInstance generate(std::uint64_t n) const;

 private:
  FamilySpec spec_;
};

RelationFamily make_family(FamilySpec spec);

// Applies per-coordinate bijections: (i,j,k) -> (tx[i], ty[j], tz[k]).
FiniteRelation3 twist_relation(const FiniteRelation3& f, const std::vector<std::size_t>& tx,
                               const std::vector<std::size_t>& ty,
                               const std::vector<std::size_t>& tz);

nlohmann::json to_json(const DeltaDegree& d);
nlohmann::json to_json(const GFiberReport& r);
nlohmann::json to_json(const CauchySchwarzReport& r);
nlohmann::json to_json(const TrimReport& r);

}  // namespace expd
