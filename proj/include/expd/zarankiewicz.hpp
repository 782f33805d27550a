#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include "expd/cuttings.hpp"
#include "expd/relation.hpp"

namespace expd {

using Rational = boost::multiprecision::cpp_rational;

// A complete s×t block: every (s_side[i], t_side[j]) is an edge.
struct KstWitness {
  std::vector<std::size_t> s_side;
  std::vector<std::size_t> t_side;
  friend bool operator==(const KstWitness&, const KstWitness&) = default;
};

// Exponents of the cutting-based incidence bound for K_{s,t}-free relations
// admitting cuttings with exponent D:
//   alpha = D(t-1)/(Dt-1) - eps,  beta = t(1 - alpha),
//   delta = 1/(2(2D-1)) - eps     (t = 2 only).
struct ExponentParams {
  int D = 1;
  int t = 2;
  int s = 2;
  Rational epsilon;
  Rational alpha;
  Rational beta;
  std::optional<Rational> delta;
};

// Upper end of the admissible epsilon interval: (t-1)/(t(Dt-1)).
Rational epsilon_limit(int D, int t);

// The formulas evaluated at any epsilon, admissible or not.
ExponentParams exponent_formulas(int D, int t, int s, const Rational& epsilon);

// Validated parameters; throws ParameterError unless 0 < eps < epsilon_limit.
ExponentParams exponent_params(int D, int t, int s, const Rational& epsilon);

// s^{1/t} m^{1-1/t} n + t m, the Kővári–Sós–Turán bound for a K_{s,t}-free
// graph with s vertices on the m-side and t on the n-side.
double kst_bound(double s, double t, double m, double n);

// Lexicographically least K_{s,t} (s rows, t columns), if any.
std::optional<KstWitness> find_kst(const FiniteRelation2& rel, std::size_t s, std::size_t t);

// Restricted to rows in A and columns in B; witness indices are global.
std::optional<KstWitness> find_kst(const FiniteRelation2& rel, const Subset& a, const Subset& b,
                                   std::size_t s, std::size_t t);

// Split of U into classes with pairwise fiber intersections below the
// threshold, via greedy colouring of the "large intersection" graph.
struct KstFreeDecomposition {
  std::vector<std::vector<std::size_t>> classes;
  std::size_t r = 0;      // max degree of the auxiliary graph
  std::size_t t_cap = 0;  // = threshold; each class × V is K_{2,t_cap}-free
  std::vector<std::size_t> color;  // class of each u
};

KstFreeDecomposition kst_free_decomposition(const FiniteRelation2& rel, std::size_t threshold);

// Σ over classes of kst_bound(2, t_cap, |class|, |V|).
double decomposition_bound(const KstFreeDecomposition& d, std::size_t v_size);

enum class CertCase { Case1SmallM, Case2Unbalanced, Case3Recurse, LeafExact };

const char* to_string(CertCase c);

struct BoundCertificate {
  CertCase node_case = CertCase::LeafExact;
  std::uint64_t m = 0;
  std::uint64_t n = 0;
  double r = 0;
  std::uint64_t contribution = 0;
  std::uint64_t total = 0;
  bool degraded = false;
  std::size_t cell_count = 0;  // Case 3: cells in the cover
  double fitted_c2 = 0;        // Case 3: cell_count / r^D
  std::vector<BoundCertificate> children;

  std::size_t node_count() const;
  std::size_t depth() const;
};

struct CertifyOptions {
  double r = 4;
  std::uint64_t leaf_size = 1;
  // Threads for Case 3 children at the root; 1 = sequential. The total does
  // not depend on it.
  unsigned threads = 1;
};

// Certified upper bound on |E ∩ A×B| following the cutting recursion:
//   Case 1: |A| <= max(r, leaf_size)          -> exact count
//   Case 2: r^{D/(1-alpha)} |A| >= |B|^t        -> min(floor(KST bound), |A||B|)
//   Case 3: cover V, recurse on (A_i, B_i) and count (A \ A_i) × B_i exactly.
// A failing cutter marks the node degraded and falls back to the exact count.
// The caller guarantees rel restricted to A×B is K_{s,t}-free.
BoundCertificate certified_count(const FiniteRelation2& rel, const Subset& a, const Subset& b,
                                 const ExponentParams& params, const Cutter& cutter,
                                 const CertifyOptions& options);

// r = ceil(2 c2^{1/D}), at least 2.
double default_r(double c2, int D);

// Checks the roll-up invariant total = contribution + Σ child totals at
// every node.
bool certificate_consistent(const BoundCertificate& cert);

// {"case":"Case3","m":..,"n":..,"r":..,"contribution":..,"children":[...],"total":..}
nlohmann::json to_json(const BoundCertificate& cert);

// n^{3/2 - delta}; throws ParameterError unless t = 2.
double distal_delta_bound(const ExponentParams& params, double n);

}  // namespace expd
