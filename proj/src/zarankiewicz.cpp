#include "expd/zarankiewicz.hpp"

#include <algorithm>
#include <cmath>

#include "expd/errors.hpp"

namespace expd {

Rational epsilon_limit(int D, int t) {
  return Rational(t - 1) / Rational(t * (D * t - 1));
}

ExponentParams exponent_formulas(int D, int t, int s, const Rational& epsilon) {
  if (D < 1) throw ParameterError("cutting exponent D must be positive");
  if (t < 2) throw ParameterError("t must be at least 2");
  if (s < 1) throw ParameterError("s must be at least 1");
  ExponentParams p;
  p.D = D;
  p.t = t;
  p.s = s;
  p.epsilon = epsilon;
  p.alpha = Rational(D * (t - 1)) / Rational(D * t - 1) - epsilon;
  p.beta = Rational(t) * (1 - p.alpha);
  if (t == 2) p.delta = Rational(1) / Rational(2 * (2 * D - 1)) - epsilon;
  return p;
}

ExponentParams exponent_params(int D, int t, int s, const Rational& epsilon) {
  ExponentParams p = exponent_formulas(D, t, s, epsilon);
  const Rational limit = epsilon_limit(D, t);
  if (epsilon <= 0 || epsilon >= limit)
    throw ParameterError("epsilon = " + epsilon.str() + " outside the admissible interval (0, " +
                         limit.str() + ") for D = " + std::to_string(D) +
                         ", t = " + std::to_string(t));
  return p;
}

double kst_bound(double s, double t, double m, double n) {
  if (s < 1 || t < 1) throw ParameterError("kst_bound needs s, t >= 1");
  if (m < 0 || n < 0) throw ParameterError("kst_bound needs m, n >= 0");
  return std::pow(s, 1.0 / t) * std::pow(m, 1.0 - 1.0 / t) * n + t * m;
}

// ---------------------------------------------------------------------------

namespace {

struct KstSearch {
  const FiniteRelation2& rel;
  const std::vector<std::size_t>& rows;
  const Bitset& avail;  // rows of A over U
  std::size_t s, t;
  std::vector<std::size_t> chosen;

  // Some t columns of `cols` shared by >= need rows of A with index >= lo.
  bool feasible(std::size_t lo, const Bitset& cols, const Bitset& mask, std::size_t from,
                std::size_t depth, std::size_t need) const {
    if (depth == t) return true;
    for (std::size_t j = cols.find_next(from); j < cols.size(); j = cols.find_next(j + 1)) {
      Bitset next = mask & rel.column(j);
      if (next.count_range(lo, next.size()) < need) continue;
      if (feasible(lo, cols, next, j + 1, depth + 1, need)) return true;
    }
    return false;
  }

  // Depth-first over increasing row indices, so the first hit is the
  // lexicographically least s-set. The feasibility test is exact, so a
  // failed branch is never entered.
  bool dfs(std::size_t start, const Bitset& common) {
    if (chosen.size() == s) return true;
    const std::size_t need = s - chosen.size();
    if (start + need > rows.size()) return false;
    if (!feasible(rows[start], common, avail, 0, 0, need)) return false;
    for (std::size_t k = start; k + need <= rows.size(); ++k) {
      const Bitset& row = rel.row(rows[k]);
      if (row.count_and(common) < t) continue;
      chosen.push_back(rows[k]);
      if (dfs(k + 1, common & row)) return true;
      chosen.pop_back();
    }
    return false;
  }
};

}  // namespace

std::optional<KstWitness> find_kst(const FiniteRelation2& rel, const Subset& a, const Subset& b,
                                   std::size_t s, std::size_t t) {
  a.require_universe(rel.u(), "find_kst rows");
  b.require_universe(rel.v(), "find_kst columns");
  if (s == 0 || t == 0) throw ParameterError("find_kst needs s, t >= 1");
  std::vector<std::size_t> rows = a.elements();
  if (rows.size() < s || b.cardinality() < t) return std::nullopt;
  KstSearch search{rel, rows, a.bits(), s, t, {}};
  if (!search.dfs(0, b.bits())) return std::nullopt;
  Bitset common = b.bits();
  for (std::size_t i : search.chosen) common &= rel.row(i);
  KstWitness w;
  w.s_side = search.chosen;
  for (std::size_t j = common.find_next(0); w.t_side.size() < t; j = common.find_next(j + 1))
    w.t_side.push_back(j);
  return w;
}

std::optional<KstWitness> find_kst(const FiniteRelation2& rel, std::size_t s, std::size_t t) {
  return find_kst(rel, Subset::full(rel.u()), Subset::full(rel.v()), s, t);
}

KstFreeDecomposition kst_free_decomposition(const FiniteRelation2& rel, std::size_t threshold) {
  if (threshold < 1) throw ParameterError("decomposition threshold must be >= 1");
  const std::size_t m = rel.u().size;
  std::vector<std::vector<std::size_t>> adj(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (rel.row(i).count_and(rel.row(j)) >= threshold) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      }

  KstFreeDecomposition d;
  d.t_cap = threshold;
  d.color.assign(m, 0);
  for (const auto& nb : adj) d.r = std::max(d.r, nb.size());

  // Greedy colouring in index order uses at most max-degree + 1 colours.
  std::vector<char> used;
  for (std::size_t i = 0; i < m; ++i) {
    used.assign(d.r + 2, 0);
    for (std::size_t j : adj[i])
      if (j < i) used[d.color[j]] = 1;
    std::size_t c = 0;
    while (used[c]) ++c;
    d.color[i] = c;
    if (c >= d.classes.size()) d.classes.resize(c + 1);
    d.classes[c].push_back(i);
  }
  return d;
}

double decomposition_bound(const KstFreeDecomposition& d, std::size_t v_size) {
  double total = 0;
  for (const auto& cls : d.classes)
    total += kst_bound(2.0, static_cast<double>(d.t_cap), static_cast<double>(cls.size()),
                       static_cast<double>(v_size));
  return total;
}

double distal_delta_bound(const ExponentParams& params, double n) {
  if (params.t != 2 || !params.delta)
    throw ParameterError("distal_delta_bound needs t = 2, got t = " + std::to_string(params.t));
  return std::pow(n, 1.5 - params.delta->convert_to<double>());
}

}  // namespace expd
