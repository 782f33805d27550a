#include "expd/es_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "expd/errors.hpp"

namespace expd {

DeltaDegree delta_degree(const FiniteRelation3& f, std::uint64_t threshold) {
  if (threshold < 1) throw ParameterError("delta_degree threshold must be >= 1");
  DeltaDegree out;
  out.threshold = threshold;
  const std::array<Pairing, 3> pairings{Pairing::XY, Pairing::XZ, Pairing::YZ};
  for (std::size_t k = 0; k < 3; ++k)
    for (const auto& [key, vals] : f.fibers(pairings[k]))
      out.pairing_max[k] = std::max<std::uint64_t>(out.pairing_max[k], vals.size());
  const std::uint64_t worst = *std::max_element(out.pairing_max.begin(), out.pairing_max.end());
  if (worst <= threshold) out.d = std::max<std::uint64_t>(worst, 1);
  return out;
}

FiniteRelation2 flatten(const FiniteRelation3& f, std::size_t axis) {
  if (axis > 2) throw ParameterError("axis must be 0, 1 or 2");
  const std::size_t o1 = axis == 0 ? 1 : 0;
  const std::size_t o2 = axis == 2 ? 1 : 2;
  const std::size_t n1 = f.axis(o1).size, n2 = f.axis(o2).size;
  if (n1 != 0 && n2 > std::numeric_limits<std::size_t>::max() / n1)
    throw CapacityError("flattened pair universe overflows");
  Relation2Builder b(f.axis(axis), Universe(f.axis(o1).name + "x" + f.axis(o2).name, n1 * n2));
  for (const auto& t : f.triples()) b.add(t[axis], t[o1] * n2 + t[o2]);
  return std::move(b).finish();
}

std::optional<CylindricalWitness> cylindrical_witness(const FiniteRelation3& f, std::size_t k) {
  if (k < 2) throw ParameterError("cylindrical_witness needs k >= 2");
  if (f.size() < k * k) return std::nullopt;
  for (std::size_t axis = 0; axis < 3; ++axis) {
    FiniteRelation2 flat = flatten(f, axis);
    if (auto w = find_kst(flat, k, k)) return CylindricalWitness{axis, std::move(*w)};
  }
  return std::nullopt;
}

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out;
  if (__builtin_mul_overflow(a, b, &out)) return std::numeric_limits<std::uint64_t>::max();
  return out;
}

// Calls on_group(x, entries) once per x, with the (y, z) entries of F_x.
template <class OnGroup>
void for_each_x_group(const FiniteRelation3& f, OnGroup&& on_group) {
  const auto& ts = f.triples();
  std::vector<std::pair<std::size_t, std::size_t>> entries;
  for (std::size_t i = 0; i < ts.size();) {
    std::size_t j = i;
    entries.clear();
    while (j < ts.size() && ts[j][0] == ts[i][0]) {
      entries.emplace_back(ts[j][1], ts[j][2]);
      ++j;
    }
    on_group(ts[i][0], entries);
    i = j;
  }
}

}  // namespace

FiniteRelation2 derive_G(const FiniteRelation3& f, std::uint64_t budget_cells) {
  const std::uint64_t ny = f.y().size, nz = f.z().size;
  const std::uint64_t cells = checked_mul(checked_mul(ny, ny), checked_mul(nz, nz));
  if (cells > budget_cells)
    throw CapacityError("G would have " + std::to_string(cells) + " cells, budget is " +
                        std::to_string(budget_cells));
  PairUniverse py = pair_universe(f.y()), pz = pair_universe(f.z());
  Relation2Builder b(py.universe(), pz.universe());
  for_each_x_group(f, [&](std::size_t, const auto& entries) {
    for (auto [y1, z1] : entries)
      for (auto [y2, z2] : entries) b.add(y1 * ny + y2, z1 * nz + z2);
  });
  return std::move(b).finish();
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> g_edges_within(const FiniteRelation3& f,
                                                                     const Subset& b,
                                                                     const Subset& c) {
  b.require_universe(f.y(), "G edges B");
  c.require_universe(f.z(), "G edges C");
  const std::uint64_t ny = f.y().size, nz = f.z().size;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  std::vector<std::pair<std::size_t, std::size_t>> kept;
  for_each_x_group(f, [&](std::size_t, const auto& entries) {
    kept.clear();
    for (auto e : entries)
      if (b.contains(e.first) && c.contains(e.second)) kept.push_back(e);
    for (auto [y1, z1] : kept)
      for (auto [y2, z2] : kept) out.emplace_back(y1 * ny + y2, z1 * nz + z2);
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------

namespace {

using Edge = std::pair<std::uint64_t, std::uint64_t>;

// Largest run of edges sharing key(edge); edges must be sorted by key.
template <class Key>
std::uint64_t max_run(const std::vector<Edge>& edges, Key key) {
  std::uint64_t best = 0, run = 0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    run = (i > 0 && key(edges[i]) == key(edges[i - 1])) ? run + 1 : 1;
    best = std::max(best, run);
  }
  return best;
}

// max over pair p of |{edges at p with both partner coordinates in S}| - d²|S|.
// `own(e)` is the fixed pair, `other(e)` the (s, s') pair in the other
// square, decoded with base `other_size`.
template <class Own, class Other>
std::int64_t point_set_excess(const std::vector<Edge>& edges, std::size_t own_count,
                              std::uint64_t other_size, const Bitset& s, std::uint64_t d2,
                              Own own, Other other) {
  std::vector<std::uint64_t> per_pair(own_count, 0);
  for (const auto& e : edges) {
    const std::uint64_t o = other(e);
    if (s.test(o / other_size) && s.test(o % other_size)) ++per_pair[own(e)];
  }
  const auto limit = static_cast<std::int64_t>(d2 * s.count());
  std::int64_t worst = std::numeric_limits<std::int64_t>::min();
  for (auto c : per_pair) worst = std::max(worst, static_cast<std::int64_t>(c) - limit);
  return own_count == 0 ? -limit : worst;
}

}  // namespace

GFiberReport check_G_fiber_bounds(const FiniteRelation3& f, const FiniteRelation2& g,
                                  const DeltaDegree& degree, Rng& rng, std::size_t samples) {
  const std::uint64_t ny = f.y().size, nz = f.z().size;
  if (g.u().size != ny * ny || g.v().size != nz * nz)
    throw InputError("G does not live on Y²×Z² of the given F");
  std::vector<Edge> edges;
  edges.reserve(g.edge_count());
  for (auto [l, r] : g.edges()) edges.emplace_back(l, r);
  return check_G_fiber_bounds(f, edges, degree, rng, samples);
}

GFiberReport check_G_fiber_bounds(const FiniteRelation3& f,
                                  const std::vector<std::pair<std::uint64_t, std::uint64_t>>& g_edges,
                                  const DeltaDegree& degree, Rng& rng, std::size_t samples) {
  if (!degree.d) throw PreconditionError("check_G_fiber_bounds needs a Δ-degree d");
  const std::uint64_t ny = f.y().size, nz = f.z().size;
  GFiberReport rep;
  rep.d = *degree.d;
  rep.bound = rep.d * rep.d;

  std::vector<Edge> by_row = g_edges;
  std::sort(by_row.begin(), by_row.end());
  // (y,y',z) -> z'
  rep.max_z_fiber = max_run(by_row, [nz](const Edge& e) { return std::pair(e.first, e.second / nz); });

  // (y, z, z') -> y': order by (z-pair, y)
  std::vector<Edge> by_col = by_row;
  std::sort(by_col.begin(), by_col.end(), [ny](const Edge& a, const Edge& b) {
    return std::tuple(a.second, a.first / ny, a.first) < std::tuple(b.second, b.first / ny, b.first);
  });
  rep.max_y_fiber = max_run(by_col, [ny](const Edge& e) { return std::pair(e.second, e.first / ny); });

  auto own_row = [](const Edge& e) { return e.first; };
  auto other_row = [](const Edge& e) { return e.second; };
  auto own_col = [](const Edge& e) { return e.second; };
  auto other_col = [](const Edge& e) { return e.first; };

  rep.point_set_excess = std::numeric_limits<std::int64_t>::min();
  auto check = [&](const Bitset& c_set, const Bitset& b_set) {
    rep.point_set_excess = std::max(
        rep.point_set_excess,
        point_set_excess(by_row, ny * ny, nz, c_set, rep.bound, own_row, other_row));
    rep.point_set_excess = std::max(
        rep.point_set_excess,
        point_set_excess(by_row, nz * nz, ny, b_set, rep.bound, own_col, other_col));
    rep.point_set_checks += 2;
  };
  check(Bitset(nz, true), Bitset(ny, true));
  for (std::size_t s = 0; s < samples; ++s) {
    Bitset cs(nz), bs(ny);
    for (std::size_t k = 0; k < nz; ++k)
      if (rng.chance(0.5)) cs.set(k);
    for (std::size_t k = 0; k < ny; ++k)
      if (rng.chance(0.5)) bs.set(k);
    check(cs, bs);
  }

  rep.ok = rep.max_z_fiber <= rep.bound && rep.max_y_fiber <= rep.bound && rep.point_set_excess <= 0;
  return rep;
}

CauchySchwarzReport cauchy_schwarz_check(const FiniteRelation3& f, const Subset& a,
                                         const Subset& b, const Subset& c,
                                         const DeltaDegree& degree) {
  if (!degree.d) throw PreconditionError("cauchy_schwarz_check needs a Δ-degree d");
  a.require_universe(f.x(), "Cauchy-Schwarz A");
  CauchySchwarzReport rep;
  rep.d = *degree.d;
  rep.a_size = a.cardinality();

  // |F'| = Σ_a |F'_a| and |W'| = Σ_a |F'_a|².
  for_each_x_group(f, [&](std::size_t x, const auto& entries) {
    if (!a.contains(x)) return;
    std::uint64_t fa = 0;
    for (auto [y, z] : entries)
      if (b.contains(y) && c.contains(z)) ++fa;
    rep.f_count += fa;
    rep.w_count += fa * fa;
  });
  rep.g_count = g_edges_within(f, b, c).size();

  using U128 = unsigned __int128;
  const U128 f2 = U128(rep.f_count) * rep.f_count;
  const U128 rhs2 = U128(rep.d) * rep.d * rep.a_size * rep.g_count;
  rep.cs_step = f2 <= U128(rep.a_size) * rep.w_count;
  rep.fiber_step = rep.w_count <= U128(rep.d) * rep.g_count;
  rep.composed = f2 <= rhs2;
  rep.equality = f2 == rhs2;
  rep.rhs = static_cast<double>(rep.d) * std::sqrt(static_cast<double>(rep.a_size)) *
            std::sqrt(static_cast<double>(rep.g_count));
  rep.slack = rep.rhs - static_cast<double>(rep.f_count);
  return rep;
}

TrimReport large_subset_trim(const FiniteRelation2& g, const Subset& b, const Subset& c,
                             const Subset& y0, const Subset& z0, std::uint64_t d) {
  PairUniverse py(Universe(b.universe_name(), b.universe_size()));
  PairUniverse pz(Universe(c.universe_name(), c.universe_size()));
  if (g.u().size != py.universe().size || g.v().size != pz.universe().size)
    throw InputError("large_subset_trim: G is not over B's and C's pair universes");
  y0.require_universe(g.u(), "large_subset_trim Y0");
  z0.require_universe(g.v(), "large_subset_trim Z0");

  const Bitset b2 = square_subset(b, py).bits();
  const Bitset c2 = square_subset(c, pz).bits();
  const Bitset b2_y0 = b2 & y0.bits();
  const Bitset c2_z0 = c2 & z0.bits();
  Bitset b_main = b2;
  b_main.subtract(y0.bits());
  Bitset c_main = c2;
  c_main.subtract(z0.bits());

  TrimReport rep;
  b2.for_each([&](std::size_t row) {
    const Bitset& r = g.row(row);
    rep.total += r.count_and(c2);
    rep.boundary_z += r.count_and(c2_z0);
    if (b2_y0.test(row))
      rep.boundary_y += r.count_and(c2);
    else
      rep.main += r.count_and(c_main);
  });
  rep.b_square_in_y0 = b2_y0.count();
  rep.c_square_in_z0 = c2_z0.count();
  rep.bound_y = d * d * rep.b_square_in_y0 * c.cardinality();
  rep.bound_z = d * d * rep.c_square_in_z0 * b.cardinality();
  rep.decomposition_holds = rep.total <= rep.main + rep.boundary_y + rep.boundary_z;
  rep.ok = rep.decomposition_holds && rep.boundary_y <= rep.bound_y && rep.boundary_z <= rep.bound_z;
  return rep;
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const DeltaDegree& d) {
  nlohmann::json j{{"pairing_max", d.pairing_max}, {"threshold", d.threshold}};
  j["d"] = d.d ? nlohmann::json(*d.d) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const GFiberReport& r) {
  return {{"d", r.d},
          {"bound", r.bound},
          {"max_z_fiber", r.max_z_fiber},
          {"max_y_fiber", r.max_y_fiber},
          {"point_set_excess", r.point_set_excess},
          {"point_set_checks", r.point_set_checks},
          {"ok", r.ok}};
}

nlohmann::json to_json(const CauchySchwarzReport& r) {
  return {{"d", r.d},         {"a_size", r.a_size},         {"lhs", r.f_count},
          {"W_count", r.w_count}, {"G_count", r.g_count},   {"rhs", r.rhs},
          {"slack", r.slack}, {"cs_step", r.cs_step},       {"fiber_step", r.fiber_step},
          {"composed", r.composed}, {"equality", r.equality}, {"ok", r.ok()}};
}

nlohmann::json to_json(const TrimReport& r) {
  return {{"total", r.total},
          {"main", r.main},
          {"boundary_y", r.boundary_y},
          {"boundary_z", r.boundary_z},
          {"b_square_in_y0", r.b_square_in_y0},
          {"c_square_in_z0", r.c_square_in_z0},
          {"bound_y", r.bound_y},
          {"bound_z", r.bound_z},
          {"decomposition_holds", r.decomposition_holds},
          {"ok", r.ok}};
}

}  // namespace expd
