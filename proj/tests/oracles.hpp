#pragma once

// Brute-force reference implementations. Deliberately naive: plain loops
// over has_edge / contains, no bitset tricks, so they share no code paths
// with the library routines they check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "expd/relation.hpp"
#include "expd/rng.hpp"

namespace oracle {

using expd::FiniteRelation2;
using expd::FiniteRelation3;
using expd::Subset;

inline std::uint64_t count2(const FiniteRelation2& rel, const Subset& a, const Subset& b) {
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < rel.u().size; ++i)
    for (std::size_t j = 0; j < rel.v().size; ++j)
      if (a.contains(i) && b.contains(j) && rel.has_edge(i, j)) ++n;
  return n;
}

inline std::uint64_t count2(const FiniteRelation2& rel) {
  return count2(rel, Subset::full(rel.u()), Subset::full(rel.v()));
}

inline std::uint64_t count3(const FiniteRelation3& f, const Subset& a, const Subset& b, const Subset& c) {
  std::uint64_t n = 0;
  for (std::size_t x = 0; x < f.x().size; ++x)
    for (std::size_t y = 0; y < f.y().size; ++y)
      for (std::size_t z = 0; z < f.z().size; ++z)
        if (a.contains(x) && b.contains(y) && c.contains(z) && f.contains({x, y, z})) ++n;
  return n;
}

// Calls fn on every k-subset of {0..n-1}, in lexicographic order; stops when
// fn returns true.
inline bool for_each_combination(std::size_t n, std::size_t k,
                                 const std::function<bool(const std::vector<std::size_t>&)>& fn) {
  if (k > n) return false;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    if (fn(idx)) return true;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// Any s rows with >= t common neighbours?
inline bool has_kst(const FiniteRelation2& rel, std::size_t s, std::size_t t) {
  return for_each_combination(rel.u().size, s, [&](const std::vector<std::size_t>& rows) {
    std::size_t common = 0;
    for (std::size_t j = 0; j < rel.v().size; ++j) {
      bool all = true;
      for (auto r : rows) all = all && rel.has_edge(r, j);
      if (all) ++common;
    }
    return common >= t;
  });
}

// Most rows sharing a pair of columns; the relation is K_{s,2}-free above it.
inline std::size_t max_column_codegree(const FiniteRelation2& rel) {
  std::size_t best = 0;
  for (std::size_t j = 0; j < rel.v().size; ++j)
    for (std::size_t k = j + 1; k < rel.v().size; ++k) {
      std::size_t common = 0;
      for (std::size_t i = 0; i < rel.u().size; ++i) common += rel.has_edge(i, j) && rel.has_edge(i, k);
      best = std::max(best, common);
    }
  return best;
}

// Quadruples (y, y', z, z') with a common x, as (y*|Y|+y', z*|Z|+z').
inline std::set<std::pair<std::uint64_t, std::uint64_t>> g_brute(const FiniteRelation3& f) {
  std::set<std::pair<std::uint64_t, std::uint64_t>> out;
  const std::size_t ny = f.y().size, nz = f.z().size;
  for (std::size_t y = 0; y < ny; ++y)
    for (std::size_t y2 = 0; y2 < ny; ++y2)
      for (std::size_t z = 0; z < nz; ++z)
        for (std::size_t z2 = 0; z2 < nz; ++z2)
          for (std::size_t x = 0; x < f.x().size; ++x)
            if (f.contains({x, y, z}) && f.contains({x, y2, z2})) {
              out.insert({y * ny + y2, z * nz + z2});
              break;
            }
  return out;
}

// Per-pairing maxima: (x,y)->z, (x,z)->y, (y,z)->x.
inline std::array<std::uint64_t, 3> pairing_max(const FiniteRelation3& f) {
  std::array<std::uint64_t, 3> m{};
  const std::size_t nx = f.x().size, ny = f.y().size, nz = f.z().size;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      std::uint64_t c = 0;
      for (std::size_t z = 0; z < nz; ++z) c += f.contains({x, y, z});
      m[0] = std::max(m[0], c);
    }
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t z = 0; z < nz; ++z) {
      std::uint64_t c = 0;
      for (std::size_t y = 0; y < ny; ++y) c += f.contains({x, y, z});
      m[1] = std::max(m[1], c);
    }
  for (std::size_t y = 0; y < ny; ++y)
    for (std::size_t z = 0; z < nz; ++z) {
      std::uint64_t c = 0;
      for (std::size_t x = 0; x < nx; ++x) c += f.contains({x, y, z});
      m[2] = std::max(m[2], c);
    }
  return m;
}

struct CsCounts {
  std::uint64_t f = 0, w = 0, g = 0;
};

// |F'|, |W'| and |G'| straight from their definitions.
inline CsCounts cs_counts(const FiniteRelation3& f, const Subset& a, const Subset& b, const Subset& c) {
  CsCounts out;
  const std::size_t nx = f.x().size, ny = f.y().size, nz = f.z().size;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t z = 0; z < nz; ++z)
        if (a.contains(x) && b.contains(y) && c.contains(z) && f.contains({x, y, z})) ++out.f;
  for (std::size_t x = 0; x < nx; ++x) {
    if (!a.contains(x)) continue;
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t y2 = 0; y2 < ny; ++y2)
        for (std::size_t z = 0; z < nz; ++z)
          for (std::size_t z2 = 0; z2 < nz; ++z2)
            if (b.contains(y) && b.contains(y2) && c.contains(z) && c.contains(z2) &&
                f.contains({x, y, z}) && f.contains({x, y2, z2}))
              ++out.w;
  }
  for (auto [yy, zz] : g_brute(f)) {
    if (b.contains(yy / ny) && b.contains(yy % ny) && c.contains(zz / nz) && c.contains(zz % nz)) ++out.g;
  }
  return out;
}

// Does E_a cross the cell: meets it without containing it.
inline bool crosses(const FiniteRelation2& rel, std::size_t a, const std::vector<std::size_t>& cell) {
  bool meets = false, contains_all = true;
  for (auto v : cell) {
    if (rel.has_edge(a, v))
      meets = true;
    else
      contains_all = false;
  }
  return meets && !contains_all;
}

inline double kst_closed_form(double s, double t, double m, double n) {
  return std::pow(s, 1.0 / t) * std::pow(m, 1.0 - 1.0 / t) * n + t * m;
}

// Random ternary relation on nx×ny×nz whose three pairing maxima stay <= d.
inline FiniteRelation3 random_bounded_degree(std::size_t nx, std::size_t ny, std::size_t nz,
                                             std::size_t d, std::size_t attempts, expd::Rng& rng) {
  std::vector<std::uint32_t> cxy(nx * ny, 0), cxz(nx * nz, 0), cyz(ny * nz, 0);
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;
  std::vector<expd::Triple> triples;
  for (std::size_t i = 0; i < attempts; ++i) {
    std::size_t x = rng.below(nx), y = rng.below(ny), z = rng.below(nz);
    if (seen.count({x, y, z})) continue;
    if (cxy[x * ny + y] >= d || cxz[x * nz + z] >= d || cyz[y * nz + z] >= d) continue;
    ++cxy[x * ny + y];
    ++cxz[x * nz + z];
    ++cyz[y * nz + z];
    seen.insert({x, y, z});
    triples.push_back({x, y, z});
  }
  return expd::build_relation3(expd::Universe("X", nx), expd::Universe("Y", ny), expd::Universe("Z", nz),
                               std::move(triples));
}

inline Subset random_subset(const expd::Universe& u, double p, expd::Rng& rng) {
  Subset s(u);
  for (std::size_t i = 0; i < u.size; ++i)
    if (rng.chance(p)) s.insert(i);
  return s;
}

}  // namespace oracle
