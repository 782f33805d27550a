#include "expd/cuttings.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "expd/errors.hpp"

namespace expd {

namespace {

bool within_cap(std::uint64_t crossing, std::size_t n, double r) {
  return static_cast<double>(crossing) * r <= static_cast<double>(n);
}

void fill_crossings(const FiniteRelation2& rel, const Subset& a, CuttingCover& cover) {
  cover.crossing_counts.clear();
  for (const auto& cell : cover.cells) cover.crossing_counts.push_back(crossing_count(rel, a, cell));
}

Subset block_subset(const Universe& v, const std::vector<std::size_t>& members) {
  return Subset(v, members);
}

}  // namespace

bool crosses(const Bitset& fiber, const Bitset& cell) {
  const std::size_t inside = fiber.count_and(cell);
  return inside != 0 && inside != cell.count();
}

std::uint64_t crossing_count(const FiniteRelation2& rel, const Subset& a, const Subset& cell) {
  const std::size_t cell_size = cell.cardinality();
  std::uint64_t c = 0;
  a.bits().for_each([&](std::size_t i) {
    const std::size_t inside = rel.row(i).count_and(cell.bits());
    if (inside != 0 && inside != cell_size) ++c;
  });
  return c;
}

CuttingReport verify_cutting(const FiniteRelation2& rel, const Subset& a, double r,
                             const CuttingCover& cover) {
  a.require_universe(rel.u(), "verify_cutting A");
  CuttingReport rep;
  rep.cell_count = cover.cells.size();
  const std::size_t n = a.cardinality();
  rep.cap = static_cast<double>(n) / r;
  rep.fitted_c = static_cast<double>(rep.cell_count) / std::pow(r, cover.claimed_exponent);

  Bitset covered(rel.v().size);
  for (std::size_t k = 0; k < cover.cells.size(); ++k) {
    const Subset& cell = cover.cells[k];
    cell.require_universe(rel.v(), "verify_cutting cell");
    covered |= cell.bits();
    const std::uint64_t c = crossing_count(rel, a, cell);
    rep.max_crossing = std::max(rep.max_crossing, c);
    if (!rep.first_violation && !within_cap(c, n, r)) rep.first_violation = k;
  }
  rep.covers = covered.count() == rel.v().size;
  if (!rep.covers) {
    for (std::size_t j = 0; j < rel.v().size; ++j)
      if (!covered.test(j)) {
        rep.uncovered = j;
        break;
      }
  }
  rep.valid = rep.covers && !rep.first_violation;
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

// Greedy split of positions 0..size-1 into consecutive blocks. cuts[p] lists
// the fibers with a boundary between p-1 and p. A block is extended across a
// cut only while the number of distinct fibers cut inside it stays <= cap.
std::vector<std::pair<std::size_t, std::size_t>> greedy_blocks(
    std::size_t size, const std::vector<std::vector<std::size_t>>& cuts, std::size_t fiber_count,
    std::uint64_t cap) {
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  if (size == 0) return blocks;
  std::vector<std::size_t> stamp(fiber_count, 0);
  std::size_t block_id = 1;
  std::size_t start = 0;
  std::uint64_t crossing = 0;
  for (std::size_t p = 1; p < size; ++p) {
    std::uint64_t fresh = 0;
    for (std::size_t f : cuts[p])
      if (stamp[f] != block_id) ++fresh;
    if (crossing + fresh > cap) {
      blocks.emplace_back(start, p);
      start = p;
      crossing = 0;
      ++block_id;
      continue;
    }
    for (std::size_t f : cuts[p]) stamp[f] = block_id;
    crossing += fresh;
  }
  blocks.emplace_back(start, size);
  return blocks;
}

}  // namespace

CuttingCover interval_cutting(const FiniteRelation2& rel, const Subset& a, double r) {
  a.require_universe(rel.u(), "interval_cutting A");
  if (!(r > 0)) throw ParameterError("interval_cutting needs r > 0");
  const std::size_t nv = rel.v().size;
  std::vector<std::vector<std::size_t>> cuts(nv + 1);
  std::size_t fiber_id = 0;
  a.bits().for_each([&](std::size_t i) {
    const Bitset& row = rel.row(i);
    const std::size_t len = row.count();
    if (len == 0) return;
    const std::size_t lo = row.find_next(0);
    const std::size_t hi = lo + len - 1;
    if (hi >= nv || row.count_range(lo, hi + 1) != len)
      throw FamilyError("fiber of u = " + std::to_string(i) + " is not a contiguous run of V");
    if (lo > 0) cuts[lo].push_back(fiber_id);
    if (hi + 1 < nv) cuts[hi + 1].push_back(fiber_id);
    ++fiber_id;
  });
  const auto cap = static_cast<std::uint64_t>(std::floor(static_cast<double>(a.cardinality()) / r));

  CuttingCover cover;
  cover.r = r;
  cover.claimed_exponent = 1;
  for (auto [s, e] : greedy_blocks(nv, cuts, fiber_id, cap)) {
    std::vector<std::size_t> members;
    for (std::size_t j = s; j < e; ++j) members.push_back(j);
    cover.cells.push_back(block_subset(rel.v(), members));
  }
  fill_crossings(rel, a, cover);
  return cover;
}

// ---------------------------------------------------------------------------

namespace {

struct RankSpace {
  std::vector<std::size_t> xr, yr;  // rank of each point
  std::size_t nx = 0, ny = 0;
};

RankSpace rank_points(const PlanarPoints& pts) {
  auto ranks = [](const std::vector<std::int64_t>& c, std::vector<std::size_t>& out) {
    std::vector<std::int64_t> sorted = c;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    out.resize(c.size());
    for (std::size_t k = 0; k < c.size(); ++k)
      out[k] = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), c[k]) -
                                        sorted.begin());
    return sorted.size();
  };
  RankSpace rs;
  rs.nx = ranks(pts.xs, rs.xr);
  rs.ny = ranks(pts.ys, rs.yr);
  return rs;
}

// slab_of[rank] -> slab index
std::vector<std::size_t> slab_map(std::size_t ranks,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& slabs) {
  std::vector<std::size_t> out(ranks);
  for (std::size_t k = 0; k < slabs.size(); ++k)
    for (std::size_t p = slabs[k].first; p < slabs[k].second; ++p) out[p] = k;
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> uniform_slabs(std::size_t ranks, std::size_t g) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t k = 0; k < g; ++k) {
    std::size_t s = k * ranks / g, e = (k + 1) * ranks / g;
    if (e > s) out.emplace_back(s, e);
  }
  return out;
}

std::vector<Subset> grid_cells(const Universe& v, const RankSpace& rs,
                               const std::vector<std::pair<std::size_t, std::size_t>>& xs,
                               const std::vector<std::pair<std::size_t, std::size_t>>& ys) {
  auto xm = slab_map(rs.nx, xs), ym = slab_map(rs.ny, ys);
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> blocks;
  for (std::size_t p = 0; p < rs.xr.size(); ++p) blocks[{xm[rs.xr[p]], ym[rs.yr[p]]}].push_back(p);
  std::vector<Subset> cells;
  for (const auto& [key, members] : blocks) cells.push_back(Subset(v, members));
  return cells;
}

}  // namespace

CuttingCover box_grid_cutting(const FiniteRelation2& rel, const Subset& a,
                              const PlanarPoints& points, double r) {
  a.require_universe(rel.u(), "box_grid_cutting A");
  if (!(r > 0)) throw ParameterError("box_grid_cutting needs r > 0");
  const std::size_t nv = rel.v().size;
  if (points.xs.size() != nv || points.ys.size() != nv)
    throw InputError("box_grid_cutting: point coordinates do not match |V|");
  const RankSpace rs = rank_points(points);

  // Every fiber must be the point set of its bounding box; record the box
  // edges in rank space as cuts along each axis.
  std::vector<std::vector<std::size_t>> xcuts(rs.nx + 1), ycuts(rs.ny + 1);
  std::size_t fiber_id = 0;
  a.bits().for_each([&](std::size_t i) {
    const Bitset& row = rel.row(i);
    if (row.none()) return;
    std::size_t x0 = rs.nx, x1 = 0, y0 = rs.ny, y1 = 0;
    row.for_each([&](std::size_t p) {
      x0 = std::min(x0, rs.xr[p]);
      x1 = std::max(x1, rs.xr[p]);
      y0 = std::min(y0, rs.yr[p]);
      y1 = std::max(y1, rs.yr[p]);
    });
    std::size_t in_box = 0;
    for (std::size_t p = 0; p < nv; ++p)
      if (rs.xr[p] >= x0 && rs.xr[p] <= x1 && rs.yr[p] >= y0 && rs.yr[p] <= y1) ++in_box;
    if (in_box != row.count())
      throw FamilyError("fiber of u = " + std::to_string(i) + " is not the point set of a rectangle");
    if (x0 > 0) xcuts[x0].push_back(fiber_id);
    if (x1 + 1 < rs.nx) xcuts[x1 + 1].push_back(fiber_id);
    if (y0 > 0) ycuts[y0].push_back(fiber_id);
    if (y1 + 1 < rs.ny) ycuts[y1 + 1].push_back(fiber_id);
    ++fiber_id;
  });

  // A rectangle crossing a block has an edge strictly inside the block's
  // x-slab or y-slab, so slabs with at most |A|/(2r) cut fibers each give
  // crossing counts <= |A|/r.
  const auto half_cap =
      static_cast<std::uint64_t>(std::floor(static_cast<double>(a.cardinality()) / (2 * r)));
  std::vector<Subset> best = grid_cells(rel.v(), rs, greedy_blocks(rs.nx, xcuts, fiber_id, half_cap),
                                        greedy_blocks(rs.ny, ycuts, fiber_id, half_cap));

  // Coarser uniform rank grids are often already valid; keep the smallest
  // verified one.
  const std::size_t n = a.cardinality();
  for (std::size_t g = 1; g <= std::max(rs.nx, rs.ny); ++g) {
    auto xs = uniform_slabs(rs.nx, std::min(g, rs.nx));
    auto ys = uniform_slabs(rs.ny, std::min(g, rs.ny));
    if (xs.size() * ys.size() >= best.size()) break;
    std::vector<Subset> cells = grid_cells(rel.v(), rs, xs, ys);
    if (cells.size() >= best.size()) break;
    bool ok = true;
    for (const auto& cell : cells)
      if (!within_cap(crossing_count(rel, a, cell), n, r)) {
        ok = false;
        break;
      }
    if (ok) {
      best = std::move(cells);
      break;
    }
  }

  CuttingCover cover;
  cover.r = r;
  cover.claimed_exponent = 2;
  cover.cells = std::move(best);
  fill_crossings(rel, a, cover);
  return cover;
}

// ---------------------------------------------------------------------------

std::optional<CuttingCover> greedy_cutting(const FiniteRelation2& rel, const Subset& a, double r,
                                           std::size_t max_cells) {
  a.require_universe(rel.u(), "greedy_cutting A");
  if (!(r > 0)) throw ParameterError("greedy_cutting needs r > 0");
  const std::size_t nv = rel.v().size;
  const std::size_t n = a.cardinality();

  // Points with the same trace {a in A : v in E_a}; no fiber crosses such a
  // class.
  std::unordered_map<std::string, std::size_t> class_of;
  std::vector<std::vector<std::size_t>> classes;
  std::vector<Bitset> traces;
  for (std::size_t j = 0; j < nv; ++j) {
    Bitset trace = rel.column(j) & a.bits();
    std::string key(reinterpret_cast<const char*>(trace.data()),
                    trace.word_count() * sizeof(Bitset::Word));
    auto [it, fresh] = class_of.emplace(std::move(key), classes.size());
    if (fresh) {
      classes.emplace_back();
      traces.push_back(std::move(trace));
    }
    classes[it->second].push_back(j);
  }

  struct Cell {
    Bitset some;  // fibers meeting the cell
    Bitset all;   // fibers containing the cell
    std::vector<std::size_t> members;
  };
  std::vector<Cell> cells;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    bool placed = false;
    for (auto& cell : cells) {
      Bitset some = cell.some | traces[k];
      Bitset all = cell.all & traces[k];
      if (!within_cap(some.count() - some.count_and(all), n, r)) continue;
      cell.some = std::move(some);
      cell.all = std::move(all);
      cell.members.insert(cell.members.end(), classes[k].begin(), classes[k].end());
      placed = true;
      break;
    }
    if (!placed) {
      cells.push_back(Cell{traces[k], traces[k], classes[k]});
      if (cells.size() > max_cells) return std::nullopt;
    }
  }

  CuttingCover cover;
  cover.r = r;
  cover.claimed_exponent = 1;
  for (auto& cell : cells) {
    std::sort(cell.members.begin(), cell.members.end());
    cover.cells.push_back(Subset(rel.v(), cell.members));
  }
  fill_crossings(rel, a, cover);
  return cover;
}

// ---------------------------------------------------------------------------

Cutter interval_cutter() {
  return [](const FiniteRelation2& rel, const Subset& a, double r) -> std::optional<CuttingCover> {
    return interval_cutting(rel, a, r);
  };
}

Cutter box_grid_cutter(PlanarPoints points) {
  return [pts = std::move(points)](const FiniteRelation2& rel, const Subset& a,
                                   double r) -> std::optional<CuttingCover> {
    return box_grid_cutting(rel, a, pts, r);
  };
}

Cutter greedy_cutter(double c, int exponent) {
  return [c, exponent](const FiniteRelation2& rel, const Subset& a, double r) {
    const auto max_cells = static_cast<std::size_t>(std::ceil(c * std::pow(r, exponent)));
    auto cover = greedy_cutting(rel, a, r, max_cells);
    if (cover) cover->claimed_exponent = exponent;
    return cover;
  };
}

nlohmann::json to_json(const CuttingCover& cover) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : cover.cells) cells.push_back(c.elements());
  return nlohmann::json{{"r", cover.r},
                        {"D", cover.claimed_exponent},
                        {"cells", std::move(cells)},
                        {"crossing_counts", cover.crossing_counts}};
}

CuttingCover cover_from_json(const nlohmann::json& j, const Universe& v) {
  CuttingCover cover;
  try {
    cover.r = j.at("r").get<double>();
    cover.claimed_exponent = j.at("D").get<int>();
    for (const auto& cell : j.at("cells")) cover.cells.push_back(Subset(v, cell.get<std::vector<std::size_t>>()));
    if (j.contains("crossing_counts"))
      cover.crossing_counts = j["crossing_counts"].get<std::vector<std::uint64_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("cover file: ") + e.what());
  }
  return cover;
}

}  // namespace expd
