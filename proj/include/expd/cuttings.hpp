#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "expd/relation.hpp"

namespace expd {

// A family of cells covering V (overlap permitted) together with the number
// of fibers from A crossing each cell. A fiber E_a crosses V' when it meets
// V' without containing it.
struct CuttingCover {
  std::vector<Subset> cells;
  double r = 2.0;
  int claimed_exponent = 1;
  std::vector<std::uint64_t> crossing_counts;
};

struct CuttingReport {
  bool valid = false;
  bool covers = false;
  std::uint64_t max_crossing = 0;
  std::size_t cell_count = 0;
  double cap = 0.0;       // |A| / r
  double fitted_c = 0.0;  // cell_count / r^D
  std::optional<std::size_t> first_violation;  // first cell above the cap
  std::optional<std::size_t> uncovered;        // some v in no cell
};

// Does E_a cross `cell`?
bool crosses(const Bitset& fiber, const Bitset& cell);

// Number of fibers from A crossing `cell`.
std::uint64_t crossing_count(const FiniteRelation2& rel, const Subset& a, const Subset& cell);

// Recomputes every crossing count from scratch; valid iff the cells cover V
// and no cell is crossed by more than |A|/r fibers of A.
CuttingReport verify_cutting(const FiniteRelation2& rel, const Subset& a, double r,
                             const CuttingCover& cover);

// Cover for relations whose fibers are contiguous runs of V's index order.
// Produces at most 2r consecutive blocks. Throws FamilyError on a
// non-contiguous fiber.
CuttingCover interval_cutting(const FiniteRelation2& rel, const Subset& a, double r);

// Planar coordinates of the points of V, index-aligned with V.
struct PlanarPoints {
  std::vector<std::int64_t> xs;
  std::vector<std::int64_t> ys;
};

// Cover for relations whose fibers are the points of V inside an
// axis-parallel rectangle. Cells are grid blocks over x/y-rank space. Throws
// FamilyError when a fiber is not the point set of its bounding box.
CuttingCover box_grid_cutting(const FiniteRelation2& rel, const Subset& a,
                              const PlanarPoints& points, double r);

// Best-effort cover for arbitrary relations: starts from the classes of
// points with identical fiber traces (never crossed) and merges first-fit
// while the |A|/r cap holds. Returns nullopt when more than max_cells cells
// are needed.
std::optional<CuttingCover> greedy_cutting(const FiniteRelation2& rel, const Subset& a, double r,
                                           std::size_t max_cells);

// Cutting provider used by the certified counter.
using Cutter =
    std::function<std::optional<CuttingCover>(const FiniteRelation2&, const Subset&, double)>;

Cutter interval_cutter();
Cutter box_grid_cutter(PlanarPoints points);
// max_cells = ceil(c * r^D)
Cutter greedy_cutter(double c, int exponent);

// {"r":...,"D":...,"cells":[[v indices],...],"crossing_counts":[...]}
nlohmann::json to_json(const CuttingCover& cover);
CuttingCover cover_from_json(const nlohmann::json& j, const Universe& v);

}  // namespace expd
