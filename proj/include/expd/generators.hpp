#pragma once

#include <cstdint>

#include "expd/cuttings.hpp"
#include "expd/relation.hpp"
#include "expd/rng.hpp"

namespace expd {

// Point–line incidence of the projective plane over GF(q), q prime:
// q^2 + q + 1 points and lines, q + 1 points on each line.
FiniteRelation2 projective_plane_incidence(std::uint32_t q);

// {(i, i)} on n × n.
FiniteRelation2 identity_matching(std::size_t n);

// Each edge present independently with probability p.
FiniteRelation2 random_bipartite(std::size_t m, std::size_t n, double p, Rng& rng);

// `count` random intervals [lo, hi] over `points` ordered points; fibers are
// contiguous index runs.
FiniteRelation2 random_intervals(std::size_t points, std::size_t count, Rng& rng);

struct RectangleInstance {
  FiniteRelation2 relation;
  PlanarPoints points;
};

// `count` random axis-parallel rectangles over a width × height integer grid
// of points; each fiber is the set of grid points inside its rectangle.
RectangleInstance random_rectangles(std::size_t width, std::size_t height, std::size_t count,
                                    Rng& rng);

}  // namespace expd
