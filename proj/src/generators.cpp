#include "expd/generators.hpp"

#include <array>
#include <vector>

#include "expd/errors.hpp"

namespace expd {

namespace {

bool is_prime(std::uint32_t q) {
  if (q < 2) return false;
  for (std::uint32_t d = 2; d * d <= q; ++d)
    if (q % d == 0) return false;
  return true;
}

// Normalized representatives of the 1-dimensional subspaces of GF(q)^3:
// first nonzero coordinate equal to 1.
std::vector<std::array<std::uint32_t, 3>> projective_points(std::uint32_t q) {
  std::vector<std::array<std::uint32_t, 3>> pts;
  for (std::uint32_t b = 0; b < q; ++b)
    for (std::uint32_t c = 0; c < q; ++c) pts.push_back({1, b, c});
  for (std::uint32_t c = 0; c < q; ++c) pts.push_back({0, 1, c});
  pts.push_back({0, 0, 1});
  return pts;
}

}  // namespace

FiniteRelation2 projective_plane_incidence(std::uint32_t q) {
  if (!is_prime(q)) throw ParameterError("projective plane order must be prime, got " + std::to_string(q));
  auto pts = projective_points(q);
  Relation2Builder b(Universe("lines", pts.size()), Universe("points", pts.size()));
  for (std::size_t l = 0; l < pts.size(); ++l)
    for (std::size_t p = 0; p < pts.size(); ++p) {
      std::uint64_t dot = 0;
      for (int k = 0; k < 3; ++k) dot += std::uint64_t{pts[l][k]} * pts[p][k];
      if (dot % q == 0) b.add(l, p);
    }
  return std::move(b).finish();
}

FiniteRelation2 identity_matching(std::size_t n) {
  Relation2Builder b(Universe("U", n), Universe("V", n));
  for (std::size_t i = 0; i < n; ++i) b.add(i, i);
  return std::move(b).finish();
}

FiniteRelation2 random_bipartite(std::size_t m, std::size_t n, double p, Rng& rng) {
  Relation2Builder b(Universe("U", m), Universe("V", n));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (rng.chance(p)) b.add(i, j);
  return std::move(b).finish();
}

FiniteRelation2 random_intervals(std::size_t points, std::size_t count, Rng& rng) {
  if (points == 0) throw ParameterError("random_intervals needs at least one point");
  Relation2Builder b(Universe("intervals", count), Universe("points", points));
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t lo = rng.below(points), hi = rng.below(points);
    if (lo > hi) std::swap(lo, hi);
    for (std::size_t j = lo; j <= hi; ++j) b.add(i, j);
  }
  return std::move(b).finish();
}

RectangleInstance random_rectangles(std::size_t width, std::size_t height, std::size_t count,
                                    Rng& rng) {
  if (width == 0 || height == 0) throw ParameterError("random_rectangles needs a nonempty grid");
  PlanarPoints pts;
  for (std::size_t y = 0; y < height; ++y)
    for (std::size_t x = 0; x < width; ++x) {
      pts.xs.push_back(static_cast<std::int64_t>(x));
      pts.ys.push_back(static_cast<std::int64_t>(y));
    }
  Relation2Builder b(Universe("rectangles", count), Universe("points", width * height));
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t x0 = rng.below(width), x1 = rng.below(width);
    std::size_t y0 = rng.below(height), y1 = rng.below(height);
    if (x0 > x1) std::swap(x0, x1);
    if (y0 > y1) std::swap(y0, y1);
    for (std::size_t y = y0; y <= y1; ++y)
      for (std::size_t x = x0; x <= x1; ++x) b.add(i, y * width + x);
  }
  return RectangleInstance{std::move(b).finish(), std::move(pts)};
}

}  // namespace expd
