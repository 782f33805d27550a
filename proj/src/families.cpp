#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>

#include "expd/dsl.hpp"
#include "expd/errors.hpp"
#include "expd/es_pipeline.hpp"

namespace expd {

Twist Twist::affine(std::int64_t a, std::int64_t b) {
  Twist t;
  t.kind = Kind::Affine;
  t.a = a;
  t.b = b;
  return t;
}

Twist Twist::random(std::uint64_t seed) {
  Twist t;
  t.kind = Kind::Random;
  t.seed = seed;
  return t;
}

Twist Twist::explicit_map(std::vector<std::size_t> perm) {
  Twist t;
  t.kind = Kind::Explicit;
  t.permutation = std::move(perm);
  return t;
}

std::vector<std::size_t> Twist::materialize(std::size_t size) const {
  std::vector<std::size_t> out(size);
  switch (kind) {
    case Kind::Identity:
      std::iota(out.begin(), out.end(), std::size_t{0});
      return out;
    case Kind::Affine: {
      const auto n = static_cast<std::int64_t>(size);
      if (size > 0 && std::gcd(((a % n) + n) % n, n) != 1)
        throw FamilyError("affine twist " + std::to_string(a) + "*i + " + std::to_string(b) +
                          " is not a bijection mod " + std::to_string(size));
      for (std::int64_t i = 0; i < n; ++i) {
        __int128 v = (static_cast<__int128>(a) * i + b) % n;
        if (v < 0) v += n;
        out[static_cast<std::size_t>(i)] = static_cast<std::size_t>(v);
      }
      return out;
    }
    case Kind::Random: {
      std::iota(out.begin(), out.end(), std::size_t{0});
      Rng rng(seed, size);
      rng.shuffle(out);
      return out;
    }
    case Kind::Explicit: {
      if (permutation.size() != size)
        throw FamilyError("explicit twist has " + std::to_string(permutation.size()) +
                          " entries for a universe of size " + std::to_string(size));
      std::vector<char> hit(size, 0);
      for (std::size_t v : permutation) {
        if (v >= size || hit[v]) throw FamilyError("explicit twist is not a bijection");
        hit[v] = 1;
      }
      return permutation;
    }
  }
  return out;
}

FiniteRelation3 twist_relation(const FiniteRelation3& f, const std::vector<std::size_t>& tx,
                               const std::vector<std::size_t>& ty,
                               const std::vector<std::size_t>& tz) {
  if (tx.size() != f.x().size || ty.size() != f.y().size || tz.size() != f.z().size)
    throw FamilyError("twist sizes do not match the relation's universes");
  std::vector<Triple> out;
  out.reserve(f.size());
  for (const auto& t : f.triples()) out.push_back({tx[t[0]], ty[t[1]], tz[t[2]]});
  return build_relation3(f.x(), f.y(), f.z(), std::move(out));
}

// ---------------------------------------------------------------------------

namespace {

bool is_prime(std::uint64_t p) {
  if (p < 2) return false;
  for (std::uint64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  unsigned __int128 acc = 1, base = b % m;
  for (; e; e >>= 1, base = base * base % m)
    if (e & 1) acc = acc * base % m;
  return static_cast<std::uint64_t>(acc);
}

FamilyInstance full_instance(FiniteRelation3 f) {
  Subset a = Subset::full(f.x()), b = Subset::full(f.y()), c = Subset::full(f.z());
  return FamilyInstance{std::move(f), std::move(a), std::move(b), std::move(c)};
}

FamilyInstance group_like(const GroupLikeSpec& spec, std::uint64_t n) {
  std::vector<std::int64_t> elements;  // labels of the group elements
  std::vector<Triple> triples;
  if (spec.group == GroupLikeSpec::Group::Cyclic) {
    if (n < 1) throw ParameterError("cyclic group order must be >= 1");
    for (std::uint64_t g = 0; g < n; ++g) elements.push_back(static_cast<std::int64_t>(g));
    // g1 + g2 + g3 = 0
    for (std::uint64_t g1 = 0; g1 < n; ++g1)
      for (std::uint64_t g2 = 0; g2 < n; ++g2) triples.push_back({g1, g2, (2 * n - g1 - g2) % n});
  } else {
    if (!is_prime(n)) throw ParameterError("unit group modulus must be prime, got " + std::to_string(n));
    // element index i stands for the residue i + 1; g1 g2 g3 = 1
    for (std::uint64_t g = 1; g < n; ++g) elements.push_back(static_cast<std::int64_t>(g));
    for (std::uint64_t g1 = 1; g1 < n; ++g1)
      for (std::uint64_t g2 = 1; g2 < n; ++g2) {
        const std::uint64_t g3 = pow_mod(g1 * g2 % n, n - 2, n);
        triples.push_back({g1 - 1, g2 - 1, g3 - 1});
      }
  }
  auto universe = [&](const char* name) {
    std::vector<Label> labels(elements.begin(), elements.end());
    return Universe(name, std::move(labels));
  };
  const std::size_t size = elements.size();
  // (τ1(g1), τ2(g2), τ3(g3)) ∈ F_n  iff  τ1⁻¹(x) · τ2⁻¹(y) · τ3⁻¹(z) = 1
  auto tx = spec.twists[0].materialize(size), ty = spec.twists[1].materialize(size),
       tz = spec.twists[2].materialize(size);
  for (auto& t : triples) t = {tx[t[0]], ty[t[1]], tz[t[2]]};
  return full_instance(build_relation3(universe("X"), universe("Y"), universe("Z"), std::move(triples)));
}

FamilyInstance cylindrical(const CylindricalSpec& spec, std::uint64_t n) {
  if (spec.block_den == 0 || spec.block_num > spec.block_den)
    throw ParameterError("cylindrical block fraction must lie in [0, 1]");
  const std::uint64_t k = (n * spec.block_num + spec.block_den - 1) / spec.block_den;
  std::vector<Triple> triples;
  for (std::uint64_t i = 0; i < k; ++i)
    for (std::uint64_t j = 0; j < k; ++j) triples.push_back({i, j, j});
  if (spec.noise > 0) {
    Rng rng = Rng(spec.seed).split(n);
    for (std::uint64_t x = 0; x < n; ++x)
      for (std::uint64_t y = 0; y < n; ++y)
        for (std::uint64_t z = 0; z < n; ++z)
          if (rng.chance(spec.noise)) triples.push_back({x, y, z});
  }
  return full_instance(build_relation3(Universe("X", n), Universe("Y", n), Universe("Z", n),
                                       std::move(triples)));
}

// Replaces fields "n" / "<k>n" of a grid template with the size.
std::string substitute_n(const std::string& tmpl, std::uint64_t n) {
  std::string out, field;
  auto flush = [&] {
    if (!field.empty() && field.back() == 'n' &&
        std::all_of(field.begin(), field.end() - 1, [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      std::uint64_t mult = field.size() == 1 ? 1 : std::stoull(field.substr(0, field.size() - 1));
      out += std::to_string(mult * n);
    } else {
      out += field;
    }
    field.clear();
  };
  for (char c : tmpl) {
    if (c == ':' || c == ',') {
      flush();
      out += c;
    } else {
      field += c;
    }
  }
  flush();
  return out;
}

FamilyInstance dsl_family(const DslFamilySpec& spec, std::uint64_t n) {
  RelationExpr expr = parse(spec.expr);
  Rng seeds(spec.seed, n);
  auto grid = [&](const std::string& tmpl, std::uint64_t stream) {
    return grid_values(parse_grid(substitute_n(tmpl, n), seeds.split(stream).next()), expr.modulus());
  };
  std::vector<BigInt> xs = grid(spec.grid_x, 0), ys = grid(spec.grid_y, 1);
  std::vector<BigInt> zs;
  const std::string zt = substitute_n(spec.grid_z, n);
  if (zt.rfind("top:", 0) == 0)
    zs = top_frequent_values(expr, xs, ys, std::stoull(zt.substr(4)));
  else
    zs = grid(spec.grid_z, 2);
  return full_instance(instantiate3(expr, std::move(xs), std::move(ys), std::move(zs)).relation);
}

}  // namespace

RelationFamily::RelationFamily(FamilySpec spec) : spec_(std::move(spec)) {
  if (const auto* d = std::get_if<DslFamilySpec>(&spec_)) (void)parse(d->expr);
  if (const auto* g = std::get_if<GroupLikeSpec>(&spec_))
    for (const auto& t : g->twists)
      if (t.kind == Twist::Kind::Explicit) (void)t.materialize(t.permutation.size());
}

std::string RelationFamily::name() const {
  return std::visit(
      [](const auto& s) -> std::string {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, GroupLikeSpec>)
          return s.group == GroupLikeSpec::Group::Cyclic ? "group_like_cyclic" : "group_like_units";
        else if constexpr (std::is_same_v<S, CylindricalSpec>)
          return "cylindrical";
        else
          return "dsl:" + parse(s.expr).print();
      },
      spec_);
}

FamilyInstance RelationFamily::generate(std::uint64_t n) const {
  return std::visit(
      [n](const auto& s) -> FamilyInstance {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, GroupLikeSpec>)
          return group_like(s, n);
        else if constexpr (std::is_same_v<S, CylindricalSpec>)
          return cylindrical(s, n);
        else
          return dsl_family(s, n);
      },
      spec_);
}

RelationFamily make_family(FamilySpec spec) { return RelationFamily(std::move(spec)); }

}  // namespace expd
