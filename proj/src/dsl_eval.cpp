#include <algorithm>
#include <charconv>
#include <limits>
#include <map>
#include <set>

#include "expd/dsl.hpp"
#include "expd/errors.hpp"
#include "expd/rng.hpp"

namespace expd {

using dsl::Node;
using dsl::NodeKind;

BigInt evaluate(const Node& n, const BigInt (&values)[26]) {
  switch (n.kind) {
    case NodeKind::Var:
      return values[n.var - 'a'];
    case NodeKind::Int:
      return n.value;
    case NodeKind::Add:
      return evaluate(*n.lhs, values) + evaluate(*n.rhs, values);
    case NodeKind::Sub:
      return evaluate(*n.lhs, values) - evaluate(*n.rhs, values);
    case NodeKind::Mul:
      return evaluate(*n.lhs, values) * evaluate(*n.rhs, values);
    case NodeKind::Pow:
      return boost::multiprecision::pow(evaluate(*n.lhs, values), n.exponent);
  }
  return 0;
}

namespace {

BigInt floor_mod(const BigInt& v, const BigInt& m) {
  BigInt r = v % m;
  if (r < 0) r += m;
  return r;
}

bool zero_under(const BigInt& diff, const std::optional<BigInt>& modulus) {
  return modulus ? floor_mod(diff, *modulus) == 0 : diff == 0;
}

// Machine-word evaluation; nullopt on overflow so the caller can redo the
// computation exactly.
std::optional<std::int64_t> eval_fast(const Node& n, const std::int64_t (&values)[26]) {
  switch (n.kind) {
    case NodeKind::Var:
      return values[n.var - 'a'];
    case NodeKind::Int:
      if (n.value > std::numeric_limits<std::int64_t>::max()) return std::nullopt;
      return n.value.convert_to<std::int64_t>();
    case NodeKind::Pow: {
      auto b = eval_fast(*n.lhs, values);
      if (!b) return std::nullopt;
      std::int64_t acc = 1;
      for (std::uint32_t i = 0; i < n.exponent; ++i)
        if (__builtin_mul_overflow(acc, *b, &acc)) return std::nullopt;
      return acc;
    }
    default: {
      auto l = eval_fast(*n.lhs, values);
      if (!l) return std::nullopt;
      auto r = eval_fast(*n.rhs, values);
      if (!r) return std::nullopt;
      std::int64_t out;
      bool overflow = n.kind == NodeKind::Add   ? __builtin_add_overflow(*l, *r, &out)
                      : n.kind == NodeKind::Sub ? __builtin_sub_overflow(*l, *r, &out)
                                                : __builtin_mul_overflow(*l, *r, &out);
      if (overflow) return std::nullopt;
      return out;
    }
  }
  return std::nullopt;
}

bool all_fit_int64(const std::vector<BigInt>& v) {
  return std::all_of(v.begin(), v.end(), [](const BigInt& b) {
    return b >= std::numeric_limits<std::int64_t>::min() &&
           b <= std::numeric_limits<std::int64_t>::max();
  });
}

// Evaluates `expr` over a cartesian grid of the declared variables.
class GridEvaluator {
 public:
  GridEvaluator(const RelationExpr& expr, std::string vars, std::vector<const std::vector<BigInt>*> grids)
      : expr_(expr), vars_(std::move(vars)), grids_(std::move(grids)) {
    fast_ = std::all_of(grids_.begin(), grids_.end(), [](auto* g) { return all_fit_int64(*g); });
    if (fast_ && expr_.modulus() && *expr_.modulus() > std::numeric_limits<std::int64_t>::max())
      fast_ = false;
    if (fast_) {
      for (std::size_t k = 0; k < grids_.size(); ++k) {
        small_.emplace_back();
        for (const auto& b : *grids_[k]) small_.back().push_back(b.convert_to<std::int64_t>());
      }
    }
  }

  // `idx[k]` indexes grid k, variable vars_[k].
  bool holds_at(const std::vector<std::size_t>& idx) {
    if (fast_) {
      for (std::size_t k = 0; k < vars_.size(); ++k) ivals_[vars_[k] - 'a'] = small_[k][idx[k]];
      auto l = eval_fast(expr_.lhs(), ivals_);
      auto r = l ? eval_fast(expr_.rhs(), ivals_) : std::nullopt;
      std::int64_t diff;
      if (l && r && !__builtin_sub_overflow(*l, *r, &diff)) {
        if (!expr_.modulus()) return diff == 0;
        std::int64_t m = expr_.modulus()->convert_to<std::int64_t>();
        return diff % m == 0;
      }
    }
    for (std::size_t k = 0; k < vars_.size(); ++k) bvals_[vars_[k] - 'a'] = (*grids_[k])[idx[k]];
    return holds(expr_, bvals_);
  }

  BigInt value_of(const Node& side, const std::vector<std::size_t>& idx) {
    if (fast_) {
      for (std::size_t k = 0; k < vars_.size(); ++k) ivals_[vars_[k] - 'a'] = small_[k][idx[k]];
      if (auto v = eval_fast(side, ivals_)) return BigInt(*v);
    }
    for (std::size_t k = 0; k < vars_.size(); ++k) bvals_[vars_[k] - 'a'] = (*grids_[k])[idx[k]];
    return evaluate(side, bvals_);
  }

 private:
  const RelationExpr& expr_;
  std::string vars_;
  std::vector<const std::vector<BigInt>*> grids_;
  bool fast_ = false;
  std::vector<std::vector<std::int64_t>> small_;
  std::int64_t ivals_[26] = {};
  BigInt bvals_[26];
};

void require_only(const RelationExpr& expr, std::string_view vars, const char* what) {
  for (char c = 'a'; c <= 'z'; ++c)
    if (vars.find(c) == std::string_view::npos && expr.uses(c))
      throw InputError(std::string(what) + ": variable '" + c + "' is not one of " +
                       std::string(vars));
}

void require_nonempty(const std::vector<BigInt>& g, const char* name) {
  if (g.empty()) throw InputError(std::string("empty grid for ") + name);
}

// Index of each target-grid value, keyed by residue when a modulus is set.
std::map<BigInt, std::vector<std::size_t>> index_targets(const std::vector<BigInt>& target,
                                                         const std::optional<BigInt>& modulus) {
  std::map<BigInt, std::vector<std::size_t>> out;
  for (std::size_t k = 0; k < target.size(); ++k)
    out[modulus ? floor_mod(target[k], *modulus) : target[k]].push_back(k);
  return out;
}

}  // namespace

bool holds(const RelationExpr& expr, const BigInt (&values)[26]) {
  return zero_under(evaluate(expr.lhs(), values) - evaluate(expr.rhs(), values), expr.modulus());
}

const Node* isolated_side(const RelationExpr& expr, char v) {
  auto is_v = [v](const Node& n) { return n.kind == NodeKind::Var && n.var == v; };
  if (is_v(expr.rhs()) && !expr.lhs().uses(v)) return &expr.lhs();
  if (is_v(expr.lhs()) && !expr.rhs().uses(v)) return &expr.rhs();
  return nullptr;
}

// ---------------------------------------------------------------------------

GridSpec GridSpec::range(BigInt lo, BigInt hi, BigInt step) {
  GridSpec g;
  g.kind = Kind::Range;
  g.lo = std::move(lo);
  g.hi = std::move(hi);
  g.step = std::move(step);
  return g;
}

GridSpec GridSpec::geometric(BigInt base, std::uint64_t count) {
  GridSpec g;
  g.kind = Kind::Geometric;
  g.base = std::move(base);
  g.count = count;
  return g;
}

GridSpec GridSpec::explicit_list(std::vector<BigInt> values) {
  GridSpec g;
  g.kind = Kind::Explicit;
  g.values = std::move(values);
  return g;
}

GridSpec GridSpec::random(std::uint64_t seed, std::uint64_t count, BigInt lo, BigInt hi) {
  GridSpec g;
  g.kind = Kind::Random;
  g.seed = seed;
  g.count = count;
  g.lo = std::move(lo);
  g.hi = std::move(hi);
  return g;
}

GridSpec GridSpec::full_mod() {
  GridSpec g;
  g.kind = Kind::FullMod;
  return g;
}

namespace {

constexpr std::uint64_t kMaxGrid = 10'000'000;

BigInt parse_bigint(std::string_view s, std::string_view spec) {
  std::string t(s);
  bool ok = !t.empty();
  for (std::size_t i = 0; i < t.size() && ok; ++i)
    ok = std::isdigit(static_cast<unsigned char>(t[i])) || (i == 0 && t[i] == '-' && t.size() > 1);
  if (!ok) throw InputError("grid spec '" + std::string(spec) + "': bad integer '" + t + "'");
  return BigInt(t);
}

std::uint64_t parse_count(std::string_view s, std::string_view spec) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw InputError("grid spec '" + std::string(spec) + "': bad count '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t p = s.find(sep, start);
    out.push_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) return out;
    start = p + 1;
  }
}

}  // namespace

GridSpec parse_grid(std::string_view text, std::uint64_t seed) {
  auto parts = split(text, ':');
  const auto& kind = parts[0];
  auto want = [&](std::size_t n) {
    if (parts.size() != n)
      throw InputError("grid spec '" + std::string(text) + "': expected " + std::to_string(n - 1) +
                       " fields after '" + std::string(kind) + "'");
  };
  if (kind == "range") {
    if (parts.size() == 3) return GridSpec::range(parse_bigint(parts[1], text), parse_bigint(parts[2], text));
    want(4);
    return GridSpec::range(parse_bigint(parts[1], text), parse_bigint(parts[2], text),
                           parse_bigint(parts[3], text));
  }
  if (kind == "geom") {
    want(3);
    return GridSpec::geometric(parse_bigint(parts[1], text), parse_count(parts[2], text));
  }
  if (kind == "list") {
    want(2);
    std::vector<BigInt> vals;
    for (auto v : split(parts[1], ',')) vals.push_back(parse_bigint(v, text));
    return GridSpec::explicit_list(std::move(vals));
  }
  if (kind == "rand") {
    want(4);
    return GridSpec::random(seed, parse_count(parts[1], text), parse_bigint(parts[2], text),
                            parse_bigint(parts[3], text));
  }
  if (kind == "fullmod") {
    want(1);
    return GridSpec::full_mod();
  }
  throw InputError("unknown grid kind '" + std::string(kind) + "'");
}

std::vector<BigInt> grid_values(const GridSpec& g, const std::optional<BigInt>& modulus) {
  std::vector<BigInt> out;
  switch (g.kind) {
    case GridSpec::Kind::Range: {
      if (g.step <= 0) throw InputError("range grid needs a positive step");
      if (g.hi > g.lo && (g.hi - g.lo) / g.step > kMaxGrid)
        throw CapacityError("range grid exceeds " + std::to_string(kMaxGrid) + " values");
      for (BigInt v = g.lo; v < g.hi; v += g.step) out.push_back(v);
      break;
    }
    case GridSpec::Kind::Geometric: {
      if (abs(g.base) < 2) throw InputError("geometric grid needs |base| >= 2 for distinct values");
      if (g.count > kMaxGrid) throw CapacityError("geometric grid too large");
      BigInt v = 1;
      for (std::uint64_t i = 0; i < g.count; ++i, v *= g.base) out.push_back(v);
      break;
    }
    case GridSpec::Kind::Explicit: {
      std::set<BigInt> seen;
      for (const auto& v : g.values)
        if (!seen.insert(v).second) throw InputError("explicit grid repeats value " + v.str());
      out = g.values;
      break;
    }
    case GridSpec::Kind::Random: {
      if (g.hi <= g.lo) throw InputError("random grid needs lo < hi");
      BigInt span = g.hi - g.lo;
      if (span < g.count) throw InputError("random grid: fewer than count values in [lo, hi)");
      if (g.count > kMaxGrid) throw CapacityError("random grid too large");
      if (span > std::numeric_limits<std::uint64_t>::max())
        throw InputError("random grid span must fit in 64 bits");
      const auto width = span.convert_to<std::uint64_t>();
      Rng rng(g.seed);
      std::set<std::uint64_t> picked;
      if (width <= 4 * g.count) {
        // Partial Fisher-Yates over the whole span.
        std::vector<std::uint64_t> all(width);
        for (std::uint64_t i = 0; i < width; ++i) all[i] = i;
        for (std::uint64_t i = 0; i < g.count; ++i) std::swap(all[i], all[i + rng.below(width - i)]);
        picked.insert(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(g.count));
      } else {
        while (picked.size() < g.count) picked.insert(rng.below(width));
      }
      for (auto off : picked) out.push_back(g.lo + off);
      break;
    }
    case GridSpec::Kind::FullMod: {
      if (!modulus) throw InputError("grid kind fullmod requires an expression with 'mod m'");
      if (*modulus > kMaxGrid) throw CapacityError("fullmod grid exceeds the grid size limit");
      for (BigInt v = 0; v < *modulus; ++v) out.push_back(v);
      break;
    }
  }
  return out;
}

Universe grid_universe(const std::string& name, const std::vector<BigInt>& values) {
  std::vector<Label> labels;
  labels.reserve(values.size());
  for (const auto& v : values) {
    if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
      labels.emplace_back(v.convert_to<std::int64_t>());
    else
      labels.emplace_back(v.str());
  }
  return Universe(name, std::move(labels));
}

// ---------------------------------------------------------------------------

Instance3 instantiate3(const RelationExpr& expr, std::vector<BigInt> xs, std::vector<BigInt> ys,
                       std::vector<BigInt> zs) {
  require_only(expr, "xyz", "instantiate3");
  require_nonempty(xs, "x");
  require_nonempty(ys, "y");
  require_nonempty(zs, "z");

  std::vector<Triple> triples;
  GridEvaluator ev(expr, "xyz", {&xs, &ys, &zs});
  std::vector<std::size_t> idx(3, 0);

  if (const Node* side = isolated_side(expr, 'z')) {
    auto targets = index_targets(zs, expr.modulus());
    for (idx[0] = 0; idx[0] < xs.size(); ++idx[0])
      for (idx[1] = 0; idx[1] < ys.size(); ++idx[1]) {
        BigInt v = ev.value_of(*side, idx);
        if (expr.modulus()) v = floor_mod(v, *expr.modulus());
        auto it = targets.find(v);
        if (it == targets.end()) continue;
        for (std::size_t k : it->second) triples.push_back({idx[0], idx[1], k});
      }
  } else {
    for (idx[0] = 0; idx[0] < xs.size(); ++idx[0])
      for (idx[1] = 0; idx[1] < ys.size(); ++idx[1])
        for (idx[2] = 0; idx[2] < zs.size(); ++idx[2])
          if (ev.holds_at(idx)) triples.push_back({idx[0], idx[1], idx[2]});
  }

  Universe ux = grid_universe("X", xs), uy = grid_universe("Y", ys), uz = grid_universe("Z", zs);
  std::sort(triples.begin(), triples.end());
  return Instance3{FiniteRelation3(std::move(ux), std::move(uy), std::move(uz), std::move(triples)),
                   std::move(xs), std::move(ys), std::move(zs)};
}

Instance3 instantiate3(const RelationExpr& expr, const GridSpec& gx, const GridSpec& gy,
                       const GridSpec& gz) {
  return instantiate3(expr, grid_values(gx, expr.modulus()), grid_values(gy, expr.modulus()),
                      grid_values(gz, expr.modulus()));
}

FiniteRelation2 instantiate2(const RelationExpr& expr, const std::vector<BigInt>& ys,
                             const std::vector<BigInt>& zs) {
  require_only(expr, "yz", "instantiate2");
  require_nonempty(ys, "y");
  require_nonempty(zs, "z");
  Relation2Builder b(grid_universe("Y", ys), grid_universe("Z", zs));
  GridEvaluator ev(expr, "yz", {&ys, &zs});
  std::vector<std::size_t> idx(2, 0);
  if (const Node* side = isolated_side(expr, 'z')) {
    auto targets = index_targets(zs, expr.modulus());
    for (idx[0] = 0; idx[0] < ys.size(); ++idx[0]) {
      BigInt v = ev.value_of(*side, idx);
      if (expr.modulus()) v = floor_mod(v, *expr.modulus());
      if (auto it = targets.find(v); it != targets.end())
        for (std::size_t k : it->second) b.add(idx[0], k);
    }
  } else {
    for (idx[0] = 0; idx[0] < ys.size(); ++idx[0])
      for (idx[1] = 0; idx[1] < zs.size(); ++idx[1])
        if (ev.holds_at(idx)) b.add(idx[0], idx[1]);
  }
  return std::move(b).finish();
}

FiniteRelation2 instantiate2(const RelationExpr& expr, const GridSpec& gy, const GridSpec& gz) {
  return instantiate2(expr, grid_values(gy, expr.modulus()), grid_values(gz, expr.modulus()));
}

std::vector<BigInt> top_frequent_values(const RelationExpr& expr, const std::vector<BigInt>& xs,
                                        const std::vector<BigInt>& ys, std::uint64_t count) {
  const Node* side = isolated_side(expr, 'z');
  if (!side) throw InputError("grid 'top:' needs an expression with z isolated on one side");
  std::map<BigInt, std::uint64_t> freq;
  GridEvaluator ev(expr, "xy", {&xs, &ys});
  std::vector<std::size_t> idx(2, 0);
  for (idx[0] = 0; idx[0] < xs.size(); ++idx[0])
    for (idx[1] = 0; idx[1] < ys.size(); ++idx[1]) {
      BigInt v = ev.value_of(*side, idx);
      if (expr.modulus()) v = floor_mod(v, *expr.modulus());
      ++freq[v];
    }
  std::vector<std::pair<std::uint64_t, BigInt>> ranked;
  for (auto& [v, c] : freq) ranked.emplace_back(c, v);
  // Stable on the value-ordered map, so ties go to the smaller value.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  if (ranked.size() > count) ranked.resize(count);
  std::vector<BigInt> out;
  for (auto& [c, v] : ranked) out.push_back(v);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace expd
