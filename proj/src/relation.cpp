#include "expd/relation.hpp"

#include <algorithm>
#include <limits>
#include <mutex>
#include <set>

#include "expd/errors.hpp"

namespace expd {

std::string label_to_string(const Label& label) {
  if (const auto* i = std::get_if<std::int64_t>(&label)) return std::to_string(*i);
  return std::get<std::string>(label);
}

Universe::Universe(std::string name_, std::size_t size_) : name(std::move(name_)), size(size_) {}

Universe::Universe(std::string name_, std::vector<Label> labels_)
    : name(std::move(name_)), size(labels_.size()), labels(std::move(labels_)) {
  validate();
}

void Universe::validate() const {
  if (!labels) return;
  if (labels->size() != size)
    throw InputError("universe '" + name + "': " + std::to_string(labels->size()) +
                     " labels for size " + std::to_string(size));
  std::set<Label> seen;
  for (const auto& l : *labels)
    if (!seen.insert(l).second)
      throw InputError("universe '" + name + "': duplicate label " + label_to_string(l));
}

bool same_universe(const Universe& a, const Universe& b) {
  return a.name == b.name && a.size == b.size;
}

Subset::Subset(const Universe& u) : universe_name_(u.name), members_(u.size, false) {}

Subset Subset::full(const Universe& u) {
  Subset s(u);
  s.members_ = Bitset(u.size, true);
  return s;
}

Subset::Subset(const Universe& u, const std::vector<std::size_t>& members) : Subset(u) {
  for (std::size_t m : members) insert(m);
}

void Subset::insert(std::size_t i) {
  if (i >= members_.size())
    throw InputError("subset of '" + universe_name_ + "': index " + std::to_string(i) +
                     " out of range " + std::to_string(members_.size()));
  members_.set(i);
}

void Subset::erase(std::size_t i) {
  if (i < members_.size()) members_.reset(i);
}

void Subset::require_universe(const Universe& u, const char* what) const {
  if (universe_name_ != u.name || members_.size() != u.size)
    throw InputError(std::string(what) + ": subset of '" + universe_name_ + "' (size " +
                     std::to_string(members_.size()) + ") does not belong to universe '" +
                     u.name + "' (size " + std::to_string(u.size) + ")");
}

// ---------------------------------------------------------------------------

FiniteRelation2::FiniteRelation2(Universe u, Universe v)
    : u_(std::move(u)),
      v_(std::move(v)),
      rows_(u_.size, Bitset(v_.size)),
      cols_(v_.size, Bitset(u_.size)) {
  u_.validate();
  v_.validate();
}

std::size_t FiniteRelation2::recount() const noexcept {
  std::size_t c = 0;
  for (const auto& r : rows_) c += r.count();
  return c;
}

std::vector<std::pair<std::size_t, std::size_t>> FiniteRelation2::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(edge_count_);
  for (std::size_t i = 0; i < rows_.size(); ++i)
    rows_[i].for_each([&](std::size_t j) { out.emplace_back(i, j); });
  return out;
}

Relation2Builder::Relation2Builder(Universe u, Universe v) : rel_(std::move(u), std::move(v)) {}

void Relation2Builder::add(std::size_t i, std::size_t j) {
  if (i >= rel_.u_.size || j >= rel_.v_.size)
    throw InputError("pair (" + std::to_string(i) + "," + std::to_string(j) +
                     ") out of range for " + std::to_string(rel_.u_.size) + "x" +
                     std::to_string(rel_.v_.size));
  if (!rel_.rows_[i].test(j)) {
    rel_.rows_[i].set(j);
    rel_.cols_[j].set(i);
    ++rel_.edge_count_;
  }
}

FiniteRelation2 Relation2Builder::finish() && { return std::move(rel_); }

FiniteRelation2 build_relation2(Universe u, Universe v,
                                const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  Relation2Builder b(std::move(u), std::move(v));
  for (auto [i, j] : pairs) b.add(i, j);
  return std::move(b).finish();
}

// ---------------------------------------------------------------------------

struct FiniteRelation3::Cache {
  std::array<std::once_flag, 3> once;
  std::array<FiberMap, 3> maps;
};

FiniteRelation3::FiniteRelation3(Universe x, Universe y, Universe z,
                                 std::vector<Triple> sorted_unique)
    : axes_{std::move(x), std::move(y), std::move(z)},
      triples_(std::move(sorted_unique)),
      cache_(std::make_shared<Cache>()) {}

bool FiniteRelation3::contains(const Triple& t) const {
  return std::binary_search(triples_.begin(), triples_.end(), t);
}

const FiniteRelation3::FiberMap& FiniteRelation3::fibers(Pairing p) const {
  auto slot = static_cast<std::size_t>(p);
  std::call_once(cache_->once[slot], [&] {
    // (first, second) -> remaining coordinate
    static constexpr std::array<std::array<std::size_t, 3>, 3> kAxes{
        {{0, 1, 2}, {0, 2, 1}, {1, 2, 0}}};
    const auto& ax = kAxes[slot];
    FiberMap& map = cache_->maps[slot];
    const std::size_t second_size = axes_[ax[1]].size;
    for (const auto& t : triples_) map[pair_key(t[ax[0]], t[ax[1]], second_size)].push_back(t[ax[2]]);
    for (auto& [key, vals] : map) std::sort(vals.begin(), vals.end());
  });
  return cache_->maps[slot];
}

FiniteRelation3 build_relation3(Universe x, Universe y, Universe z, std::vector<Triple> triples) {
  x.validate();
  y.validate();
  z.validate();
  for (const auto& t : triples)
    if (t[0] >= x.size || t[1] >= y.size || t[2] >= z.size)
      throw InputError("triple (" + std::to_string(t[0]) + "," + std::to_string(t[1]) + "," +
                       std::to_string(t[2]) + ") out of range for " + std::to_string(x.size) +
                       "x" + std::to_string(y.size) + "x" + std::to_string(z.size));
  std::sort(triples.begin(), triples.end());
  triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
  return FiniteRelation3(std::move(x), std::move(y), std::move(z), std::move(triples));
}

// ---------------------------------------------------------------------------

Subset fiber2(const FiniteRelation2& rel, Side side, std::size_t index) {
  const Universe& from = side == Side::Left ? rel.u() : rel.v();
  const Universe& to = side == Side::Left ? rel.v() : rel.u();
  if (index >= from.size)
    throw InputError("fiber index " + std::to_string(index) + " out of range for '" + from.name +
                     "' of size " + std::to_string(from.size));
  Subset out(to);
  const Bitset& bits = side == Side::Left ? rel.row(index) : rel.column(index);
  bits.for_each([&](std::size_t j) { out.insert(j); });
  return out;
}

std::uint64_t count_grid2(const FiniteRelation2& rel, const Subset& a, const Subset& b) {
  a.require_universe(rel.u(), "count_grid2 left");
  b.require_universe(rel.v(), "count_grid2 right");
  std::uint64_t total = 0;
  a.bits().for_each([&](std::size_t i) { total += rel.row(i).count_and(b.bits()); });
  return total;
}

std::uint64_t count_grid3(const FiniteRelation3& rel, const Subset& a, const Subset& b,
                          const Subset& c) {
  a.require_universe(rel.x(), "count_grid3 x");
  b.require_universe(rel.y(), "count_grid3 y");
  c.require_universe(rel.z(), "count_grid3 z");
  std::uint64_t total = 0;
  for (const auto& t : rel.triples())
    if (a.contains(t[0]) && b.contains(t[1]) && c.contains(t[2])) ++total;
  return total;
}

// ---------------------------------------------------------------------------

PairUniverse::PairUniverse(const Universe& base) : base_size_(base.size) {
  if (base.size != 0 && base.size > std::numeric_limits<std::size_t>::max() / base.size)
    throw CapacityError("pair universe over '" + base.name + "' of size " +
                        std::to_string(base.size) + " overflows the index range");
  universe_ = Universe(base.name + "^2", base.size * base.size);
}

std::size_t PairUniverse::encode(std::size_t i, std::size_t j) const {
  if (i >= base_size_ || j >= base_size_)
    throw InputError("pair (" + std::to_string(i) + "," + std::to_string(j) +
                     ") out of range for base size " + std::to_string(base_size_));
  return i * base_size_ + j;
}

std::pair<std::size_t, std::size_t> PairUniverse::decode(std::size_t index) const {
  if (index >= universe_.size)
    throw InputError("pair index " + std::to_string(index) + " out of range " +
                     std::to_string(universe_.size));
  return {index / base_size_, index % base_size_};
}

PairUniverse pair_universe(const Universe& u) { return PairUniverse(u); }

Subset square_subset(const Subset& s, const PairUniverse& pu) {
  Subset out(pu.universe());
  auto members = s.elements();
  for (std::size_t i : members)
    for (std::size_t j : members) out.insert(pu.encode(i, j));
  return out;
}

}  // namespace expd
