#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "expd/bitset.hpp"

namespace expd {

using Label = std::variant<std::int64_t, std::string>;

std::string label_to_string(const Label& label);

// A finite indexed universe: elements are 0..size-1, optionally labelled.
struct Universe {
  std::string name;
  std::size_t size = 0;
  std::optional<std::vector<Label>> labels;

  Universe() = default;
  Universe(std::string name, std::size_t size);
  Universe(std::string name, std::vector<Label> labels);

  // Throws InputError if labels are present with the wrong length or repeat.
  void validate() const;

  friend bool operator==(const Universe&, const Universe&) = default;
};

bool same_universe(const Universe& a, const Universe& b);

// A subset of a universe, stored as a bit vector of length universe.size.
class Subset {
 public:
  Subset() = default;
  explicit Subset(const Universe& u);
  Subset(const Universe& u, const std::vector<std::size_t>& members);

  static Subset full(const Universe& u);
  static Subset empty(const Universe& u) { return Subset(u); }

  const std::string& universe_name() const noexcept { return universe_name_; }
  std::size_t universe_size() const noexcept { return members_.size(); }
  const Bitset& bits() const noexcept { return members_; }

  bool contains(std::size_t i) const noexcept { return members_.test(i); }
  std::size_t cardinality() const noexcept { return members_.count(); }
  std::vector<std::size_t> elements() const { return members_.indices(); }

  void insert(std::size_t i);
  void erase(std::size_t i);

  // Throws InputError unless this subset belongs to u.
  void require_universe(const Universe& u, const char* what) const;

  friend bool operator==(const Subset&, const Subset&) = default;

 private:
  std::string universe_name_;
  Bitset members_;
};

enum class Side { Left, Right };

// Dense bipartite relation E ⊆ U × V. Rows hold the left fibers E_u,
// columns the right fibers E^v; both are kept so either side can be fibered
// in O(1).
class FiniteRelation2 {
 public:
  FiniteRelation2() = default;
  FiniteRelation2(Universe u, Universe v);

  const Universe& u() const noexcept { return u_; }
  const Universe& v() const noexcept { return v_; }
  std::size_t edge_count() const noexcept { return edge_count_; }

  bool has_edge(std::size_t i, std::size_t j) const noexcept { return rows_[i].test(j); }
  const Bitset& row(std::size_t i) const noexcept { return rows_[i]; }
  const Bitset& column(std::size_t j) const noexcept { return cols_[j]; }

  // Recount from the bit matrix; equals edge_count() for a consistent object.
  std::size_t recount() const noexcept;

  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

  friend bool operator==(const FiniteRelation2& a, const FiniteRelation2& b) {
    return same_universe(a.u_, b.u_) && same_universe(a.v_, b.v_) && a.rows_ == b.rows_;
  }

 private:
  friend FiniteRelation2 build_relation2(Universe, Universe,
                                         const std::vector<std::pair<std::size_t, std::size_t>>&);
  friend class Relation2Builder;

  Universe u_;
  Universe v_;
  std::vector<Bitset> rows_;
  std::vector<Bitset> cols_;
  std::size_t edge_count_ = 0;
};

// Incremental construction for callers that generate edges one at a time.
class Relation2Builder {
 public:
  Relation2Builder(Universe u, Universe v);
  void add(std::size_t i, std::size_t j);
  FiniteRelation2 finish() &&;

 private:
  FiniteRelation2 rel_;
};

using Triple = std::array<std::size_t, 3>;

// The three ways of pairing two coordinates of a ternary relation; the
// remaining coordinate is the one fibered over.
enum class Pairing { XY, XZ, YZ };

// Ternary relation F ⊆ X × Y × Z as a sorted, duplicate-free triple list.
// Fiber maps keyed by a coordinate pair are built lazily, once, and are safe
// to request concurrently.
class FiniteRelation3 {
 public:
  using FiberMap = std::unordered_map<std::uint64_t, std::vector<std::size_t>>;

  FiniteRelation3() = default;
  FiniteRelation3(Universe x, Universe y, Universe z, std::vector<Triple> sorted_unique);

  const Universe& x() const noexcept { return axes_[0]; }
  const Universe& y() const noexcept { return axes_[1]; }
  const Universe& z() const noexcept { return axes_[2]; }
  const Universe& axis(std::size_t i) const noexcept { return axes_[i]; }
  const std::vector<Triple>& triples() const noexcept { return triples_; }
  std::size_t size() const noexcept { return triples_.size(); }

  bool contains(const Triple& t) const;

  // Map from the paired coordinates (encoded row-major) to the sorted list of
  // values of the remaining coordinate.
  const FiberMap& fibers(Pairing p) const;

  static std::uint64_t pair_key(std::size_t a, std::size_t b, std::size_t b_size) noexcept {
    return static_cast<std::uint64_t>(a) * b_size + b;
  }

 private:
  struct Cache;

  std::array<Universe, 3> axes_;
  std::vector<Triple> triples_;
  std::shared_ptr<Cache> cache_;
};

FiniteRelation2 build_relation2(Universe u, Universe v,
                                const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

FiniteRelation3 build_relation3(Universe x, Universe y, Universe z, std::vector<Triple> triples);

// The left fiber E_a (a subset of V) or the right fiber E^b (a subset of U).
Subset fiber2(const FiniteRelation2& rel, Side side, std::size_t index);

// |E ∩ A×B|
std::uint64_t count_grid2(const FiniteRelation2& rel, const Subset& a, const Subset& b);

// |F ∩ A×B×C|
std::uint64_t count_grid3(const FiniteRelation3& rel, const Subset& a, const Subset& b,
                          const Subset& c);

// Row-major bijection between U×U and a universe of size |U|².
class PairUniverse {
 public:
  explicit PairUniverse(const Universe& base);

  const Universe& universe() const noexcept { return universe_; }
  std::size_t base_size() const noexcept { return base_size_; }

  std::size_t encode(std::size_t i, std::size_t j) const;
  std::pair<std::size_t, std::size_t> decode(std::size_t index) const;

 private:
  Universe universe_;
  std::size_t base_size_;
};

PairUniverse pair_universe(const Universe& u);

// The subset S² of the pair universe over S's universe.
Subset square_subset(const Subset& s, const PairUniverse& pu);

}  // namespace expd
