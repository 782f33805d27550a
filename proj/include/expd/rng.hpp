#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace expd {

// Seeded generator with a portable integer reduction. The standard
// distributions are implementation-defined, so bounded draws use rejection
// sampling on raw mt19937_64 output to keep report files bit-exact across
// toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  // Independent child stream; children with distinct ids do not overlap in
  // practice and do not depend on how much of the parent was consumed.
  Rng split(std::uint64_t id) const {
    return Rng(seed_, stream_ * 0x9E3779B97F4A7C15ULL + id + 1);
  }

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t v;
    do v = engine_();
    while (v >= limit);
    return v % bound;
  }

  // Uniform in [lo, hi]; lo <= hi.
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
    if (span == ~std::uint64_t{0}) return static_cast<std::int64_t>(engine_());
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + below(span + 1));
  }

  bool chance(double p) { return static_cast<double>(engine_() >> 11) * 0x1.0p-53 < p; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace expd
