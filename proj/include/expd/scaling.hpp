#pragma once

#include <cstdint>
#include <vector>

#include "expd/es_pipeline.hpp"

namespace expd {

// Least-squares fit of log(count) against log(n).
struct ExponentFit {
  std::vector<std::uint64_t> sizes;
  std::vector<std::uint64_t> counts;
  double slope = 0;
  double intercept = 0;
  double residual_max = 0;  // max |log count - (intercept + slope log n)|
};

// Needs >= 3 strictly increasing sizes and positive counts.
ExponentFit fit_exponent(std::vector<std::uint64_t> sizes, std::vector<std::uint64_t> counts);

// Exact |F_n ∩ A_n×B_n×C_n| per size, then the log-log fit. Sizes may be
// generated on up to `threads` threads; results are ordered by size.
ExponentFit run_scaling(const RelationFamily& family, const std::vector<std::uint64_t>& sizes,
                        unsigned threads = 1);

}  // namespace expd
