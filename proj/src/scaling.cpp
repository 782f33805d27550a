#include "expd/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "expd/errors.hpp"

namespace expd {

ExponentFit fit_exponent(std::vector<std::uint64_t> sizes, std::vector<std::uint64_t> counts) {
  if (sizes.size() != counts.size()) throw InputError("sizes and counts differ in length");
  if (sizes.size() < 3) throw InputError("an exponent fit needs at least 3 sizes");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 0 || (i > 0 && sizes[i] <= sizes[i - 1]))
      throw InputError("sizes must be positive and strictly increasing");
    if (counts[i] == 0) throw InputError("count at n = " + std::to_string(sizes[i]) + " is zero; log undefined");
  }
  const auto k = static_cast<double>(sizes.size());
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    lx.push_back(std::log(static_cast<double>(sizes[i])));
    ly.push_back(std::log(static_cast<double>(counts[i])));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= k;
  my /= k;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < lx.size(); ++i)
    fit.residual_max = std::max(fit.residual_max, std::abs(ly[i] - (fit.intercept + fit.slope * lx[i])));
  fit.sizes = std::move(sizes);
  fit.counts = std::move(counts);
  return fit;
}

ExponentFit run_scaling(const RelationFamily& family, const std::vector<std::uint64_t>& sizes,
                        unsigned threads) {
  if (sizes.size() < 3) throw InputError("run_scaling needs at least 3 sizes");
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1]) throw InputError("run_scaling sizes must be strictly increasing");

  auto count_at = [&family](std::uint64_t n) {
    FamilyInstance inst = family.generate(n);
    return count_grid3(inst.relation, inst.a, inst.b, inst.c);
  };
  std::vector<std::uint64_t> counts(sizes.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < sizes.size(); ++i) counts[i] = count_at(sizes[i]);
  } else {
    for (std::size_t start = 0; start < sizes.size(); start += threads) {
      std::vector<std::future<std::uint64_t>> jobs;
      const std::size_t end = std::min<std::size_t>(sizes.size(), start + threads);
      for (std::size_t i = start; i < end; ++i)
        jobs.push_back(std::async(std::launch::async, count_at, sizes[i]));
      for (std::size_t i = start; i < end; ++i) counts[i] = jobs[i - start].get();
    }
  }
  return fit_exponent(sizes, std::move(counts));
}

}  // namespace expd
