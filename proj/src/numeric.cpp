#include "maxstab/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace maxstab {

double log_sum_exp(std::span<const double> values) {
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  double top = neg_inf;
  for (double v : values) top = std::max(top, v);
  if (top == neg_inf) return neg_inf;
  if (top == std::numeric_limits<double>::infinity()) return top;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - top);
  return top + std::log(acc);
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double order_invariant_sum(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return pairwise_sum(sorted);
}

}  // namespace maxstab
