#pragma once

#include <span>
#include <vector>

namespace maxstab {

/// log(sum_i exp(v_i)); -inf for an empty range or when every term is -inf.
double log_sum_exp(std::span<const double> values);

/// Pairwise (tree) summation in index order.
double pairwise_sum(std::span<const double> values);

/// Sorts a copy ascending, then sums pairwise. The result depends only on
/// the multiset of values, so it is invariant to input order bit for bit.
double order_invariant_sum(std::span<const double> values);

}  // namespace maxstab
