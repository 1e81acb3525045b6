#pragma once

// Occurrence-time densities for a max-stable model, written against the
// ModelPoint / MaxStableModel concepts.
//
//   limit (Stephenson-Tawn):  e^{-V} prod_l (-V_{pi_l})
//   second order:             e^{-V} [ (1 - m(m-1)/2n) prod_l (-V_{pi_l})
//                                      + (1/n) sum_{rho in splits(pi)} prod_{B in rho} (-V_B) ]
//   full:                     sum over every partition of the limit density

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "maxstab/errors.hpp"
#include "maxstab/logistic.hpp"
#include "maxstab/numeric.hpp"
#include "maxstab/partition.hpp"

namespace maxstab {

inline void check_partition_dim(int point_dim, const Partition& p) {
  if (p.dim() != point_dim) {
    throw ValidationError("partition dimension " + std::to_string(p.dim()) + " does not match observation dimension " +
                          std::to_string(point_dim));
  }
}

/// Throws ConstraintError unless n > d(d-1)/2.
inline void check_second_order_constraint(std::int64_t n, int d) {
  const std::int64_t bound = static_cast<std::int64_t>(d) * (d - 1) / 2;
  if (n <= bound) {
    throw ConstraintError("second-order likelihood requires n > d(d-1)/2 = " + std::to_string(bound) +
                          ", got n = " + std::to_string(n));
  }
}

template <ModelPoint P>
double log_st_density_at(const P& pt, const Partition& p) {
  check_partition_dim(pt.dim(), p);
  double acc = 0.0;
  for (Partition::Mask block : p.blocks()) acc += pt.log_neg_V_partial(block);
  return acc - pt.exponent_V();
}

template <ModelPoint P>
double log_second_order_density_at(const P& pt, const Partition& p, std::int64_t n) {
  check_partition_dim(pt.dim(), p);
  check_second_order_constraint(n, pt.dim());
  const int m = p.size();
  const auto um = static_cast<std::size_t>(m);

  std::vector<double> block_terms(um);
  for (std::size_t b = 0; b < um; ++b) block_terms[b] = pt.log_neg_V_partial(p.blocks()[b]);

  // Product over all blocks but one, summed directly so that a -inf factor in
  // the removed block cannot poison the others.
  std::vector<double> without(um, 0.0);
  for (std::size_t b = 0; b < um; ++b) {
    for (std::size_t o = 0; o < um; ++o) {
      if (o != b) without[b] += block_terms[o];
    }
  }
  double lead = 0.0;
  for (double t : block_terms) lead += t;

  const double nn = static_cast<double>(n);
  const double lead_coef = 1.0 - static_cast<double>(m) * (m - 1) / (2.0 * nn);
  const double log_inv_n = -std::log(nn);

  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(refinement_count(p)) + 1);
  terms.push_back(std::log(lead_coef) + lead);
  for_each_block_split(p, [&](int b, Partition::Mask part, Partition::Mask rest) {
    terms.push_back(log_inv_n + without[static_cast<std::size_t>(b)] + pt.log_neg_V_partial(part) +
                    pt.log_neg_V_partial(rest));
  });
  return log_sum_exp(terms) - pt.exponent_V();
}

template <ModelPoint P>
double log_full_density_at(const P& pt) {
  std::vector<double> terms;
  for_each_partition(pt.dim(), [&](const Partition& p) { terms.push_back(log_st_density_at(pt, p)); });
  return log_sum_exp(terms);
}

template <MaxStableModel M>
double log_st_density(const M& model, std::span<const double> x, const Partition& p) {
  return log_st_density_at(model.at(x), p);
}

template <MaxStableModel M>
double log_second_order_density(const M& model, std::span<const double> x, const Partition& p, std::int64_t n) {
  return log_second_order_density_at(model.at(x), p, n);
}

template <MaxStableModel M>
double log_full_density(const M& model, std::span<const double> x) {
  if (static_cast<int>(x.size()) > kEnumerationCap) {
    throw CapacityError("full density needs d <= " + std::to_string(kEnumerationCap));
  }
  return log_full_density_at(model.at(x));
}

/// Number of positive terms in the second-order density: 1 + refinement_count.
inline std::uint64_t second_order_term_count(const Partition& p) { return 1 + refinement_count(p); }

}  // namespace maxstab
