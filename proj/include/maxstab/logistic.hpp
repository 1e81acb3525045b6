#pragma once

#include <concepts>
#include <span>
#include <vector>

#include "maxstab/partition.hpp"

namespace maxstab {

/// A model evaluated at one point x: the exponent V(x) and log(-V_S(x)) for
/// any non-empty index set S.
template <class P>
concept ModelPoint = requires(const P& pt, Partition::Mask subset) {
  { pt.dim() } -> std::convertible_to<int>;
  { pt.exponent_V() } -> std::convertible_to<double>;
  { pt.log_neg_V_partial(subset) } -> std::convertible_to<double>;
};

/// A max-stable model with standard Frechet margins, G(x) = exp(-V(x)).
/// The density code in density.hpp is written against this concept only.
template <class M>
concept MaxStableModel = requires(const M& m, std::span<const double> x, Partition::Mask subset) {
  { m.exponent_V(x) } -> std::convertible_to<double>;
  { m.log_neg_V_partial(x, subset) } -> std::convertible_to<double>;
  { m.at(x) } -> ModelPoint;
  { m.at_log(x) } -> ModelPoint;
};

/// Dependence parameter of the logistic model, 0 < alpha <= 1.
class LogisticParam {
 public:
  explicit LogisticParam(double alpha);
  double alpha() const { return alpha_; }

 private:
  double alpha_;
};

class LogisticModel;

/// The logistic model bound to one observation; caches log x and log T where
/// T = sum_i x_i^{-1/alpha}. Refers to its model, which must outlive it.
class LogisticPoint {
 public:
  int dim() const { return static_cast<int>(log_x_.size()); }
  double log_T() const { return log_T_; }
  double exponent_V() const;
  /// log(-V_S(x)); -inf when the derivative vanishes (alpha = 1, |S| >= 2).
  double log_neg_V_partial(Partition::Mask subset) const;
  /// Same, with sum_{j in S} log x_j supplied by the caller.
  double log_neg_V_partial(int subset_size, double sum_log_x) const;
  double sum_log_x(Partition::Mask subset) const;

 private:
  friend class LogisticModel;
  LogisticPoint(const LogisticModel& model, std::vector<double> log_x);

  const LogisticModel* model_;
  std::vector<double> log_x_;
  double log_T_;
};

/// V(x) = (sum_i x_i^{-1/alpha})^alpha.
///
/// Partial derivatives over an index set S with |S| = s follow from s-fold
/// differentiation of T^alpha:
///   -V_S(x) = alpha^{1-s} prod_{k=1}^{s-1}(k - alpha) T^{alpha-s} prod_{j in S} x_j^{-1/alpha-1}
/// and are evaluated entirely in log space.
class LogisticModel {
 public:
  explicit LogisticModel(LogisticParam theta);

  double alpha() const { return alpha_; }

  double exponent_V(std::span<const double> x) const;
  double log_neg_V_partial(std::span<const double> x, Partition::Mask subset) const;

  LogisticPoint at(std::span<const double> x) const;
  /// Binds to an observation given as log x (avoids recomputing logarithms).
  LogisticPoint at_log(std::span<const double> log_x) const;

  /// (1-s) log alpha + sum_{k=1}^{s-1} log(k - alpha), the alpha-only part of log(-V_S).
  double size_coefficient(int s) const;

 private:
  double alpha_;
  std::vector<double> size_coef_;
};

static_assert(MaxStableModel<LogisticModel>);

/// Maximum likelihood estimate of the level exceeded by at least one of d
/// components with probability p: d^alpha / (-log(1-p)).
double return_level(double alpha_hat, int d, double p);

/// Probability that every component of a logistic(alpha) vector stays below `level`.
double prob_all_below(double level, double alpha, int d);

}  // namespace maxstab
