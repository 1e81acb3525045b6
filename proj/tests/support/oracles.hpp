#pragma once

// Test-only oracles, kept independent of the library code paths they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace maxstab::testing {

/// Kolmogorov-Smirnov statistic of a sample against a continuous CDF.
inline double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double m = static_cast<double>(sample.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    dmax = std::max({dmax, (static_cast<double>(i) + 1.0) / m - f, f - static_cast<double>(i) / m});
  }
  return dmax;
}

/// Asymptotic Kolmogorov p-value with Stephens' small-sample correction.
inline double ks_pvalue(double d_stat, std::size_t sample_size) {
  const double sn = std::sqrt(static_cast<double>(sample_size));
  const double t = d_stat * (sn + 0.12 + 0.11 / sn);
  if (t < 0.2) return 1.0;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    p += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

inline double frechet_cdf(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

/// Binomial standard error of an empirical frequency.
inline double binomial_se(double p, double trials) { return std::sqrt(p * (1.0 - p) / trials); }

/// Mixed partial derivative d^|S| f / prod_{j in S} dx_j by nested central
/// differences with per-coordinate steps h_j = rel_step * x_j, followed by one
/// Richardson extrapolation (error O(h^4)). Real may be long double for extra
/// headroom against cancellation.
template <class Real>
Real mixed_partial_fd(const std::function<Real(const std::vector<Real>&)>& f, std::vector<Real> x,
                      const std::vector<int>& subset, Real rel_step) {
  auto nested = [&](Real scale) {
    std::function<Real(std::vector<Real>&, std::size_t)> rec = [&](std::vector<Real>& pt, std::size_t k) {
      if (k == subset.size()) return f(pt);
      const auto j = static_cast<std::size_t>(subset[k]);
      const Real h = Real(rel_step * scale * x[j]);
      const Real saved = pt[j];
      pt[j] = Real(saved + h);
      const Real up = rec(pt, k + 1);
      pt[j] = Real(saved - h);
      const Real down = rec(pt, k + 1);
      pt[j] = saved;
      return Real((up - down) / (2 * h));
    };
    std::vector<Real> pt = x;
    return rec(pt, 0);
  };
  const Real coarse = nested(1);
  const Real fine = nested(Real(0.5));
  return Real((4 * fine - coarse) / 3);
}

/// -V_S for the logistic model by differentiating an independent 50-digit
/// evaluation of V = (sum x_i^{-1/alpha})^alpha. Steps shrink with alpha
/// because V varies on the scale alpha * x_j.
inline double logistic_neg_partial_fd(double alpha, const std::vector<double>& x, const std::vector<int>& subset) {
  using Big = boost::multiprecision::cpp_bin_float_50;
  const Big a = alpha;
  auto V = [a](const std::vector<Big>& pt) {
    Big t = 0;
    for (const Big& v : pt) t += pow(v, -1 / a);
    return Big(pow(t, a));
  };
  const std::vector<Big> xb(x.begin(), x.end());
  return static_cast<double>(-mixed_partial_fd<Big>(V, xb, subset, Big(1e-7) * a));
}

/// B_{k+1} = sum_i C(k, i) B_i, a different recurrence from the Bell triangle.
inline std::vector<double> bell_by_binomial_sum(int max_d) {
  std::vector<double> bell{1.0};
  for (int k = 0; k < max_d; ++k) {
    double next = 0.0;
    double binom = 1.0;
    for (int i = 0; i <= k; ++i) {
      next += binom * bell[static_cast<std::size_t>(i)];
      binom = binom * (k - i) / (i + 1);
    }
    bell.push_back(next);
  }
  return bell;
}

}  // namespace maxstab::testing
