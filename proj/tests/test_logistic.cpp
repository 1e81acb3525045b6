#include <cmath>
#include <limits>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "maxstab/density.hpp"
#include "maxstab/errors.hpp"
#include "maxstab/logistic.hpp"
#include "support/oracles.hpp"

using namespace maxstab;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Partition::Mask mask_of(std::initializer_list<int> idx) {
  Partition::Mask m = 0;
  for (int j : idx) m |= Partition::Mask{1} << j;
  return m;
}

double fd_neg_partial(const LogisticModel& model, const std::vector<double>& x, const std::vector<int>& subset) {
  return testing::logistic_neg_partial_fd(model.alpha(), x, subset);
}

}  // namespace

TEST_CASE("logistic parameter domain") {
  CHECK_THROWS_AS(LogisticParam(0.0), DomainError);
  CHECK_THROWS_AS(LogisticParam(1.2), DomainError);
  CHECK_THROWS_AS(LogisticParam(NAN), DomainError);
  CHECK(LogisticParam(1.0).alpha() == 1.0);
}

TEST_CASE("exponent function values") {
  const std::vector<double> x{0.5, 2.0, 3.0};
  CHECK(LogisticModel(LogisticParam(1.0)).exponent_V(x) == doctest::Approx(2.0 + 0.5 + 1.0 / 3.0).epsilon(1e-14));
  for (double a : {0.2, 0.5, 0.9}) {
    CHECK(LogisticModel(LogisticParam(a)).exponent_V(std::vector<double>(7, 1.0)) ==
          doctest::Approx(std::pow(7.0, a)).epsilon(1e-13));
  }
  CHECK(LogisticModel(LogisticParam(0.5)).exponent_V(std::vector<double>{1, 1}) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(LogisticModel(LogisticParam(0.5)).exponent_V(std::vector<double>{1, -1}), ValidationError);
}

TEST_CASE("exponent function homogeneity, margins and ordering") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> unif(0.1, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    const LogisticModel model(LogisticParam(std::uniform_real_distribution<double>(0.05, 1.0)(gen)));
    std::vector<double> x(1 + gen() % 8);
    for (double& v : x) v = unif(gen);
    const double c = unif(gen);
    std::vector<double> cx = x;
    for (double& v : cx) v *= c;
    CHECK(model.exponent_V(cx) == doctest::Approx(model.exponent_V(x) / c).epsilon(1e-13));
  }
  // V(inf, ..., x_j, ..., inf) = 1/x_j
  const LogisticModel model(LogisticParam(0.4));
  CHECK(model.exponent_V(std::vector<double>{1e300, 2.5, 1e300}) == doctest::Approx(0.4).epsilon(1e-12));
  double prev = 0.0;
  for (double a = 0.05; a <= 1.0; a += 0.05) {
    const double v = LogisticModel(LogisticParam(a)).exponent_V(std::vector<double>(5, 1.0));
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("partial derivative closed form: special values") {
  // d = 1, alpha = 1: -V_{1}(2) = 1/4
  CHECK(std::exp(LogisticModel(LogisticParam(1.0)).log_neg_V_partial(std::vector<double>{2.0}, 1)) ==
        doctest::Approx(0.25).epsilon(1e-15));
  CHECK(LogisticModel(LogisticParam(1.0)).log_neg_V_partial(std::vector<double>{1, 2}, mask_of({0, 1})) == kNegInf);
  const LogisticModel model(LogisticParam(0.6));
  const std::vector<double> x{1, 2, 3};
  const double fd = fd_neg_partial(model, x, {0, 1});
  CHECK(std::exp(model.log_neg_V_partial(x, mask_of({0, 1}))) == doctest::Approx(fd).epsilon(1e-6));
  CHECK_THROWS_AS(model.log_neg_V_partial(x, 0), ValidationError);
  CHECK_THROWS_AS(model.log_neg_V_partial(x, mask_of({3})), ValidationError);
}

TEST_CASE("partial derivatives match finite differences of V") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unif(0.5, 3.0);
  for (double a : {0.3, 0.6, 0.9}) {
    const LogisticModel model{LogisticParam(a)};
    for (int trial = 0; trial < 30; ++trial) {
      const int d = 1 + static_cast<int>(gen() % 5);
      std::vector<double> x(static_cast<std::size_t>(d));
      for (double& v : x) v = unif(gen);
      Partition::Mask subset = 0;
      while (subset == 0) subset = gen() & ((Partition::Mask{1} << d) - 1);
      std::vector<int> idx;
      for (int j = 0; j < d; ++j) {
        if ((subset >> j) & 1) idx.push_back(j);
      }
      const double closed = std::exp(model.log_neg_V_partial(x, subset));
      const double fd = fd_neg_partial(model, x, idx);
      INFO("alpha=", a, " d=", d, " |S|=", idx.size());
      CHECK(std::abs(closed - fd) / std::abs(closed) < 1e-5);
    }
  }
}

TEST_CASE("limit density values") {
  const LogisticModel indep(LogisticParam(1.0));
  const std::vector<double> x{0.7, 1.3, 2.0};
  double expected = 0.0;
  for (double v : x) expected += -2.0 * std::log(v) - 1.0 / v;
  CHECK(log_st_density(indep, x, Partition::singletons(3)) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(log_st_density(indep, x, Partition::parse("1,2|3")) == kNegInf);

  const LogisticModel model(LogisticParam(0.5));
  const std::vector<double> x4{0.8, 1.1, 2.0, 0.6};
  const auto p = Partition::parse("1,2|3|4");
  const double manual = model.log_neg_V_partial(x4, mask_of({0, 1})) + model.log_neg_V_partial(x4, mask_of({2})) +
                        model.log_neg_V_partial(x4, mask_of({3})) - model.exponent_V(x4);
  CHECK(log_st_density(model, x4, p) == doctest::Approx(manual).epsilon(1e-14));
  CHECK_THROWS_AS(log_st_density(model, x4, Partition::singletons(3)), ValidationError);
}

TEST_CASE("d = 2 limit densities sum to the mixed second partial of the CDF") {
  const LogisticModel model(LogisticParam(0.5));
  const std::vector<double> x{1.0, 1.0};
  const double total = std::exp(log_st_density(model, x, Partition::singletons(2))) +
                       std::exp(log_st_density(model, x, Partition::single_block(2)));
  auto cdf = [&](const std::vector<double>& pt) { return std::exp(-model.exponent_V(pt)); };
  const double fd = testing::mixed_partial_fd<double>(cdf, x, {0, 1}, 1e-3);
  CHECK(std::abs(total - fd) / total < 1e-4);
}

TEST_CASE("full density") {
  const LogisticModel indep(LogisticParam(1.0));
  CHECK(log_full_density(indep, std::vector<double>{1, 1}) == doctest::Approx(-2.0).epsilon(1e-14));

  const LogisticModel model(LogisticParam(0.7));
  const std::vector<double> x{1, 2, 3};
  double sum = 0.0;
  for (const auto& p : enumerate_partitions(3)) sum += std::exp(log_st_density(model, x, p));
  CHECK(std::exp(log_full_density(model, x)) == doctest::Approx(sum).epsilon(1e-13));
  CHECK_THROWS_AS(log_full_density(model, std::vector<double>(15, 1.0)), CapacityError);
}

TEST_CASE("d = 2 full density integrates to one") {
  // Substitute x = -1/log(u) on each axis so the domain becomes (0,1)^2.
  const LogisticModel model(LogisticParam(0.5));
  using boost::math::quadrature::gauss_kronrod;
  auto inner = [&](double u1) {
    return gauss_kronrod<double, 61>::integrate(
        [&](double u2) {
          const double x1 = -1.0 / std::log(u1);
          const double x2 = -1.0 / std::log(u2);
          const double jac = x1 * x1 / u1 * x2 * x2 / u2;
          const std::vector<double> x{x1, x2};
          return std::exp(log_full_density(model, x)) * jac;
        },
        0.0, 1.0, 15, 1e-10);
  };
  const double total = gauss_kronrod<double, 61>::integrate(inner, 0.0, 1.0, 15, 1e-10);
  CHECK(std::abs(total - 1.0) < 1e-3);
}

TEST_CASE("second-order density: worked example and leading coefficient") {
  const LogisticModel model(LogisticParam(0.6));
  const std::vector<double> x{0.9, 1.4, 0.7, 2.2, 1.1};
  const std::int64_t n = 50;
  auto nv = [&](std::initializer_list<int> idx) { return std::exp(model.log_neg_V_partial(x, mask_of(idx))); };
  const double expected = (nv({0, 1}) * nv({2, 3}) * nv({4}) * (1.0 - 3.0 / n) +
                           nv({0, 1}) * nv({2}) * nv({3}) * nv({4}) / n + nv({0}) * nv({1}) * nv({2, 3}) * nv({4}) / n) *
                          std::exp(-model.exponent_V(x));
  CHECK(std::exp(log_second_order_density(model, x, Partition::parse("1,2|3,4|5"), n)) ==
        doctest::Approx(expected).epsilon(1e-13));

  // all singletons: only the deflated leading term
  const auto singles = Partition::singletons(5);
  CHECK(log_second_order_density(model, x, singles, n) ==
        doctest::Approx(std::log(1.0 - 10.0 / n) + log_st_density(model, x, singles)).epsilon(1e-13));

  // m = 3 at n = 50: leading coefficient 1 - 3/50 = 0.94
  const auto three = Partition::parse("1,2|3,4|5");
  CHECK(1.0 - 3.0 * 2.0 / (2.0 * 50.0) == doctest::Approx(0.94));

  CHECK_THROWS_AS(log_second_order_density(model, x, three, 10), ConstraintError);
  CHECK_NOTHROW(log_second_order_density(model, x, three, 11));
}

TEST_CASE("second-order density at alpha = 1 keeps split terms of non-singleton blocks") {
  const LogisticModel indep(LogisticParam(1.0));
  const std::vector<double> x{1.5, 0.5};
  const double v = log_second_order_density(indep, x, Partition::single_block(2), 100);
  CHECK(v == doctest::Approx(-std::log(100.0) + log_st_density(indep, x, Partition::singletons(2))).epsilon(1e-13));
}

TEST_CASE("second-order and limit densities both sum to the full density") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> unif(0.3, 4.0);
  for (int d = 1; d <= 6; ++d) {
    for (double a : {0.2, 0.55, 0.95}) {
      const LogisticModel model{LogisticParam(a)};
      std::vector<double> x(static_cast<std::size_t>(d));
      for (double& v : x) v = unif(gen);
      const double full = std::exp(log_full_density(model, x));
      for (std::int64_t n : {std::int64_t{30}, std::int64_t{1000}}) {
        double so = 0.0;
        double st = 0.0;
        for_each_partition(d, [&](const Partition& p) {
          so += std::exp(log_second_order_density(model, x, p, n));
          st += std::exp(log_st_density(model, x, p));
        });
        CHECK(std::abs(so - full) / full < 1e-10);
        CHECK(std::abs(st - full) / full < 1e-10);
      }
    }
  }
}

TEST_CASE("second-order density tends to the limit density as n grows") {
  const LogisticModel model(LogisticParam(0.5));
  const std::vector<double> x{0.9, 1.4, 0.7, 2.2, 1.1};
  for_each_partition(5, [&](const Partition& p) {
    CHECK(std::abs(log_second_order_density(model, x, p, 1000000000) - log_st_density(model, x, p)) < 1e-6);
  });
}

TEST_CASE("return level") {
  CHECK(return_level(0.37, 1, 0.05) == doctest::Approx(1.0 / -std::log(0.95)).epsilon(1e-14));
  CHECK(return_level(0.9, 10, 0.01) == doctest::Approx(790.35).epsilon(1e-4));
  CHECK(return_level(0.8, 10, 0.01) < return_level(0.9, 10, 0.01));
  CHECK(return_level(0.9, 10, 0.02) < return_level(0.9, 10, 0.01));
  CHECK_THROWS_AS(return_level(0.5, 3, 1.0), DomainError);
  CHECK_THROWS_AS(return_level(0.5, 3, 0.0), DomainError);
  // an underestimated alpha gives a level whose true non-exceedance is (1-p)^{d^{alpha-alpha_hat}}
  const double alpha = 0.9;
  const double alpha_hat = 0.85;
  const double p = 0.01;
  const int d = 10;
  CHECK(prob_all_below(return_level(alpha_hat, d, p), alpha, d) ==
        doctest::Approx(std::pow(1.0 - p, std::pow(d, alpha - alpha_hat))).epsilon(1e-12));
  CHECK(prob_all_below(return_level(alpha, d, p), alpha, d) == doctest::Approx(1.0 - p).epsilon(1e-12));
}
