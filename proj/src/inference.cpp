#include "maxstab/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

#include "maxstab/density.hpp"
#include "maxstab/errors.hpp"
#include "maxstab/io.hpp"
#include "maxstab/logistic.hpp"
#include "maxstab/numeric.hpp"

namespace maxstab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double observation_log_density(const LogisticModel& model, std::span<const double> log_x, const Partition& p,
                               LikelihoodKind kind, std::int64_t n) {
  const LogisticPoint pt = model.at_log(log_x);
  switch (kind) {
    case LikelihoodKind::StephensonTawn:
      return log_st_density_at(pt, p);
    case LikelihoodKind::SecondOrder:
      return log_second_order_density_at(pt, p, n);
    case LikelihoodKind::Full:
      return log_full_density_at(pt);
  }
  return -kInf;
}

}  // namespace

std::string to_string(LikelihoodKind kind) {
  switch (kind) {
    case LikelihoodKind::StephensonTawn:
      return "st";
    case LikelihoodKind::SecondOrder:
      return "second-order";
    case LikelihoodKind::Full:
      return "full";
  }
  return "unknown";
}

LikelihoodKind parse_likelihood_kind(std::string_view text) {
  if (text == "st" || text == "stephenson-tawn") return LikelihoodKind::StephensonTawn;
  if (text == "second-order" || text == "so") return LikelihoodKind::SecondOrder;
  if (text == "full") return LikelihoodKind::Full;
  throw ValidationError("unknown likelihood kind '" + std::string(text) + "' (expected st, second-order or full)");
}

void check_kind_applicable(LikelihoodKind kind, std::int64_t n, int d) {
  if (kind == LikelihoodKind::SecondOrder) check_second_order_constraint(n, d);
  if (kind == LikelihoodKind::Full && d > kEnumerationCap) {
    throw CapacityError("full likelihood needs d <= " + std::to_string(kEnumerationCap));
  }
}

bool kind_applicable(LikelihoodKind kind, std::int64_t n, int d) {
  try {
    check_kind_applicable(kind, n, d);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

PreparedDataset::PreparedDataset(const Dataset& ds) : n(ds.n), d(ds.d) {
  ds.validate();
  log_maxima.reserve(ds.observations.size() * static_cast<std::size_t>(ds.d));
  partitions.reserve(ds.observations.size());
  for (const auto& obs : ds.observations) {
    for (double v : obs.maxima) log_maxima.push_back(std::log(v));
    partitions.push_back(obs.partition);
  }
}

void observation_log_densities(const PreparedDataset& data, double alpha, LikelihoodKind kind,
                               std::span<double> out, Execution exec) {
  if (out.size() != data.size()) throw ValidationError("output span does not match dataset size");
  check_kind_applicable(kind, data.n, data.d);
  const LogisticModel model{LogisticParam(alpha)};
  const auto count = static_cast<std::int64_t>(data.size());
  if (exec == Execution::Serial) {
    for (std::int64_t i = 0; i < count; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      out[ui] = observation_log_density(model, data.log_x(ui), data.partitions[ui], kind, data.n);
    }
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    out[ui] = observation_log_density(model, data.log_x(ui), data.partitions[ui], kind, data.n);
  }
}

double log_likelihood(const PreparedDataset& data, double alpha, LikelihoodKind kind, Execution exec) {
  std::vector<double> terms(data.size());
  observation_log_densities(data, alpha, kind, terms, exec);
  for (double t : terms) {
    if (t == -kInf) return -kInf;
  }
  return order_invariant_sum(terms);
}

double log_likelihood(const Dataset& ds, double alpha, LikelihoodKind kind) {
  return log_likelihood(PreparedDataset(ds), alpha, kind);
}

FitResult fit(const PreparedDataset& data, LikelihoodKind kind, const FitOptions& options) {
  if (data.size() == 0) throw ValidationError("cannot fit an empty dataset");
  if (!(options.tol > 0.0)) throw ValidationError("fit tolerance must be positive");
  if (!(options.lower < options.upper) || options.lower <= 0.0 || options.upper > 1.0) {
    throw ValidationError("search interval must satisfy 0 < lower < upper <= 1");
  }
  check_kind_applicable(kind, data.n, data.d);

  FitResult result;
  result.kind = kind;
  auto objective = [&](double alpha) {
    ++result.evaluations;
    return -log_likelihood(data, alpha, kind);
  };

  // Brent's minimiser on -loglik (after Brent 1973, "fmin").
  const double golden = 0.5 * (3.0 - std::sqrt(5.0));
  const double rel_eps = std::sqrt(std::numeric_limits<double>::epsilon());
  double a = options.lower;
  double b = options.upper;
  double x = a + golden * (b - a);
  double w = x;
  double v = x;
  double fx = objective(x);
  double fw = fx;
  double fv = fx;
  double step = 0.0;
  double prev_step = 0.0;

  const int budget = options.max_evaluations - 2;  // two endpoint checks follow
  while (result.evaluations < budget) {
    const double mid = 0.5 * (a + b);
    const double tol1 = rel_eps * std::abs(x) + options.tol / 4.0;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - mid) <= tol2 - 0.5 * (b - a)) {
      result.converged = true;
      break;
    }
    bool use_golden = true;
    if (std::abs(prev_step) > tol1 && std::isfinite(fx) && std::isfinite(fw) && std::isfinite(fv)) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double older = prev_step;
      prev_step = step;
      if (std::abs(p) < std::abs(0.5 * q * older) && p > q * (a - x) && p < q * (b - x)) {
        step = p / q;
        const double u = x + step;
        if (u - a < tol2 || b - u < tol2) step = x < mid ? tol1 : -tol1;
        use_golden = false;
      }
    }
    if (use_golden) {
      prev_step = x >= mid ? a - x : b - x;
      step = golden * prev_step;
    }
    const double u = std::abs(step) >= tol1 ? x + step : x + (step > 0.0 ? tol1 : -tol1);
    const double fu = objective(u);
    if (fu <= fx) {
      (u >= x ? a : b) = x;
      v = w;
      fv = fw;
      w = x;
      fw = fx;
      x = u;
      fx = fu;
    } else {
      (u < x ? a : b) = u;
      if (fu <= fw || w == x) {
        v = w;
        fv = fw;
        w = u;
        fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u;
        fv = fu;
      }
    }
  }

  // Interior steps never land on the interval ends; check them explicitly.
  for (double end : {options.lower, options.upper}) {
    const double fe = objective(end);
    if (fe < fx) {
      x = end;
      fx = fe;
    }
  }
  if (!std::isfinite(fx)) throw FitFailure("log-likelihood is -inf over the whole search interval");

  result.alpha_hat = x;
  result.loglik = -fx;
  result.boundary = (x - options.lower) <= 2.0 * options.tol || (options.upper - x) <= 2.0 * options.tol;
  return result;
}

FitResult fit(const Dataset& ds, LikelihoodKind kind, double tol) {
  FitOptions options;
  options.tol = tol;
  return fit(PreparedDataset(ds), kind, options);
}

std::string fit_result_csv_header() { return "kind,alpha_hat,loglik,evaluations,converged,boundary_flag"; }

std::string to_csv_row(const FitResult& r) {
  return to_string(r.kind) + "," + format_double(r.alpha_hat) + "," + format_double(r.loglik) + "," +
         std::to_string(r.evaluations) + "," + (r.converged ? "1" : "0") + "," + (r.boundary ? "1" : "0");
}

BiasSummary bias_summary(std::span<const double> estimates, double alpha_true) {
  if (estimates.size() < 2) throw DomainError("bias_summary needs at least two estimates");
  const auto m = static_cast<double>(estimates.size());
  std::vector<double> dev(estimates.size());
  for (std::size_t i = 0; i < estimates.size(); ++i) dev[i] = estimates[i] - alpha_true;
  const double mean = pairwise_sum(dev) / m;
  for (double& e : dev) e = (e - mean) * (e - mean);
  const double sd = std::sqrt(pairwise_sum(dev) / (m - 1.0));

  BiasSummary s;
  s.replications = static_cast<int>(estimates.size());
  s.mean_bias = mean;
  s.sample_sd = sd;
  s.mc_se = sd / std::sqrt(m);
  if (s.mc_se > 0.0) {
    s.t_statistic = mean / s.mc_se;
  } else {
    s.t_statistic = mean == 0.0 ? 0.0 : std::copysign(kInf, mean);
  }
  const boost::math::students_t dist(m - 1.0);
  const double critical = boost::math::quantile(boost::math::complement(dist, 0.025));
  s.significant_5pct = std::abs(s.t_statistic) > critical;
  return s;
}

}  // namespace maxstab
