#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "maxstab/partition.hpp"
#include "maxstab/samplers.hpp"

namespace maxstab {

enum class LikelihoodKind { StephensonTawn, SecondOrder, Full };

std::string to_string(LikelihoodKind kind);
/// Accepts "st", "stephenson-tawn", "second-order", "so", "full".
LikelihoodKind parse_likelihood_kind(std::string_view text);

/// Throws ConstraintError / CapacityError when `kind` cannot be used at (n, d).
void check_kind_applicable(LikelihoodKind kind, std::int64_t n, int d);
bool kind_applicable(LikelihoodKind kind, std::int64_t n, int d);

/// A dataset with log-maxima precomputed; this is what the likelihood kernels
/// consume, since log x does not depend on alpha.
struct PreparedDataset {
  std::int64_t n = 0;
  int d = 0;
  std::vector<double> log_maxima;  // observation-major, size = count * d
  std::vector<Partition> partitions;

  explicit PreparedDataset(const Dataset& ds);
  std::size_t size() const { return partitions.size(); }
  std::span<const double> log_x(std::size_t i) const {
    return std::span<const double>(log_maxima).subspan(i * static_cast<std::size_t>(d), static_cast<std::size_t>(d));
  }
};

enum class Execution { Serial, Parallel };

/// Per-observation log densities at alpha. The Serial path is the reference
/// the OpenMP path is tested against; both write out[i] for observation i.
void observation_log_densities(const PreparedDataset& data, double alpha, LikelihoodKind kind,
                               std::span<double> out, Execution exec = Execution::Serial);

/// Sum of per-observation log densities, accumulated with an order-invariant
/// policy (sorted pairwise sum) so the result is bit-identical under any
/// permutation of the observations and for either execution mode.
double log_likelihood(const PreparedDataset& data, double alpha, LikelihoodKind kind,
                      Execution exec = Execution::Serial);
double log_likelihood(const Dataset& ds, double alpha, LikelihoodKind kind);

struct FitOptions {
  double lower = 1e-3;
  double upper = 1.0 - 1e-6;
  double tol = 1e-6;
  int max_evaluations = 200;
};

struct FitResult {
  double alpha_hat = 0.0;
  double loglik = 0.0;
  int evaluations = 0;
  bool converged = false;
  bool boundary = false;
  LikelihoodKind kind = LikelihoodKind::StephensonTawn;
};

/// Maximises the log-likelihood in alpha over [lower, upper] by Brent's
/// method (golden section with parabolic steps). Throws FitFailure if every
/// evaluation is -inf.
FitResult fit(const PreparedDataset& data, LikelihoodKind kind, const FitOptions& options = {});
FitResult fit(const Dataset& ds, LikelihoodKind kind, double tol = 1e-6);

/// One CSV row: kind, alpha_hat, loglik, evaluations, converged, boundary_flag.
std::string fit_result_csv_header();
std::string to_csv_row(const FitResult& r);

struct BiasSummary {
  double mean_bias = 0.0;
  double sample_sd = 0.0;
  double mc_se = 0.0;
  double t_statistic = 0.0;
  bool significant_5pct = false;
  int replications = 0;
};

/// Mean bias, sample sd and a two-sided one-sample t-test at the 5% level.
BiasSummary bias_summary(std::span<const double> estimates, double alpha_true);

}  // namespace maxstab
