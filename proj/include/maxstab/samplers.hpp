#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "maxstab/logistic.hpp"
#include "maxstab/partition.hpp"
#include "maxstab/rng.hpp"

namespace maxstab {

enum class ModelTag { Logistic, OuterPowerClayton };

std::string to_string(ModelTag tag);
ModelTag parse_model_tag(std::string_view text);

/// Above this alpha the stable mixing variable is treated as degenerate at 1.
inline constexpr double kIndependenceThreshold = 0.999;

/// One scaled componentwise maximum M_n/n with its occurrence partition.
struct MaxBlockObservation {
  std::vector<double> maxima;
  Partition partition;
  std::int64_t n = 0;

  int dim() const { return static_cast<int>(maxima.size()); }
};

struct Dataset {
  std::int64_t n = 0;
  int d = 0;
  ModelTag model = ModelTag::Logistic;
  double alpha_true = 1.0;
  std::vector<MaxBlockObservation> observations;

  /// Throws ValidationError if observations disagree on n or d.
  void validate() const;
};

/// Positive stable variate with Laplace transform exp(-t^alpha), drawn by the
/// Chambers-Mallows-Stuck (Kanter) construction. Returns 1 for alpha = 1.
double sample_positive_stable(double alpha, RngStream& rng);
/// log of the same variate; avoids overflow for small alpha.
double sample_log_positive_stable(double alpha, RngStream& rng);

/// X_j = (S / E_j)^alpha, joint CDF exp(-(sum x_j^{-1/alpha})^alpha).
std::vector<double> sample_logistic_vector(int d, LogisticParam theta, RngStream& rng);

/// Marshall-Olkin draw from the outer power Clayton copula with generator
/// phi(t) = (1 + t^alpha)^{-1}, mapped to standard Frechet margins.
std::vector<double> sample_opc_vector(int d, LogisticParam theta, RngStream& rng);

std::vector<double> sample_vector(ModelTag model, int d, LogisticParam theta, RngStream& rng);

/// n raw vectors, row-major n x d. Consumes the stream exactly as
/// sample_max_block does.
std::vector<double> sample_raw_block(std::int64_t n, int d, ModelTag model, LogisticParam theta, RngStream& rng);

/// Componentwise maximum of n vectors divided by n, plus the occurrence
/// partition, computed in one streaming pass.
MaxBlockObservation sample_max_block(std::int64_t n, int d, ModelTag model, LogisticParam theta, RngStream& rng);

/// Observation i is drawn from rng.child(i).
Dataset sample_dataset(int num_obs, std::int64_t n, int d, ModelTag model, LogisticParam theta,
                       const RngStream& rng);

}  // namespace maxstab
