#include "maxstab/samplers.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "maxstab/errors.hpp"

namespace maxstab {

namespace {

void check_dim(int d) {
  if (d < 1 || d > kMaxDim) throw ValidationError("sampler dimension must lie in [1, 64]");
}

void fill_logistic(int d, double alpha, RngStream& rng, double* out) {
  if (alpha > kIndependenceThreshold) {
    for (int j = 0; j < d; ++j) out[j] = 1.0 / rng.exponential();
    return;
  }
  const double log_s = sample_log_positive_stable(alpha, rng);
  for (int j = 0; j < d; ++j) out[j] = std::exp(alpha * (log_s - std::log(rng.exponential())));
}

void fill_opc(int d, double alpha, RngStream& rng, double* out) {
  // W = S E^{1/alpha} has Laplace transform (1 + t^alpha)^{-1}; U_j = phi(E_j / W)
  // and X_j = -1 / log U_j = 1 / log(1 + (E_j / W)^alpha).
  const double log_s = alpha > kIndependenceThreshold ? 0.0 : sample_log_positive_stable(alpha, rng);
  const double log_w = log_s + std::log(rng.exponential()) / alpha;
  for (int j = 0; j < d; ++j) {
    const double t = std::max(std::exp(alpha * (std::log(rng.exponential()) - log_w)),
                              std::numeric_limits<double>::min());
    out[j] = 1.0 / std::log1p(t);
  }
}

void fill_vector(ModelTag model, int d, double alpha, RngStream& rng, double* out) {
  switch (model) {
    case ModelTag::Logistic:
      fill_logistic(d, alpha, rng, out);
      return;
    case ModelTag::OuterPowerClayton:
      fill_opc(d, alpha, rng, out);
      return;
  }
}

}  // namespace

std::string to_string(ModelTag tag) {
  switch (tag) {
    case ModelTag::Logistic:
      return "logistic";
    case ModelTag::OuterPowerClayton:
      return "opc";
  }
  return "unknown";
}

ModelTag parse_model_tag(std::string_view text) {
  if (text == "logistic") return ModelTag::Logistic;
  if (text == "opc" || text == "outer-power-clayton") return ModelTag::OuterPowerClayton;
  throw ValidationError("unknown model '" + std::string(text) + "' (expected logistic or opc)");
}

void Dataset::validate() const {
  if (n < 1 || d < 1) throw ValidationError("dataset needs n >= 1 and d >= 1");
  for (const auto& obs : observations) {
    if (obs.n != n || obs.dim() != d || obs.partition.dim() != d) {
      throw ValidationError("dataset observations must share n and d");
    }
    for (double v : obs.maxima) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("maxima must be finite and positive");
    }
  }
}

double sample_log_positive_stable(double alpha, RngStream& rng) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("positive stable index must lie in (0, 1]");
  if (alpha == 1.0) return 0.0;
  const double u = std::numbers::pi * rng.uniform();
  const double e = rng.exponential();
  return std::log(std::sin(alpha * u)) - std::log(std::sin(u)) / alpha +
         (1.0 - alpha) / alpha * (std::log(std::sin((1.0 - alpha) * u)) - std::log(e));
}

double sample_positive_stable(double alpha, RngStream& rng) {
  return std::exp(sample_log_positive_stable(alpha, rng));
}

std::vector<double> sample_logistic_vector(int d, LogisticParam theta, RngStream& rng) {
  return sample_vector(ModelTag::Logistic, d, theta, rng);
}

std::vector<double> sample_opc_vector(int d, LogisticParam theta, RngStream& rng) {
  return sample_vector(ModelTag::OuterPowerClayton, d, theta, rng);
}

std::vector<double> sample_vector(ModelTag model, int d, LogisticParam theta, RngStream& rng) {
  check_dim(d);
  std::vector<double> out(static_cast<std::size_t>(d));
  fill_vector(model, d, theta.alpha(), rng, out.data());
  return out;
}

std::vector<double> sample_raw_block(std::int64_t n, int d, ModelTag model, LogisticParam theta, RngStream& rng) {
  check_dim(d);
  if (n < 1) throw ValidationError("block size n must be positive");
  std::vector<double> rows(static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
  for (std::int64_t i = 0; i < n; ++i) {
    fill_vector(model, d, theta.alpha(), rng, rows.data() + i * d);
  }
  return rows;
}

MaxBlockObservation sample_max_block(std::int64_t n, int d, ModelTag model, LogisticParam theta, RngStream& rng) {
  check_dim(d);
  if (n < 1) throw ValidationError("block size n must be positive");
  const auto ud = static_cast<std::size_t>(d);
  std::vector<double> row(ud);
  std::vector<double> best(ud);
  std::vector<int> argmax(ud, 0);
  fill_vector(model, d, theta.alpha(), rng, best.data());
  for (std::int64_t i = 1; i < n; ++i) {
    fill_vector(model, d, theta.alpha(), rng, row.data());
    for (std::size_t j = 0; j < ud; ++j) {
      if (row[j] > best[j]) {
        best[j] = row[j];
        argmax[j] = static_cast<int>(i);
      }
    }
  }
  const auto nn = static_cast<double>(n);
  for (double& v : best) v /= nn;
  return MaxBlockObservation{std::move(best), Partition::from_labels(argmax), n};
}

Dataset sample_dataset(int num_obs, std::int64_t n, int d, ModelTag model, LogisticParam theta,
                       const RngStream& rng) {
  if (num_obs < 1) throw ValidationError("dataset needs at least one observation");
  Dataset ds{n, d, model, theta.alpha(), {}};
  ds.observations.reserve(static_cast<std::size_t>(num_obs));
  for (int i = 0; i < num_obs; ++i) {
    RngStream child = rng.child(static_cast<std::uint64_t>(i));
    ds.observations.push_back(sample_max_block(n, d, model, theta, child));
  }
  return ds;
}

}  // namespace maxstab
