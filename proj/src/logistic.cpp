#include "maxstab/logistic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "maxstab/errors.hpp"
#include "maxstab/numeric.hpp"

namespace maxstab {

namespace {

std::vector<double> checked_logs(std::span<const double> x) {
  if (x.empty()) throw ValidationError("observation vector is empty");
  if (x.size() > static_cast<std::size_t>(kMaxDim)) throw ValidationError("observation dimension above 64");
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(x[j] > 0.0) || !std::isfinite(x[j])) {
      throw ValidationError("observation components must be finite and positive");
    }
    out[j] = std::log(x[j]);
  }
  return out;
}

}  // namespace

LogisticParam::LogisticParam(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("logistic alpha must lie in (0, 1], got " + std::to_string(alpha));
  }
}

LogisticModel::LogisticModel(LogisticParam theta) : alpha_(theta.alpha()) {
  size_coef_.resize(static_cast<std::size_t>(kMaxDim) + 1);
  size_coef_[0] = 0.0;
  double acc = 0.0;
  for (int s = 1; s <= kMaxDim; ++s) {
    if (s >= 2) acc += std::log(static_cast<double>(s - 1) - alpha_);  // log 0 = -inf at alpha = 1
    size_coef_[static_cast<std::size_t>(s)] = (1.0 - s) * std::log(alpha_) + acc;
  }
}

double LogisticModel::size_coefficient(int s) const { return size_coef_[static_cast<std::size_t>(s)]; }

LogisticPoint::LogisticPoint(const LogisticModel& model, std::vector<double> log_x)
    : model_(&model), log_x_(std::move(log_x)) {
  const double inv_alpha = 1.0 / model.alpha();
  std::vector<double> terms(log_x_.size());
  std::transform(log_x_.begin(), log_x_.end(), terms.begin(), [&](double lx) { return -inv_alpha * lx; });
  log_T_ = log_sum_exp(terms);
}

double LogisticPoint::exponent_V() const { return std::exp(model_->alpha() * log_T_); }

double LogisticPoint::sum_log_x(Partition::Mask subset) const {
  double s = 0.0;
  for (; subset != 0; subset &= subset - 1) s += log_x_[static_cast<std::size_t>(std::countr_zero(subset))];
  return s;
}

double LogisticPoint::log_neg_V_partial(int subset_size, double sum_log_x) const {
  const double alpha = model_->alpha();
  const double c = model_->size_coefficient(subset_size);
  if (c == -std::numeric_limits<double>::infinity()) return c;
  return c + (alpha - subset_size) * log_T_ + (-1.0 / alpha - 1.0) * sum_log_x;
}

double LogisticPoint::log_neg_V_partial(Partition::Mask subset) const {
  if (subset == 0 || (dim() < 64 && (subset >> dim()) != 0)) {
    throw ValidationError("partial derivative index set must be a non-empty subset of {1..d}");
  }
  return log_neg_V_partial(std::popcount(subset), sum_log_x(subset));
}

double LogisticModel::exponent_V(std::span<const double> x) const { return at(x).exponent_V(); }

double LogisticModel::log_neg_V_partial(std::span<const double> x, Partition::Mask subset) const {
  return at(x).log_neg_V_partial(subset);
}

LogisticPoint LogisticModel::at(std::span<const double> x) const { return LogisticPoint(*this, checked_logs(x)); }

LogisticPoint LogisticModel::at_log(std::span<const double> log_x) const {
  return LogisticPoint(*this, std::vector<double>(log_x.begin(), log_x.end()));
}

double return_level(double alpha_hat, int d, double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("return_level: p must lie in (0, 1)");
  if (!(alpha_hat > 0.0 && alpha_hat <= 1.0)) throw DomainError("return_level: alpha must lie in (0, 1]");
  if (d < 1) throw DomainError("return_level: d must be positive");
  return std::pow(static_cast<double>(d), alpha_hat) / -std::log1p(-p);
}

double prob_all_below(double level, double alpha, int d) {
  return std::exp(-std::pow(static_cast<double>(d), alpha) / level);
}

}  // namespace maxstab
