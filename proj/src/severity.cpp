#include "bms/severity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bms/errors.hpp"

namespace bms {

namespace {

// 1 - e^{-x}(1 + x) for small x, where the direct form cancels.
double one_minus_gamma2_tail_series(double x) {
  double term = x * x / 2.0;  // k = 2
  double sum = term;
  for (int k = 3; k < 40; ++k) {
    term *= -x / k;
    const double add = term * (k - 1);
    sum += add;
    if (std::abs(add) < 1e-18 * sum) break;
  }
  return sum;
}

}  // namespace

ExponentialSeverity::ExponentialSeverity(double mean) : mean_(mean) {
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw Error(ErrorCode::InvalidArgument,
                "exponential severity mean must be positive and finite, got " + std::to_string(mean));
  }
}

double ExponentialSeverity::cdf(double y) const noexcept {
  if (y <= 0.0) return 0.0;
  return -std::expm1(-y / mean_);
}

double ExponentialSeverity::survival(double y) const noexcept {
  if (y <= 0.0) return 1.0;
  return std::exp(-y / mean_);
}

double ExponentialSeverity::truncated_mean(double d) const noexcept {
  if (d <= 0.0) return 0.0;
  if (std::isinf(d)) return mean_;
  const double x = d / mean_;
  if (x < 0.5) return mean_ * one_minus_gamma2_tail_series(x);
  return -mean_ * std::expm1(-x) - d * std::exp(-x);
}

double ExponentialSeverity::band_probability(double a, const Limit& b) const noexcept {
  if (is_infinite(b)) return survival(a);
  const double hi = std::get<double>(b);
  if (hi <= a) return 0.0;
  // S(a) - S(b) = S(a) (1 - e^{-(b-a)/mean})
  return -survival(a) * std::expm1(-(hi - std::max(a, 0.0)) / mean_);
}

double ExponentialSeverity::band_mean(double a, const Limit& b) const noexcept {
  const double lo = std::max(a, 0.0);
  if (is_infinite(b)) return lo + mean_;
  // Memoryless: C - a given the band is exponential truncated to (0, b - a].
  const double w = (std::get<double>(b) - lo) / mean_;
  if (w < 1e-8) return lo + 0.5 * w * mean_;
  return lo + mean_ * (1.0 - w / std::expm1(w));
}

double ExponentialSeverity::sample_in_band(double a, const Limit& b, double u) const noexcept {
  const double lo = std::max(a, 0.0);
  if (is_infinite(b)) return lo - mean_ * std::log1p(-u);
  const double w = (std::get<double>(b) - lo) / mean_;
  return lo - mean_ * std::log1p(u * std::expm1(-w));
}

ClaimSeverityModel ClaimSeverityModel::exponential(double mean) {
  return ClaimSeverityModel(ExponentialSeverity(mean));
}

double ClaimSeverityModel::mean() const {
  return std::visit([](const auto& law) { return law.mean(); }, law_);
}

double ClaimSeverityModel::cdf(double y) const {
  return std::visit([y](const auto& law) { return law.cdf(y); }, law_);
}

double ClaimSeverityModel::survival(double y) const {
  return std::visit([y](const auto& law) { return law.survival(y); }, law_);
}

double ClaimSeverityModel::truncated_mean(double d) const {
  if (d < 0.0 || std::isnan(d)) {
    throw Error(ErrorCode::NegativeDeductible, "truncation point must be >= 0, got " + std::to_string(d));
  }
  return std::visit([d](const auto& law) { return law.truncated_mean(d); }, law_);
}

double ClaimSeverityModel::band_probability(double a, const Limit& b) const {
  return std::visit([&](const auto& law) { return law.band_probability(a, b); }, law_);
}

double ClaimSeverityModel::band_mean(double a, const Limit& b) const {
  if (a < 0.0 || (!is_infinite(b) && !(std::get<double>(b) > a))) {
    throw Error(ErrorCode::InvalidArgument, "band requires 0 <= a < b");
  }
  if (!(band_probability(a, b) > 0.0)) {
    throw Error(ErrorCode::EmptyBand, "band (" + std::to_string(a) + ", b] carries no probability mass");
  }
  return std::visit([&](const auto& law) { return law.band_mean(a, b); }, law_);
}

double ClaimSeverityModel::sample_in_band(double a, const Limit& b, double u) const {
  return std::visit([&](const auto& law) { return law.sample_in_band(a, b, u); }, law_);
}

double ClaimTypePartition::lower_edge(std::size_t type) const {
  if (type >= type_count()) throw Error(ErrorCode::InvalidArgument, "claim type out of range");
  return type == 0 ? 0.0 : thresholds_[type - 1];
}

Limit ClaimTypePartition::upper_edge(std::size_t type) const {
  if (type >= type_count()) throw Error(ErrorCode::InvalidArgument, "claim type out of range");
  if (type == thresholds_.size()) return infinity;
  return thresholds_[type];
}

double ClaimTypePartition::deductible_cap(std::size_t type) const {
  if (type >= type_count()) throw Error(ErrorCode::InvalidArgument, "claim type out of range");
  return type == 0 ? thresholds_[0] : thresholds_[type - 1];
}

ClaimTypePartition type_probabilities(const ClaimSeverityModel& model,
                                      std::span<const double> thresholds) {
  if (thresholds.empty()) {
    throw Error(ErrorCode::InvalidArgument, "at least one claim-type threshold is required");
  }
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    if (!std::isfinite(thresholds[k]) || !(thresholds[k] > 0.0)) {
      throw Error(ErrorCode::NonIncreasingThresholds,
                  "thresholds must be positive and finite (threshold " + std::to_string(k + 1) + ")");
    }
    if (k > 0 && !(thresholds[k] > thresholds[k - 1])) {
      throw Error(ErrorCode::NonIncreasingThresholds,
                  "thresholds must be strictly increasing (threshold " + std::to_string(k + 1) + ")");
    }
  }

  const std::size_t m = thresholds.size();
  std::vector<double> q(m + 1);
  q[0] = model.cdf(thresholds[0]);
  for (std::size_t i = 1; i < m; ++i) q[i] = model.band_probability(thresholds[i - 1], thresholds[i]);
  q[m] = model.survival(thresholds[m - 1]);

  for (std::size_t i = 0; i <= m; ++i) {
    if (!(q[i] > 0.0)) {
      throw Error(ErrorCode::DegenerateType, "claim type " + std::to_string(i) + " has zero probability");
    }
  }
  return ClaimTypePartition(std::vector<double>(thresholds.begin(), thresholds.end()), std::move(q));
}

double truncated_mean(const ClaimSeverityModel& model, double d) { return model.truncated_mean(d); }

double band_mean(const ClaimSeverityModel& model, double a, const Limit& b) {
  return model.band_mean(a, b);
}

double max_penalty_f(const ClaimSeverityModel& model, const ClaimTypePartition& partition) {
  double f = model.truncated_mean(partition.threshold(1));
  for (std::size_t i = 1; i < partition.type_count(); ++i) {
    f += partition.threshold(i) * partition.probability(i);
  }
  return f;
}

}  // namespace bms
