#pragma once

#include <concepts>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace bms {

/// Marker for an unbounded upper band edge (the top claim type).
struct Infinity {
  friend constexpr bool operator==(Infinity, Infinity) noexcept { return true; }
};
inline constexpr Infinity infinity{};

/// Upper limit of a severity band: a finite amount or +infinity.
using Limit = std::variant<double, Infinity>;

inline bool is_infinite(const Limit& b) noexcept { return std::holds_alternative<Infinity>(b); }

/// Exponential claim sizes, F(y) = 1 - exp(-y / mean).
class ExponentialSeverity {
 public:
  explicit ExponentialSeverity(double mean);

  double mean() const noexcept { return mean_; }
  double cdf(double y) const noexcept;
  double survival(double y) const noexcept;
  double truncated_mean(double d) const noexcept;
  double band_probability(double a, const Limit& b) const noexcept;
  double band_mean(double a, const Limit& b) const noexcept;
  double sample_in_band(double a, const Limit& b, double u) const noexcept;

 private:
  double mean_;
};

/// What a severity law has to provide to plug into the rest of the library.
template <class Law>
concept SeverityLaw = requires(const Law& law, double y, const Limit& b) {
  { law.mean() } -> std::convertible_to<double>;
  { law.cdf(y) } -> std::convertible_to<double>;
  { law.survival(y) } -> std::convertible_to<double>;
  { law.truncated_mean(y) } -> std::convertible_to<double>;
  { law.band_probability(y, b) } -> std::convertible_to<double>;
  { law.band_mean(y, b) } -> std::convertible_to<double>;
  { law.sample_in_band(y, b, y) } -> std::convertible_to<double>;
};

static_assert(SeverityLaw<ExponentialSeverity>);

/// Claim-size distribution C. Continuous, C >= 0, finite mean.
///
/// New laws are added as further alternatives of the variant; each must model
/// SeverityLaw.
class ClaimSeverityModel {
 public:
  using Law = std::variant<ExponentialSeverity>;

  static ClaimSeverityModel exponential(double mean);

  double mean() const;
  double cdf(double y) const;
  double survival(double y) const;

  /// E[C 1{C <= d}]. Accepts d = +inf.
  double truncated_mean(double d) const;

  /// P[a < C <= b].
  double band_probability(double a, const Limit& b) const;

  /// E[C | a < C <= b].
  double band_mean(double a, const Limit& b) const;

  /// Inverse-CDF draw of C conditional on a < C <= b, for u in [0, 1).
  double sample_in_band(double a, const Limit& b, double u) const;

  const Law& law() const noexcept { return law_; }

 private:
  explicit ClaimSeverityModel(Law law) : law_(std::move(law)) {}
  Law law_;
};

/// Claim types 0..m defined by thresholds c_1 < ... < c_m; type 0 is
/// C <= c_1, type i is (c_i, c_{i+1}], type m is C > c_m.
class ClaimTypePartition {
 public:
  std::size_t threshold_count() const noexcept { return thresholds_.size(); }
  std::size_t type_count() const noexcept { return probabilities_.size(); }

  std::span<const double> thresholds() const noexcept { return thresholds_; }
  std::span<const double> probabilities() const noexcept { return probabilities_; }

  /// c_k for k = 1..m (one-based, as thresholds are usually written).
  double threshold(std::size_t k) const { return thresholds_.at(k - 1); }
  double probability(std::size_t type) const { return probabilities_.at(type); }

  double lower_edge(std::size_t type) const;
  Limit upper_edge(std::size_t type) const;

  /// Largest deductible a claim of this type may carry: c_1 for types 0 and
  /// 1, c_i for type i >= 2.
  double deductible_cap(std::size_t type) const;

 private:
  friend ClaimTypePartition type_probabilities(const ClaimSeverityModel&, std::span<const double>);
  ClaimTypePartition(std::vector<double> thresholds, std::vector<double> probabilities)
      : thresholds_(std::move(thresholds)), probabilities_(std::move(probabilities)) {}

  std::vector<double> thresholds_;
  std::vector<double> probabilities_;
};

/// Type probabilities q_0..q_m from the severity CDF.
ClaimTypePartition type_probabilities(const ClaimSeverityModel& model,
                                      std::span<const double> thresholds);

double truncated_mean(const ClaimSeverityModel& model, double d);

double band_mean(const ClaimSeverityModel& model, double a, const Limit& b);

/// f(c_1, ..., c_m) = E[C | C <= c_1] q_0 + c_1 q_1 + ... + c_m q_m, the largest
/// expected per-claim deductible any admissible schedule can collect.
double max_penalty_f(const ClaimSeverityModel& model, const ClaimTypePartition& partition);

}  // namespace bms
