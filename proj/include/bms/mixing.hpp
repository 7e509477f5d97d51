#pragma once

#include <variant>

namespace bms {

/// Theta ~ Exp(1): F(theta) = 1 - exp(-theta).
struct ExponentialUnitMixing {};

/// Theta ~ Gamma(shape k, scale 1/k), unit mean, variance 1/k.
struct GammaUnitMeanMixing {
  double shape;
};

/// Theta == 1: a homogeneous portfolio.
struct DiracMixing {};

/// Law of the accident proneness Theta, with P[Theta >= 0] = 1 and E[Theta] = 1.
class MixingDistribution {
 public:
  using Kind = std::variant<ExponentialUnitMixing, GammaUnitMeanMixing, DiracMixing>;

  static MixingDistribution exponential_unit() { return MixingDistribution(ExponentialUnitMixing{}); }
  static MixingDistribution gamma_unit_mean(double shape);
  static MixingDistribution dirac() { return MixingDistribution(DiracMixing{}); }

  /// Quantile function on (0, 1); nondecreasing.
  double quantile(double u) const;
  /// Q(1 - v) for v in (0, 1), accurate when 1 - v would round to 1.
  double upper_quantile(double v) const;
  /// Q(u) given both u and its exact complement v = 1 - u.
  double quantile(double u, double v) const { return u < 0.5 ? quantile(u) : upper_quantile(v); }
  double mean() const noexcept { return 1.0; }
  bool is_point_mass() const noexcept { return std::holds_alternative<DiracMixing>(kind_); }

  const Kind& kind() const noexcept { return kind_; }

 private:
  explicit MixingDistribution(Kind kind) : kind_(kind) {}
  Kind kind_;
};

}  // namespace bms
