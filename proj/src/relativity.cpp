#include "bms/relativity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bms/errors.hpp"
#include "bms/quadrature.hpp"

namespace bms {

namespace {

void require_finite(double v, double theta) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::NonFiniteIntegrand, "integrand is not finite at theta = " + std::to_string(theta));
  }
}

std::vector<double> conditional_stationary(const ScaleRules& rules, const ClaimTypePartition& partition,
                                           double frequency) {
  if (frequency == 0.0) {
    // Limit of a vanishing claim rate: everyone drifts to level 0.
    std::vector<double> pi(rules.levels(), 0.0);
    pi[0] = 1.0;
    return pi;
  }
  return stationary_distribution(build_transition_matrix(rules, frequency, partition));
}

struct Moments {
  std::vector<double> mass;      // integral of pi_l(lambda theta)
  std::vector<double> weighted;  // integral of theta pi_l(lambda theta)
};

Moments integrate_profile(double lambda, const ScaleRules& rules, const ClaimTypePartition& partition,
                          const MixingDistribution& mixing, std::size_t order) {
  const std::size_t n = rules.levels();
  Moments out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  if (mixing.is_point_mass()) {
    out.mass = conditional_stationary(rules, partition, lambda);
    out.weighted = out.mass;
    return out;
  }
  const QuadratureRule rule = graded_unit_rule(order);
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double theta = mixing.quantile(rule.nodes[k], rule.complements[k]);
    require_finite(theta, theta);
    const std::vector<double> pi = conditional_stationary(rules, partition, lambda * theta);
    const double w = rule.weights[k];
    for (std::size_t l = 0; l < n; ++l) {
      out.mass[l] += w * pi[l];
      out.weighted[l] += w * theta * pi[l];
    }
  }
  return out;
}

SteadyStateProfile profile_from(double lambda, const Moments& m) {
  SteadyStateProfile profile;
  profile.lambda = lambda;
  profile.proportions = m.mass;
  profile.relativities.resize(m.mass.size());
  for (std::size_t l = 0; l < m.mass.size(); ++l) {
    if (!(m.mass[l] > 0.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "level " + std::to_string(l) + " has no steady-state mass; relativity undefined");
    }
    profile.relativities[l] = m.weighted[l] / m.mass[l];
  }
  const auto it = std::find_if(profile.relativities.begin(), profile.relativities.end(),
                               [](double r) { return r > 1.0; });
  if (it != profile.relativities.end()) {
    profile.malus_entry = static_cast<std::size_t>(it - profile.relativities.begin());
  }
  return profile;
}

}  // namespace

double mix_integral(const std::function<double(double)>& g, const MixingDistribution& mixing,
                    std::size_t order) {
  if (mixing.is_point_mass()) {
    const double v = g(1.0);
    require_finite(v, 1.0);
    return v;
  }
  const QuadratureRule rule = graded_unit_rule(order);
  double sum = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double theta = mixing.quantile(rule.nodes[k], rule.complements[k]);
    const double v = g(theta);
    require_finite(v, theta);
    sum += rule.weights[k] * v;
  }
  return sum;
}

SteadyStateProfile steady_state_profile(double lambda, const ScaleRules& rules,
                                        const ClaimTypePartition& partition,
                                        const MixingDistribution& mixing, const ProfileOptions& options) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidArgument, "a priori frequency lambda must be positive");
  }
  // The support pattern is the same for every theta > 0.
  if (!regularity_index(build_transition_matrix(rules, lambda, partition))) {
    throw Error(ErrorCode::NotRegular, "scale rules do not yield a regular chain");
  }

  SteadyStateProfile profile =
      profile_from(lambda, integrate_profile(lambda, rules, partition, mixing, options.order));

  if (options.check_convergence && !mixing.is_point_mass()) {
    const SteadyStateProfile refined =
        profile_from(lambda, integrate_profile(lambda, rules, partition, mixing, 2 * options.order));
    double worst = 0.0;
    for (std::size_t l = 0; l < profile.proportions.size(); ++l) {
      worst = std::max(worst, std::abs(profile.proportions[l] - refined.proportions[l]));
      worst = std::max(worst, std::abs(profile.relativities[l] - refined.relativities[l]));
    }
    if (worst > options.convergence_tol) {
      throw Error(ErrorCode::QuadratureDivergence,
                  "doubling the quadrature order moved the profile by " + std::to_string(worst));
    }
  }
  return profile;
}

std::size_t malus_entry_level(std::span<const double> relativities) {
  if (relativities.empty()) throw Error(ErrorCode::InvalidArgument, "relativity vector is empty");
  for (std::size_t l = 0; l < relativities.size(); ++l) {
    if (relativities[l] > 1.0) return l;
  }
  throw Error(ErrorCode::NoMalusZone, "no level has a relativity above 1");
}

}  // namespace bms
