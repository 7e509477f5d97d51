#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "bms/mixing.hpp"
#include "bms/scale.hpp"
#include "bms/severity.hpp"

namespace bms {

inline constexpr std::size_t kDefaultQuadratureOrder = 256;

/// Integral of g against the mixing law, computed as the integral of g(Q(u))
/// over (0, 1) with graded_unit_rule(order). A point-mass law returns g(1).
double mix_integral(const std::function<double(double)>& g, const MixingDistribution& mixing,
                    std::size_t order = kDefaultQuadratureOrder);

/// Steady-state level occupancy and quadratic-loss relativities.
struct SteadyStateProfile {
  double lambda = 0.0;
  std::vector<double> proportions;
  std::vector<double> relativities;
  /// First level whose relativity exceeds 1; empty when there is no malus zone.
  std::optional<std::size_t> malus_entry;
};

struct ProfileOptions {
  std::size_t order = kDefaultQuadratureOrder;
  /// Recompute at twice the order and fail if any output moves by more than
  /// this much.
  bool check_convergence = true;
  double convergence_tol = 1e-6;
};

SteadyStateProfile steady_state_profile(double lambda, const ScaleRules& rules,
                                        const ClaimTypePartition& partition,
                                        const MixingDistribution& mixing, const ProfileOptions& options = {});

/// s0 = min{l : r_l > 1}; throws NoMalusZone if every r_l <= 1.
std::size_t malus_entry_level(std::span<const double> relativities);

}  // namespace bms
