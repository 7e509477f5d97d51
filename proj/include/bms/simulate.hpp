#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "bms/deductible.hpp"
#include "bms/mixing.hpp"
#include "bms/scale.hpp"
#include "bms/severity.hpp"

namespace bms {

struct SimulationConfig {
  std::size_t n_policies = 100000;
  std::size_t burn_in_years = 200;
  std::size_t sample_years = 100;
  std::uint64_t seed = 20170628;
  std::size_t initial_level = 0;
  /// 0 uses std::thread::hardware_concurrency(). Results do not depend on it.
  unsigned threads = 0;
};

/// Portfolio statistics over the sampled years. Standard errors treat
/// policies as the independent units; ratio statistics use the delta method.
struct SimulationReport {
  std::vector<double> empirical_proportions;
  std::vector<double> proportion_se;
  /// Mean theta of the policy-years spent at each level.
  std::vector<double> empirical_relativities;
  std::vector<double> relativity_se;
  /// Deductible paid per policy-year at each level; zero outside the malus
  /// zone or without a schedule.
  std::vector<double> mean_deductible_paid;
  std::vector<double> deductible_se;
  std::vector<std::uint64_t> policy_years;
};

SimulationReport simulate_portfolio(const SimulationConfig& config, double lambda, const ScaleRules& rules,
                                    const ClaimTypePartition& partition, const ClaimSeverityModel& model,
                                    const MixingDistribution& mixing,
                                    const std::optional<DeductibleSchedule>& schedule = std::nullopt);

}  // namespace bms
