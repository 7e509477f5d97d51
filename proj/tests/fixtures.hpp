#pragma once

#include <vector>

#include "bms/mixing.hpp"
#include "bms/relativity.hpp"
#include "bms/scale.hpp"
#include "bms/severity.hpp"

namespace fixture {

// Lambda 0.1, exponential claims with mean 2, four levels with penalties
// (1, 2, 3, 3); thresholds (1, 2, 4) or the finer (0.3, 1.2, 2.8).
struct Tariff {
  double lambda = 0.1;
  bms::ClaimSeverityModel model = bms::ClaimSeverityModel::exponential(2.0);
  bms::ClaimTypePartition partition;
  bms::ScaleRules rules{4, {1, 2, 3, 3}};
  bms::MixingDistribution mixing = bms::MixingDistribution::exponential_unit();
  bms::SteadyStateProfile profile;

  explicit Tariff(std::vector<double> thresholds)
      : partition(bms::type_probabilities(model, thresholds)),
        profile(bms::steady_state_profile(lambda, rules, partition, mixing)) {}
};

inline const Tariff& coarse() {
  static const Tariff t({1.0, 2.0, 4.0});
  return t;
}

inline const Tariff& fine() {
  static const Tariff t({0.3, 1.2, 2.8});
  return t;
}

}  // namespace fixture
