#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bms/deductible.hpp"
#include "bms/mixing.hpp"
#include "bms/relativity.hpp"
#include "bms/scale.hpp"
#include "bms/severity.hpp"
#include "bms/simulate.hpp"

namespace bms {

enum class Principle { Manual, SingleType, ProportionalTop, GreedyTop, Uniform };

std::string_view principle_name(Principle p) noexcept;

struct DeductibleSpec {
  Principle principle = Principle::Manual;
  /// One value for the top-level principles, one per malus level otherwise.
  std::vector<double> alphas;
  /// Manual rows for levels s0..s (empty entry = solve), or a single fixed row
  /// for the uniform principle.
  std::vector<std::vector<std::optional<double>>> deductibles;
};

/// Everything needed to run the pipeline for one tariff. See docs/config.md.
struct TariffConfig {
  double lambda = 0.1;
  double severity_mean = 1.0;
  std::vector<double> thresholds;
  MixingDistribution mixing = MixingDistribution::exponential_unit();
  std::size_t levels = 0;
  std::vector<int> penalties;
  std::optional<DeductibleSpec> deductible;
  std::size_t quadrature_order = kDefaultQuadratureOrder;
  double bisection_tol = kBisectionTol;
  std::optional<SimulationConfig> simulation;
};

/// Parses and checks a JSON tariff document. Throws Error(ConfigError) with
/// the offending key path.
TariffConfig parse_config(const std::string& text, const std::string& origin = "<config>");
TariffConfig load_config(const std::filesystem::path& path);

/// Model objects built from a config.
struct Tariff {
  ClaimSeverityModel model;
  ClaimTypePartition partition;
  ScaleRules rules;
  MixingDistribution mixing;
};

Tariff build_tariff(const TariffConfig& config);

struct Allocation {
  DeductibleSchedule schedule;
  /// Proportionality coefficient and its bound, for proportional_top.
  std::optional<double> coefficient;
  std::optional<double> coefficient_bound;
};

Allocation allocate(const TariffConfig& config, const Tariff& tariff, const SteadyStateProfile& profile);

}  // namespace bms
