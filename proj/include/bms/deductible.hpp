#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bms/severity.hpp"

namespace bms {

inline constexpr double kBisectionTol = 1e-12;
inline constexpr double kResidualTol = 1e-9;

/// Premium reductions alpha_l and per-claim deductibles d_{l,i} for the malus
/// levels s0..s. Rows are indexed by level - s0.
struct DeductibleSchedule {
  std::size_t malus_entry = 0;
  std::size_t top_level = 0;
  std::vector<double> alphas;
  std::vector<std::vector<double>> deductibles;

  static DeductibleSchedule zero(std::size_t malus_entry, std::size_t top_level, std::size_t types);

  std::size_t type_count() const noexcept { return deductibles.empty() ? 0 : deductibles.front().size(); }
  bool in_malus_zone(std::size_t level) const noexcept { return level >= malus_entry && level <= top_level; }

  /// Zero outside the malus zone.
  double alpha(std::size_t level) const;
  double deductible(std::size_t level, std::size_t type) const;
};

/// Expected deductible collected per claim:
/// E[C 1{C <= d_0}] + d_0 (q_0 - F(d_0)) + d_1 q_1 + ... + d_m q_m.
/// Throws Assumption2Violation unless 0 <= d_i <= cap_i and d is nondecreasing.
double indifference_rhs(const ClaimSeverityModel& model, const ClaimTypePartition& partition,
                        std::span<const double> d);

/// Largest admissible alpha at `level`: min{1 - 1/r_l, f/E[C]}, or for the
/// top-level-only scheme min{1 - r_{s-1}/r_s, f/E[C]}.
double alpha_upper_bound(std::size_t level, std::span<const double> relativities, const ClaimSeverityModel& model,
                         const ClaimTypePartition& partition, bool top_only);

enum class ScheduleCheck {
  MalusEntry,
  AlphaRange,
  ReducedPremiumOrder,
  DeductibleBounds,
  DeductibleTypeOrder,
  DeductibleLevelOrder,
  Indifference,
  TopTypeBound,
  AlphaOrder,
};

std::string_view check_name(ScheduleCheck check) noexcept;

/// True for the checks that constrain the deductible matrix itself.
bool is_deductible_check(ScheduleCheck check) noexcept;

struct ScheduleFailure {
  ScheduleCheck check;
  std::size_t level;
  std::optional<std::size_t> type;
  std::string detail;
};

struct LevelValidation {
  std::size_t level = 0;
  double alpha = 0.0;
  double expected_deductible = 0.0;
  /// alpha_l E[C] minus the expected deductible per claim.
  double residual = 0.0;
  bool alpha_range = true;
  bool reduced_premium_order = true;
  bool deductible_bounds = true;
  bool deductible_type_order = true;
  bool deductible_level_order = true;
  bool indifference = true;
  bool top_type_bound = true;
  bool alpha_order = true;
};

struct ValidationReport {
  std::vector<LevelValidation> levels;
  std::vector<ScheduleFailure> failures;

  bool ok() const noexcept { return failures.empty(); }
  bool failed(ScheduleCheck check) const noexcept;
};

ValidationReport validate_schedule(const DeductibleSchedule& schedule, std::span<const double> relativities,
                                   const ClaimSeverityModel& model, const ClaimTypePartition& partition,
                                   double residual_tol = kResidualTol);

/// Deductibles on the top claim type only: d_{l,m} = alpha_l E[C] / q_m.
/// `alphas` covers levels s0..s.
DeductibleSchedule allocate_single_type(std::span<const double> alphas, std::span<const double> relativities,
                                        const ClaimSeverityModel& model, const ClaimTypePartition& partition);

struct ProportionalAllocation {
  double coefficient;        ///< x
  double coefficient_bound;  ///< x0
  DeductibleSchedule schedule;
};

/// x0 = min_i c_i / E[C | type i] over types 1..m.
double proportional_coefficient_bound(const ClaimSeverityModel& model, const ClaimTypePartition& partition);

/// Expected deductible per claim when d_i = x E[C | type i].
double proportional_rhs(double x, const ClaimSeverityModel& model, const ClaimTypePartition& partition);

/// Top-level deductibles proportional to the mean claim of each type, with x
/// solved by bisection on [0, x0].
ProportionalAllocation allocate_proportional_top(double alpha_top, std::span<const double> relativities,
                                                 const ClaimSeverityModel& model, const ClaimTypePartition& partition,
                                                 double tol = kBisectionTol);

/// Top-level deductibles saturating the largest claim types first.
DeductibleSchedule allocate_greedy_top(double alpha_top, std::span<const double> relativities,
                                       const ClaimSeverityModel& model, const ClaimTypePartition& partition,
                                       double tol = kBisectionTol);

/// The same alpha and deductible row at every malus level. Uses the largest
/// alpha the entry level allows; when that is the reduced-premium limit, the
/// row is `manual_d` if given, otherwise a proportional row (greedy when the
/// proportional one cannot reach the budget).
DeductibleSchedule uniform_schedule(std::span<const double> relativities, const ClaimSeverityModel& model,
                                    const ClaimTypePartition& partition,
                                    const std::optional<std::vector<double>>& manual_d = std::nullopt,
                                    double tol = kBisectionTol);

/// One malus level of a hand-built schedule. At most one deductible may be
/// left empty; it is solved so the level is premium-neutral.
struct ManualLevel {
  double alpha = 0.0;
  std::vector<std::optional<double>> deductibles;
};

/// `levels` covers s0..s in order.
DeductibleSchedule allocate_manual(std::span<const ManualLevel> levels, std::span<const double> relativities,
                                   const ClaimSeverityModel& model, const ClaimTypePartition& partition,
                                   double tol = kBisectionTol);

}  // namespace bms
