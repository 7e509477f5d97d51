#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bms/deductible.hpp"
#include "bms/relativity.hpp"
#include "bms/simulate.hpp"

namespace bms {

/// A rectangular table of preformatted cells with a header row.
struct TextTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write_csv(std::ostream& out) const;
  void write_aligned(std::ostream& out) const;
};

struct FormatOptions {
  /// "%.4f" by default, round-trip "%.17g" when set.
  bool full_precision = false;
};

std::string format_number(double value, const FormatOptions& options);

/// l, pi_l, r_l, lambda r_l E[C], highest level first.
TextTable relativity_table(const SteadyStateProfile& profile, double mean_claim, const FormatOptions& options);

/// Full tariff columns: l, pi, r, premium, alpha, reduced premium, d_0..d_m.
TextTable tariff_table(const SteadyStateProfile& profile, double mean_claim, const DeductibleSchedule& schedule,
                       const FormatOptions& options);

/// Per-level residual and pass/fail for each check.
TextTable validation_table(const ValidationReport& report, const FormatOptions& options);

/// Empirical against analytic per level, with standard errors.
TextTable simulation_table(const SimulationReport& report, const SteadyStateProfile& profile,
                           const FormatOptions& options);

/// Reads a schedule in the tariff_table CSV layout. Rows with alpha = 0 and
/// all deductibles 0 below the malus zone are ignored; the malus entry is taken
/// from `malus_entry`.
DeductibleSchedule read_schedule_csv(std::istream& in, std::size_t malus_entry, std::size_t top_level,
                                     std::size_t types);

}  // namespace bms
