#include "bms/report.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <sstream>

#include "bms/errors.hpp"

namespace bms {

namespace {

std::string pass_fail(bool ok) { return ok ? "pass" : "FAIL"; }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos ? "" : cell.substr(first, last - first + 1));
  }
  return cells;
}

double parse_cell(const std::string& cell, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used == cell.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::ConfigError, "schedule line " + std::to_string(line_no) + ": '" + cell + "' is not a number");
}

}  // namespace

void TextTable::write_csv(std::ostream& out) const {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t j = 0; j < cells.size(); ++j) out << (j ? "," : "") << cells[j];
    out << '\n';
  };
  line(header);
  for (const auto& row : rows) line(row);
}

void TextTable::write_aligned(std::ostream& out) const {
  std::vector<std::size_t> width(header.size());
  for (std::size_t j = 0; j < header.size(); ++j) width[j] = header[j].size();
  for (const auto& row : rows)
    for (std::size_t j = 0; j < row.size() && j < width.size(); ++j) width[j] = std::max(width[j], row[j].size());

  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (j) out << "  ";
      out << std::string(width[j] - cells[j].size(), ' ') << cells[j];
    }
    out << '\n';
  };
  line(header);
  for (const auto& row : rows) line(row);
}

std::string format_number(double value, const FormatOptions& options) {
  char buf[64];
  std::snprintf(buf, sizeof buf, options.full_precision ? "%.17g" : "%.4f", value);
  std::string s = buf;
  if (s == "-0.0000") s = "0.0000";
  return s;
}

TextTable relativity_table(const SteadyStateProfile& profile, double mean_claim, const FormatOptions& options) {
  TextTable t{{"l", "pi", "r", "premium"}, {}};
  for (std::size_t l = profile.relativities.size(); l-- > 0;) {
    const double r = profile.relativities[l];
    t.rows.push_back({std::to_string(l), format_number(profile.proportions[l], options), format_number(r, options),
                      format_number(profile.lambda * r * mean_claim, options)});
  }
  return t;
}

TextTable tariff_table(const SteadyStateProfile& profile, double mean_claim, const DeductibleSchedule& schedule,
                       const FormatOptions& options) {
  TextTable t{{"l", "pi", "r", "premium", "alpha", "reduced_premium"}, {}};
  const std::size_t types = schedule.type_count();
  for (std::size_t i = 0; i < types; ++i) t.header.push_back("d_" + std::to_string(i));

  for (std::size_t l = profile.relativities.size(); l-- > 0;) {
    const double r = profile.relativities[l];
    const double premium = profile.lambda * r * mean_claim;
    const double alpha = schedule.alpha(l);
    std::vector<std::string> row{std::to_string(l),
                                 format_number(profile.proportions[l], options),
                                 format_number(r, options),
                                 format_number(premium, options),
                                 format_number(alpha, options),
                                 format_number((1.0 - alpha) * premium, options)};
    for (std::size_t i = 0; i < types; ++i) row.push_back(format_number(schedule.deductible(l, i), options));
    t.rows.push_back(std::move(row));
  }
  return t;
}

TextTable validation_table(const ValidationReport& report, const FormatOptions& options) {
  TextTable t{{"l", "alpha", "expected_deductible", "residual"}, {}};
  const ScheduleCheck checks[] = {ScheduleCheck::AlphaRange,         ScheduleCheck::ReducedPremiumOrder,
                                  ScheduleCheck::DeductibleBounds,   ScheduleCheck::DeductibleTypeOrder,
                                  ScheduleCheck::DeductibleLevelOrder, ScheduleCheck::Indifference,
                                  ScheduleCheck::TopTypeBound,       ScheduleCheck::AlphaOrder};
  for (ScheduleCheck c : checks) t.header.emplace_back(check_name(c));

  FormatOptions residual_format{true};
  for (auto it = report.levels.rbegin(); it != report.levels.rend(); ++it) {
    const LevelValidation& lv = *it;
    char residual[32];
    std::snprintf(residual, sizeof residual, "%.3e", lv.residual);
    t.rows.push_back({std::to_string(lv.level), format_number(lv.alpha, options),
                      format_number(lv.expected_deductible, options),
                      options.full_precision ? format_number(lv.residual, residual_format) : residual,
                      pass_fail(lv.alpha_range), pass_fail(lv.reduced_premium_order),
                      pass_fail(lv.deductible_bounds), pass_fail(lv.deductible_type_order),
                      pass_fail(lv.deductible_level_order), pass_fail(lv.indifference),
                      pass_fail(lv.top_type_bound), pass_fail(lv.alpha_order)});
  }
  return t;
}

TextTable simulation_table(const SimulationReport& report, const SteadyStateProfile& profile,
                           const FormatOptions& options) {
  TextTable t{{"l", "pi", "pi_sim", "pi_se", "r", "theta_sim", "theta_se", "deductible_paid", "deductible_se",
               "policy_years"},
              {}};
  for (std::size_t l = report.empirical_proportions.size(); l-- > 0;) {
    t.rows.push_back({std::to_string(l), format_number(profile.proportions[l], options),
                      format_number(report.empirical_proportions[l], options),
                      format_number(report.proportion_se[l], options), format_number(profile.relativities[l], options),
                      format_number(report.empirical_relativities[l], options),
                      format_number(report.relativity_se[l], options),
                      format_number(report.mean_deductible_paid[l], options),
                      format_number(report.deductible_se[l], options), std::to_string(report.policy_years[l])});
  }
  return t;
}

DeductibleSchedule read_schedule_csv(std::istream& in, std::size_t malus_entry, std::size_t top_level,
                                     std::size_t types) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) header = split_csv_line(line);
  }
  if (header.empty()) throw Error(ErrorCode::ConfigError, "schedule CSV is empty");

  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorCode::ConfigError, "schedule CSV has no '" + name + "' column");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t col_level = column("l");
  const std::size_t col_alpha = column("alpha");
  std::vector<std::size_t> col_d;
  for (std::size_t i = 0; i < types; ++i) col_d.push_back(column("d_" + std::to_string(i)));

  DeductibleSchedule schedule = DeductibleSchedule::zero(malus_entry, top_level, types);
  std::vector<bool> seen(top_level - malus_entry + 1, false);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::ConfigError, "schedule line " + std::to_string(line_no) + " has " +
                                              std::to_string(cells.size()) + " cells, expected " +
                                              std::to_string(header.size()));
    }
    const double level_value = parse_cell(cells[col_level], line_no);
    if (level_value < 0 || level_value != static_cast<double>(static_cast<std::size_t>(level_value)) ||
        level_value > static_cast<double>(top_level)) {
      throw Error(ErrorCode::ConfigError, "schedule line " + std::to_string(line_no) + ": bad level");
    }
    const auto level = static_cast<std::size_t>(level_value);
    const double alpha = parse_cell(cells[col_alpha], line_no);
    std::vector<double> d;
    for (std::size_t c : col_d) d.push_back(parse_cell(cells[c], line_no));

    if (level < malus_entry) {
      const bool empty = alpha == 0.0 && std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; });
      if (!empty) {
        throw Error(ErrorCode::ConfigError, "schedule line " + std::to_string(line_no) + ": level " +
                                                std::to_string(level) + " is below the malus zone but carries a "
                                                "reduction or deductible");
      }
      continue;
    }
    const std::size_t k = level - malus_entry;
    if (seen[k]) throw Error(ErrorCode::ConfigError, "schedule repeats level " + std::to_string(level));
    seen[k] = true;
    schedule.alphas[k] = alpha;
    schedule.deductibles[k] = std::move(d);
  }
  for (std::size_t k = 0; k < seen.size(); ++k) {
    if (!seen[k]) throw Error(ErrorCode::ConfigError, "schedule has no row for level " + std::to_string(malus_entry + k));
  }
  return schedule;
}

}  // namespace bms
