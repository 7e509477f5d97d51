#include "bms/deductible.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bms/errors.hpp"
#include "bms/relativity.hpp"
#include "bms/roots.hpp"

namespace bms {

namespace {

// Slack for comparisons against caps and closed bounds that are hit exactly
// up to rounding.
constexpr double kSlack = 1e-12;

double slack(double v) { return kSlack * std::max(1.0, std::abs(v)); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

double rhs_unchecked(const ClaimSeverityModel& model, const ClaimTypePartition& partition,
                     std::span<const double> d) {
  const double d0 = std::clamp(d[0], 0.0, partition.threshold(1));
  double total = model.truncated_mean(d0) + d0 * (partition.probability(0) - model.cdf(d0));
  for (std::size_t i = 1; i < d.size(); ++i) total += d[i] * partition.probability(i);
  return total;
}

void require_types(const ClaimTypePartition& partition, std::size_t size) {
  if (size != partition.type_count()) {
    throw Error(ErrorCode::InvalidArgument, "deductible vector has " + std::to_string(size) + " entries, expected " +
                                                std::to_string(partition.type_count()));
  }
}

std::vector<double> deductible_caps(const ClaimTypePartition& partition) {
  std::vector<double> caps(partition.type_count());
  for (std::size_t i = 0; i < caps.size(); ++i) caps[i] = partition.deductible_cap(i);
  return caps;
}

// Solves E[C 1{C <= d}] + d (q_0 - F(d)) = budget for d in [0, c_1].
double solve_type0(double budget, const ClaimSeverityModel& model, const ClaimTypePartition& partition, double tol) {
  const double c1 = partition.threshold(1);
  const double q0 = partition.probability(0);
  auto g = [&](double d) { return model.truncated_mean(d) + d * (q0 - model.cdf(d)); };
  if (budget <= 0.0) return 0.0;
  if (budget > g(c1) + slack(budget)) {
    throw Error(ErrorCode::AlphaOutOfRange, "budget exceeds what type-0 deductibles can collect");
  }
  return std::min(bisect_increasing(g, budget, 0.0, c1, tol).mid(), c1);
}

// Fills the row from the largest claim type downward until `budget` is spent.
std::vector<double> greedy_row(double budget, const ClaimSeverityModel& model, const ClaimTypePartition& partition,
                               double tol) {
  const std::size_t types = partition.type_count();
  std::vector<double> d(types, 0.0);
  double remaining = budget;
  for (std::size_t k = types - 1; k >= 1; --k) {
    if (remaining <= 0.0) return d;
    const double cap = partition.deductible_cap(k);
    const double q = partition.probability(k);
    if (remaining <= cap * q) {
      d[k] = std::min(remaining / q, cap);
      return d;
    }
    d[k] = cap;
    remaining -= cap * q;
  }
  d[0] = solve_type0(remaining, model, partition, tol);
  return d;
}

std::vector<double> band_means(const ClaimSeverityModel& model, const ClaimTypePartition& partition) {
  std::vector<double> means(partition.type_count());
  for (std::size_t i = 0; i < means.size(); ++i) {
    means[i] = model.band_mean(partition.lower_edge(i), partition.upper_edge(i));
  }
  return means;
}

std::vector<double> scaled(std::span<const double> v, double x) {
  std::vector<double> out(v.begin(), v.end());
  for (double& e : out) e *= x;
  return out;
}

void require_valid(const DeductibleSchedule& schedule, std::span<const double> relativities,
                   const ClaimSeverityModel& model, const ClaimTypePartition& partition) {
  const ValidationReport report = validate_schedule(schedule, relativities, model, partition);
  if (!report.ok()) {
    const ScheduleFailure& f = report.failures.front();
    throw Error(ErrorCode::ScheduleInvalid, "synthesized schedule fails " + std::string(check_name(f.check)) +
                                                " at level " + std::to_string(f.level) + ": " + f.detail);
  }
}

void require_alpha(double alpha, double bound, bool strict, std::size_t level) {
  const bool ok = alpha >= 0.0 && (strict ? alpha < bound : alpha <= bound + slack(bound));
  if (!ok) {
    throw Error(ErrorCode::AlphaOutOfRange, "alpha " + fmt(alpha) + " at level " + std::to_string(level) +
                                                (strict ? " must be below " : " exceeds the bound ") + fmt(bound));
  }
}

}  // namespace

DeductibleSchedule DeductibleSchedule::zero(std::size_t malus_entry, std::size_t top_level, std::size_t types) {
  if (malus_entry > top_level) throw Error(ErrorCode::InvalidArgument, "malus entry above the top level");
  const std::size_t rows = top_level - malus_entry + 1;
  return DeductibleSchedule{malus_entry, top_level, std::vector<double>(rows, 0.0),
                            std::vector<std::vector<double>>(rows, std::vector<double>(types, 0.0))};
}

double DeductibleSchedule::alpha(std::size_t level) const {
  return in_malus_zone(level) ? alphas.at(level - malus_entry) : 0.0;
}

double DeductibleSchedule::deductible(std::size_t level, std::size_t type) const {
  return in_malus_zone(level) ? deductibles.at(level - malus_entry).at(type) : 0.0;
}

double indifference_rhs(const ClaimSeverityModel& model, const ClaimTypePartition& partition,
                        std::span<const double> d) {
  require_types(partition, d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double cap = partition.deductible_cap(i);
    if (!(d[i] >= 0.0) || d[i] > cap + slack(cap)) {
      throw Error(ErrorCode::Assumption2Violation,
                  "deductible for type " + std::to_string(i) + " is " + fmt(d[i]) + ", outside [0, " + fmt(cap) + "]");
    }
    if (i > 0 && d[i] < d[i - 1] - slack(d[i - 1])) {
      throw Error(ErrorCode::Assumption2Violation,
                  "deductible for type " + std::to_string(i) + " is below the one for type " + std::to_string(i - 1));
    }
  }
  return rhs_unchecked(model, partition, d);
}

double alpha_upper_bound(std::size_t level, std::span<const double> relativities, const ClaimSeverityModel& model,
                         const ClaimTypePartition& partition, bool top_only) {
  const std::size_t s0 = malus_entry_level(relativities);
  const std::size_t top = relativities.size() - 1;
  if (level < s0 || level > top) {
    throw Error(ErrorCode::NotInMalusZone, "level " + std::to_string(level) + " is outside the malus zone");
  }
  const double deductible_limit = max_penalty_f(model, partition) / model.mean();
  if (top_only) {
    if (level != top) throw Error(ErrorCode::InvalidArgument, "top-level-only bound applies to the top level");
    const double below = top == 0 ? 1.0 : relativities[top - 1];
    return std::min(1.0 - below / relativities[top], deductible_limit);
  }
  return std::min(1.0 - 1.0 / relativities[level], deductible_limit);
}

std::string_view check_name(ScheduleCheck check) noexcept {
  switch (check) {
    case ScheduleCheck::MalusEntry: return "malus-entry";
    case ScheduleCheck::AlphaRange: return "alpha-range";
    case ScheduleCheck::ReducedPremiumOrder: return "reduced-premium-order";
    case ScheduleCheck::DeductibleBounds: return "deductible-bounds";
    case ScheduleCheck::DeductibleTypeOrder: return "deductible-order-by-type";
    case ScheduleCheck::DeductibleLevelOrder: return "deductible-order-by-level";
    case ScheduleCheck::Indifference: return "indifference";
    case ScheduleCheck::TopTypeBound: return "top-type-bound";
    case ScheduleCheck::AlphaOrder: return "alpha-order";
  }
  return "unknown";
}

bool is_deductible_check(ScheduleCheck check) noexcept {
  return check == ScheduleCheck::DeductibleBounds || check == ScheduleCheck::DeductibleTypeOrder ||
         check == ScheduleCheck::DeductibleLevelOrder;
}

bool ValidationReport::failed(ScheduleCheck check) const noexcept {
  return std::any_of(failures.begin(), failures.end(), [check](const ScheduleFailure& f) { return f.check == check; });
}

ValidationReport validate_schedule(const DeductibleSchedule& schedule, std::span<const double> relativities,
                                   const ClaimSeverityModel& model, const ClaimTypePartition& partition,
                                   double residual_tol) {
  if (relativities.empty() || schedule.top_level != relativities.size() - 1) {
    throw Error(ErrorCode::InvalidArgument, "schedule top level does not match the relativity vector");
  }
  const std::size_t rows = schedule.alphas.size();
  if (rows != schedule.top_level - schedule.malus_entry + 1 || schedule.deductibles.size() != rows) {
    throw Error(ErrorCode::InvalidArgument, "schedule rows do not cover the malus levels");
  }
  for (const auto& row : schedule.deductibles) require_types(partition, row.size());

  ValidationReport report;
  auto fail = [&](ScheduleCheck check, std::size_t level, std::optional<std::size_t> type, std::string detail) {
    report.failures.push_back({check, level, type, std::move(detail)});
  };

  const std::size_t s0 = schedule.malus_entry;
  const auto expected_s0 = std::find_if(relativities.begin(), relativities.end(), [](double r) { return r > 1.0; });
  if (expected_s0 == relativities.end() || static_cast<std::size_t>(expected_s0 - relativities.begin()) != s0) {
    fail(ScheduleCheck::MalusEntry, s0, std::nullopt, "schedule starts at level " + std::to_string(s0) +
                                                          " but the first relativity above 1 is elsewhere");
  }

  const double mean = model.mean();
  const std::size_t m = partition.type_count() - 1;
  const double qm = partition.probability(m);
  const double cm = partition.threshold(m);

  for (std::size_t k = 0; k < rows; ++k) {
    const std::size_t level = s0 + k;
    const double alpha = schedule.alphas[k];
    const auto& d = schedule.deductibles[k];
    LevelValidation lv;
    lv.level = level;
    lv.alpha = alpha;

    if (!(alpha >= 0.0 && alpha < 1.0)) {
      lv.alpha_range = false;
      fail(ScheduleCheck::AlphaRange, level, std::nullopt, "alpha " + fmt(alpha) + " outside [0, 1)");
    }

    const double reduced = (1.0 - alpha) * relativities[level];
    const double floor = k == 0 ? 1.0 : (1.0 - schedule.alphas[k - 1]) * relativities[level - 1];
    if (reduced < floor - slack(floor)) {
      lv.reduced_premium_order = false;
      fail(ScheduleCheck::ReducedPremiumOrder, level, std::nullopt,
           "(1 - alpha) r = " + fmt(reduced) + " is below " + fmt(floor));
    }

    for (std::size_t i = 0; i <= m; ++i) {
      const double cap = partition.deductible_cap(i);
      if (!(d[i] >= 0.0) || d[i] > cap + slack(cap)) {
        lv.deductible_bounds = false;
        fail(ScheduleCheck::DeductibleBounds, level, i, "d = " + fmt(d[i]) + " outside [0, " + fmt(cap) + "]");
      }
      if (i > 0 && d[i] < d[i - 1] - slack(d[i - 1])) {
        lv.deductible_type_order = false;
        fail(ScheduleCheck::DeductibleTypeOrder, level, i,
             "d = " + fmt(d[i]) + " is below " + fmt(d[i - 1]) + " for type " + std::to_string(i - 1));
      }
      if (k > 0 && d[i] < schedule.deductibles[k - 1][i] - slack(schedule.deductibles[k - 1][i])) {
        lv.deductible_level_order = false;
        fail(ScheduleCheck::DeductibleLevelOrder, level, i,
             "d = " + fmt(d[i]) + " is below " + fmt(schedule.deductibles[k - 1][i]) + " at level " +
                 std::to_string(level - 1));
      }
    }

    lv.expected_deductible = rhs_unchecked(model, partition, d);
    lv.residual = alpha * mean - lv.expected_deductible;
    if (!(std::abs(lv.residual) <= residual_tol)) {
      lv.indifference = false;
      fail(ScheduleCheck::Indifference, level, std::nullopt,
           "alpha E[C] = " + fmt(alpha * mean) + " but expected deductible is " + fmt(lv.expected_deductible));
    }

    if (d[m] * qm > alpha * mean + residual_tol || d[m] > cm + slack(cm)) {
      lv.top_type_bound = false;
      fail(ScheduleCheck::TopTypeBound, level, m,
           "d = " + fmt(d[m]) + " exceeds min{alpha E[C] / q_m, c_m} = " + fmt(std::min(alpha * mean / qm, cm)));
    }

    if (k > 0 && alpha < schedule.alphas[k - 1]) {
      lv.alpha_order = false;
      fail(ScheduleCheck::AlphaOrder, level, std::nullopt,
           "alpha " + fmt(alpha) + " is below " + fmt(schedule.alphas[k - 1]) + " at the level beneath");
    }
    report.levels.push_back(lv);
  }
  return report;
}

DeductibleSchedule allocate_single_type(std::span<const double> alphas, std::span<const double> relativities,
                                        const ClaimSeverityModel& model, const ClaimTypePartition& partition) {
  const std::size_t s0 = malus_entry_level(relativities);
  const std::size_t top = relativities.size() - 1;
  if (alphas.size() != top - s0 + 1) {
    throw Error(ErrorCode::InvalidArgument, "expected " + std::to_string(top - s0 + 1) + " alphas for levels " +
                                                std::to_string(s0) + ".." + std::to_string(top));
  }
  const std::size_t m = partition.type_count() - 1;
  const double mean = model.mean();
  const double qm = partition.probability(m);
  const double cm = partition.threshold(m);

  DeductibleSchedule schedule = DeductibleSchedule::zero(s0, top, partition.type_count());
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    const std::size_t level = s0 + k;
    require_alpha(alphas[k], std::min(1.0 - 1.0 / relativities[level], cm * qm / mean), false, level);
    if (k > 0 && alphas[k] < alphas[k - 1]) {
      throw Error(ErrorCode::MonotonicityViolation, "alphas must be nondecreasing across malus levels");
    }
    schedule.alphas[k] = alphas[k];
    schedule.deductibles[k][m] = std::min(alphas[k] * mean / qm, cm);
  }
  require_valid(schedule, relativities, model, partition);
  return schedule;
}

double proportional_coefficient_bound(const ClaimSeverityModel& model, const ClaimTypePartition& partition) {
  const std::vector<double> means = band_means(model, partition);
  double x0 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < means.size(); ++i) x0 = std::min(x0, partition.deductible_cap(i) / means[i]);
  return x0;
}

double proportional_rhs(double x, const ClaimSeverityModel& model, const ClaimTypePartition& partition) {
  const std::vector<double> means = band_means(model, partition);
  return rhs_unchecked(model, partition, scaled(means, x));
}

ProportionalAllocation allocate_proportional_top(double alpha_top, std::span<const double> relativities,
                                                 const ClaimSeverityModel& model, const ClaimTypePartition& partition,
                                                 double tol) {
  const std::size_t s0 = malus_entry_level(relativities);
  const std::size_t top = relativities.size() - 1;
  require_alpha(alpha_top, alpha_upper_bound(top, relativities, model, partition, true), true, top);

  const std::vector<double> means = band_means(model, partition);
  const double x0 = proportional_coefficient_bound(model, partition);
  const double target = alpha_top * model.mean();
  auto rhs = [&](double x) { return rhs_unchecked(model, partition, scaled(means, x)); };
  if (target > rhs(x0)) {
    throw Error(ErrorCode::InfeasibleProportional,
                "alpha " + fmt(alpha_top) + " needs more than proportional deductibles can collect (x0 = " +
                    fmt(x0) + ")");
  }
  const double x = std::min(bisect_increasing(rhs, target, 0.0, x0, tol).mid(), x0);

  DeductibleSchedule schedule = DeductibleSchedule::zero(s0, top, partition.type_count());
  schedule.alphas.back() = alpha_top;
  schedule.deductibles.back() = scaled(means, x);
  // Keep the rounding at x ~ x0 inside the caps.
  for (std::size_t i = 0; i < means.size(); ++i) {
    schedule.deductibles.back()[i] = std::min(schedule.deductibles.back()[i], partition.deductible_cap(i));
  }
  require_valid(schedule, relativities, model, partition);
  return {x, x0, std::move(schedule)};
}

DeductibleSchedule allocate_greedy_top(double alpha_top, std::span<const double> relativities,
                                       const ClaimSeverityModel& model, const ClaimTypePartition& partition,
                                       double tol) {
  const std::size_t s0 = malus_entry_level(relativities);
  const std::size_t top = relativities.size() - 1;
  require_alpha(alpha_top, alpha_upper_bound(top, relativities, model, partition, true), false, top);

  DeductibleSchedule schedule = DeductibleSchedule::zero(s0, top, partition.type_count());
  schedule.alphas.back() = alpha_top;
  schedule.deductibles.back() = greedy_row(alpha_top * model.mean(), model, partition, tol);
  require_valid(schedule, relativities, model, partition);
  return schedule;
}

DeductibleSchedule uniform_schedule(std::span<const double> relativities, const ClaimSeverityModel& model,
                                    const ClaimTypePartition& partition,
                                    const std::optional<std::vector<double>>& manual_d, double tol) {
  const std::size_t s0 = malus_entry_level(relativities);
  const std::size_t top = relativities.size() - 1;
  const double mean = model.mean();
  const double deductible_limit = max_penalty_f(model, partition) / mean;
  const double premium_limit = 1.0 - 1.0 / relativities[s0];

  double alpha = 0.0;
  std::vector<double> row;
  if (deductible_limit <= premium_limit) {
    // Only the maximal deductibles collect f.
    alpha = deductible_limit;
    row = deductible_caps(partition);
  } else {
    alpha = premium_limit;
    const double target = alpha * mean;
    if (manual_d) {
      const double got = indifference_rhs(model, partition, *manual_d);
      if (std::abs(got - target) > kResidualTol) {
        throw Error(ErrorCode::ManualDInconsistent, "supplied deductibles collect " + fmt(got) + ", need " +
                                                        fmt(target));
      }
      row = *manual_d;
    } else {
      const std::vector<double> means = band_means(model, partition);
      const double x0 = proportional_coefficient_bound(model, partition);
      auto rhs = [&](double x) { return rhs_unchecked(model, partition, scaled(means, x)); };
      if (target <= rhs(x0)) {
        row = scaled(means, std::min(bisect_increasing(rhs, target, 0.0, x0, tol).mid(), x0));
      } else {
        row = greedy_row(target, model, partition, tol);
      }
    }
  }

  DeductibleSchedule schedule = DeductibleSchedule::zero(s0, top, partition.type_count());
  std::fill(schedule.alphas.begin(), schedule.alphas.end(), alpha);
  std::fill(schedule.deductibles.begin(), schedule.deductibles.end(), row);
  require_valid(schedule, relativities, model, partition);
  return schedule;
}

DeductibleSchedule allocate_manual(std::span<const ManualLevel> levels, std::span<const double> relativities,
                                   const ClaimSeverityModel& model, const ClaimTypePartition& partition, double tol) {
  const std::size_t s0 = malus_entry_level(relativities);
  const std::size_t top = relativities.size() - 1;
  if (levels.size() != top - s0 + 1) {
    throw Error(ErrorCode::InvalidArgument, "expected " + std::to_string(top - s0 + 1) +
                                                " manual levels for the malus zone, got " +
                                                std::to_string(levels.size()));
  }
  const double mean = model.mean();

  DeductibleSchedule schedule = DeductibleSchedule::zero(s0, top, partition.type_count());
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const std::size_t level = s0 + k;
    const ManualLevel& spec = levels[k];
    require_types(partition, spec.deductibles.size());

    std::optional<std::size_t> free;
    std::vector<double> d(spec.deductibles.size(), 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (spec.deductibles[i]) {
        d[i] = *spec.deductibles[i];
      } else if (free) {
        throw Error(ErrorCode::InvalidArgument, "level " + std::to_string(level) + " leaves more than one deductible free");
      } else {
        free = i;
      }
    }

    const double target = spec.alpha * mean;
    if (free) {
      const std::size_t i = *free;
      const double cap = partition.deductible_cap(i);
      auto rhs = [&](double v) {
        d[i] = v;
        return rhs_unchecked(model, partition, d);
      };
      const double lo_value = rhs(0.0);
      const double hi_value = rhs(cap);
      if (target < lo_value - kResidualTol || target > hi_value + kResidualTol) {
        throw Error(ErrorCode::ManualDInconsistent,
                    "no deductible in [0, " + fmt(cap) + "] for type " + std::to_string(i) + " at level " +
                        std::to_string(level) + " balances alpha " + fmt(spec.alpha));
      }
      d[i] = std::clamp(bisect_increasing(rhs, target, 0.0, cap, tol).mid(), 0.0, cap);
    } else if (std::abs(rhs_unchecked(model, partition, d) - target) > kResidualTol) {
      throw Error(ErrorCode::ManualDInconsistent,
                  "fixed deductibles at level " + std::to_string(level) + " do not balance alpha " + fmt(spec.alpha));
    }
    schedule.alphas[k] = spec.alpha;
    schedule.deductibles[k] = std::move(d);
  }
  require_valid(schedule, relativities, model, partition);
  return schedule;
}

}  // namespace bms
