#include "bms/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <thread>

#include "bms/errors.hpp"

namespace bms {

namespace {

constexpr std::size_t kChunk = 1024;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform in the open interval (0, 1).
double open_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Sums needed for a ratio estimator sum(a) / sum(b) and its delta-method
// standard error, plus plain mean/variance of b / T.
struct RatioSums {
  double a = 0, b = 0, aa = 0, ab = 0, bb = 0;
  void add(double x, double y) {
    a += x;
    b += y;
    aa += x * x;
    ab += x * y;
    bb += y * y;
  }
  void merge(const RatioSums& o) {
    a += o.a;
    b += o.b;
    aa += o.aa;
    ab += o.ab;
    bb += o.bb;
  }
};

struct LevelSums {
  RatioSums theta;       // a = theta * years, b = years
  RatioSums deductible;  // a = paid, b = years
};

struct ChunkResult {
  std::vector<LevelSums> levels;
};

struct Context {
  const SimulationConfig& config;
  double lambda;
  const ScaleRules& rules;
  const ClaimTypePartition& partition;
  const ClaimSeverityModel& model;
  const MixingDistribution& mixing;
  const std::optional<DeductibleSchedule>& schedule;
};

ChunkResult run_chunk(const Context& ctx, std::size_t first, std::size_t last) {
  const std::size_t n_levels = ctx.rules.levels();
  const std::size_t types = ctx.partition.type_count();
  const std::size_t total_years = ctx.config.burn_in_years + ctx.config.sample_years;

  ChunkResult out{std::vector<LevelSums>(n_levels)};
  std::vector<std::uint64_t> years(n_levels);
  std::vector<double> paid(n_levels);
  std::vector<int> counts(types);
  std::vector<std::poisson_distribution<int>> claims(types);

  for (std::size_t policy = first; policy < last; ++policy) {
    std::mt19937_64 rng(splitmix64(ctx.config.seed ^ splitmix64(policy)));
    const double theta = ctx.mixing.is_point_mass() ? 1.0 : ctx.mixing.quantile(open_uniform(rng));
    for (std::size_t i = 0; i < types; ++i) {
      const double rate = ctx.lambda * theta * ctx.partition.probability(i);
      claims[i] = std::poisson_distribution<int>(rate > 0.0 ? rate : 1e-300);
    }

    std::fill(years.begin(), years.end(), 0);
    std::fill(paid.begin(), paid.end(), 0.0);
    std::size_t level = ctx.config.initial_level;
    for (std::size_t year = 0; year < total_years; ++year) {
      const bool sampled = year >= ctx.config.burn_in_years;
      for (std::size_t i = 0; i < types; ++i) counts[i] = claims[i](rng);
      if (sampled) {
        ++years[level];
        if (ctx.schedule && ctx.schedule->in_malus_zone(level)) {
          for (std::size_t i = 0; i < types; ++i) {
            const double d = ctx.schedule->deductible(level, i);
            for (int c = 0; c < counts[i]; ++c) {
              const double severity = ctx.model.sample_in_band(ctx.partition.lower_edge(i),
                                                               ctx.partition.upper_edge(i), open_uniform(rng));
              paid[level] += std::min(severity, d);
            }
          }
        }
      }
      level = ctx.rules.next_level(level, counts);
    }

    for (std::size_t l = 0; l < n_levels; ++l) {
      const double y = static_cast<double>(years[l]);
      out.levels[l].theta.add(theta * y, y);
      out.levels[l].deductible.add(paid[l], y);
    }
  }
  return out;
}

// Delta-method standard error of sum(a) / sum(b) over n independent units.
double ratio_se(const RatioSums& s, double n) {
  if (s.b <= 0.0 || n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double r = s.a / s.b;
  const double ss = std::max(0.0, s.aa - 2.0 * r * s.ab + r * r * s.bb);
  const double mean_b = s.b / n;
  return std::sqrt(ss / (n - 1.0)) / (mean_b * std::sqrt(n));
}

}  // namespace

SimulationReport simulate_portfolio(const SimulationConfig& config, double lambda, const ScaleRules& rules,
                                    const ClaimTypePartition& partition, const ClaimSeverityModel& model,
                                    const MixingDistribution& mixing,
                                    const std::optional<DeductibleSchedule>& schedule) {
  if (config.n_policies < 1 || config.sample_years < 1) {
    throw Error(ErrorCode::InvalidArgument, "simulation needs at least one policy and one sampled year");
  }
  if (config.initial_level >= rules.levels()) {
    throw Error(ErrorCode::InvalidArgument, "initial level " + std::to_string(config.initial_level) +
                                                " is outside the scale");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidArgument, "a priori frequency lambda must be positive");
  }
  if (!regularity_index(build_transition_matrix(rules, lambda, partition))) {
    throw Error(ErrorCode::NotRegular, "scale rules do not yield a regular chain");
  }
  if (rules.penalties().size() != partition.type_count()) {
    throw Error(ErrorCode::InvalidArgument, "penalties do not match the claim types");
  }
  if (schedule && (schedule->top_level != rules.top_level() || schedule->type_count() != partition.type_count())) {
    throw Error(ErrorCode::InvalidArgument, "deductible schedule does not match the scale");
  }

  const Context ctx{config, lambda, rules, partition, model, mixing, schedule};
  const std::size_t n_chunks = (config.n_policies + kChunk - 1) / kChunk;
  std::vector<ChunkResult> results(n_chunks);

  unsigned workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_chunks));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t c = next++; c < n_chunks; c = next++) {
      results[c] = run_chunk(ctx, c * kChunk, std::min(config.n_policies, (c + 1) * kChunk));
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  // Reduce in chunk order so the report does not depend on scheduling.
  const std::size_t n_levels = rules.levels();
  std::vector<LevelSums> totals(n_levels);
  for (const ChunkResult& r : results)
    for (std::size_t l = 0; l < n_levels; ++l) {
      totals[l].theta.merge(r.levels[l].theta);
      totals[l].deductible.merge(r.levels[l].deductible);
    }

  const double n = static_cast<double>(config.n_policies);
  const double horizon = static_cast<double>(config.sample_years);
  SimulationReport report;
  for (std::size_t l = 0; l < n_levels; ++l) {
    const RatioSums& t = totals[l].theta;
    const double mean_share = t.b / (n * horizon);
    const double var_share = std::max(0.0, (t.bb / (horizon * horizon) - n * mean_share * mean_share) / (n - 1.0));
    report.empirical_proportions.push_back(mean_share);
    report.proportion_se.push_back(n > 1 ? std::sqrt(var_share / n) : 0.0);
    report.empirical_relativities.push_back(t.b > 0 ? t.a / t.b : std::numeric_limits<double>::quiet_NaN());
    report.relativity_se.push_back(ratio_se(t, n));
    const RatioSums& d = totals[l].deductible;
    const bool charged = schedule && schedule->in_malus_zone(l);
    report.mean_deductible_paid.push_back(charged && d.b > 0 ? d.a / d.b : 0.0);
    report.deductible_se.push_back(charged ? ratio_se(d, n) : 0.0);
    report.policy_years.push_back(static_cast<std::uint64_t>(t.b));
  }
  return report;
}

}  // namespace bms
