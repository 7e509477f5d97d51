#include "bms/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bms/builtin_tables.hpp"
#include "bms/config.hpp"
#include "bms/errors.hpp"
#include "bms/report.hpp"

namespace bms {

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  bool csv = false;
  bool full_precision = false;
  std::size_t quadrature_order = 0;
};

void add_common(CLI::App& cmd, CommonOptions& opts, bool needs_config) {
  auto* config = cmd.add_option("-c,--config", opts.config_path, "Tariff configuration (JSON)");
  if (needs_config) config->required()->check(CLI::ExistingFile);
  cmd.add_option("-o,--out", opts.out_dir, "Also write the output as CSV into this directory");
  cmd.add_flag("--csv", opts.csv, "Print CSV instead of an aligned table");
  cmd.add_flag("--full-precision", opts.full_precision, "Print round-trip precision instead of 4 decimals");
  cmd.add_option("--quadrature-order", opts.quadrature_order, "Override numerics.quadrature_order")
      ->check(CLI::Range(std::size_t{16}, std::size_t{1} << 20));
}

TariffConfig load(const CommonOptions& opts) {
  TariffConfig config = load_config(opts.config_path);
  if (opts.quadrature_order) config.quadrature_order = opts.quadrature_order;
  return config;
}

SteadyStateProfile profile_for(const TariffConfig& config, const Tariff& tariff) {
  ProfileOptions options;
  options.order = config.quadrature_order;
  return steady_state_profile(config.lambda, tariff.rules, tariff.partition, tariff.mixing, options);
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream file(path);
  if (!file) throw Error(ErrorCode::ConfigError, path.string() + ": cannot open for writing");
  return file;
}

// Stdout always gets the table; --out additionally drops <name>.csv.
void emit(const TextTable& table, const CommonOptions& opts, std::ostream& out, const std::string& name) {
  if (!opts.out_dir.empty()) {
    std::ofstream file = open_output(std::filesystem::path(opts.out_dir) / (name + ".csv"));
    table.write_csv(file);
  }
  if (opts.csv) {
    table.write_csv(out);
  } else {
    table.write_aligned(out);
  }
}

void write_error(std::ostream& err, std::string_view code, const std::string& message) {
  nlohmann::json record{{"error", code}, {"message", message}};
  err << record.dump() << '\n';
}

int run_relativities(const CommonOptions& opts, std::ostream& out) {
  const TariffConfig config = load(opts);
  const Tariff tariff = build_tariff(config);
  const SteadyStateProfile profile = profile_for(config, tariff);
  emit(relativity_table(profile, tariff.model.mean(), {opts.full_precision}), opts, out, "relativities");
  return 0;
}

int run_allocate(const CommonOptions& opts, std::ostream& out) {
  const TariffConfig config = load(opts);
  const Tariff tariff = build_tariff(config);
  const SteadyStateProfile profile = profile_for(config, tariff);
  const Allocation allocation = allocate(config, tariff, profile);
  const FormatOptions format{opts.full_precision};
  if (allocation.coefficient && !opts.csv) {
    char line[128];
    std::snprintf(line, sizeof line, "# x = %.6f  (x0 = %.6f)\n", *allocation.coefficient,
                  *allocation.coefficient_bound);
    out << line;
  }
  emit(tariff_table(profile, tariff.model.mean(), allocation.schedule, format), opts, out, "allocate");
  return 0;
}

int run_validate(const CommonOptions& opts, const std::string& schedule_path, double residual_tol,
                 std::ostream& out, std::ostream& err) {
  const TariffConfig config = load(opts);
  const Tariff tariff = build_tariff(config);
  const SteadyStateProfile profile = profile_for(config, tariff);
  if (!profile.malus_entry) throw Error(ErrorCode::NoMalusZone, "every relativity is at most 1");

  std::ifstream in(schedule_path);
  if (!in) throw Error(ErrorCode::ConfigError, schedule_path + ": cannot open file");
  const DeductibleSchedule schedule = read_schedule_csv(in, *profile.malus_entry, tariff.rules.top_level(),
                                                        tariff.partition.type_count());
  const ValidationReport report =
      validate_schedule(schedule, profile.relativities, tariff.model, tariff.partition, residual_tol);
  emit(validation_table(report, {opts.full_precision}), opts, out, "validate");
  if (report.ok()) return 0;

  bool deductible_failure = false;
  std::ostringstream message;
  for (std::size_t k = 0; k < report.failures.size(); ++k) {
    const ScheduleFailure& f = report.failures[k];
    deductible_failure = deductible_failure || is_deductible_check(f.check);
    message << (k ? "; " : "") << check_name(f.check) << " at level " << f.level;
    if (f.type) message << " type " << *f.type;
    message << ": " << f.detail;
  }
  write_error(err, to_string(deductible_failure ? ErrorCode::Assumption2Violation : ErrorCode::ScheduleInvalid),
              message.str());
  return 1;
}

int run_simulate(const CommonOptions& opts, std::optional<std::uint64_t> seed, std::optional<std::size_t> policies,
                 std::ostream& out) {
  const TariffConfig config = load(opts);
  const Tariff tariff = build_tariff(config);
  const SteadyStateProfile profile = profile_for(config, tariff);
  SimulationConfig sim = config.simulation.value_or(SimulationConfig{});
  if (seed) sim.seed = *seed;
  if (policies) sim.n_policies = *policies;

  std::optional<DeductibleSchedule> schedule;
  if (config.deductible) schedule = allocate(config, tariff, profile).schedule;
  const SimulationReport report =
      simulate_portfolio(sim, config.lambda, tariff.rules, tariff.partition, tariff.model, tariff.mixing, schedule);
  emit(simulation_table(report, profile, {opts.full_precision}), opts, out, "simulate");
  return 0;
}

int run_tables(const CommonOptions& opts, const std::vector<int>& only, std::ostream& out) {
  const FormatOptions format{opts.full_precision};
  for (const BuiltinTable& entry : builtin_tables()) {
    if (!only.empty() && std::find(only.begin(), only.end(), entry.number) == only.end()) continue;
    TariffConfig config = parse_config(entry.config_json, "table " + std::to_string(entry.number));
    if (opts.quadrature_order) config.quadrature_order = opts.quadrature_order;
    const Tariff tariff = build_tariff(config);
    const SteadyStateProfile profile = profile_for(config, tariff);
    const Allocation allocation = allocate(config, tariff, profile);
    const TextTable table = tariff_table(profile, tariff.model.mean(), allocation.schedule, format);

    if (!opts.out_dir.empty()) {
      char name[32];
      std::snprintf(name, sizeof name, "table%02d.csv", entry.number);
      const std::filesystem::path path = std::filesystem::path(opts.out_dir) / name;
      std::ofstream file = open_output(path);
      table.write_csv(file);
      out << path.string() << '\n';
    } else {
      out << "Table " << entry.number << ": " << entry.title << '\n';
      if (opts.csv) {
        table.write_csv(out);
      } else {
        table.write_aligned(out);
      }
      out << '\n';
    }
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bonus-malus tariffs with level-dependent deductibles", "bms"};
  app.require_subcommand(1);

  CommonOptions rel_opts, alloc_opts, val_opts, sim_opts, table_opts;

  auto* rel = app.add_subcommand("relativities", "Stationary level occupancy, relativities and premiums");
  add_common(*rel, rel_opts, true);

  auto* alloc = app.add_subcommand("allocate", "Premium reductions and deductibles for the configured principle");
  add_common(*alloc, alloc_opts, true);

  auto* val = app.add_subcommand("validate", "Check a deductible schedule CSV against the configured tariff");
  add_common(*val, val_opts, true);
  std::string schedule_path;
  double residual_tol = kResidualTol;
  val->add_option("-s,--schedule", schedule_path, "Schedule CSV in the allocate output layout")
      ->required()
      ->check(CLI::ExistingFile);
  val->add_option("--residual-tol", residual_tol, "Largest accepted premium-neutrality residual")
      ->check(CLI::PositiveNumber);

  auto* sim = app.add_subcommand("simulate", "Monte Carlo portfolio against the analytic steady state");
  add_common(*sim, sim_opts, true);
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> policies;
  sim->add_option("--seed", seed, "Override simulation.seed");
  sim->add_option("--policies", policies, "Override simulation.n_policies")->check(CLI::PositiveNumber);

  auto* tables = app.add_subcommand("tables", "Reproduce the twelve reference tables");
  add_common(*tables, table_opts, false);
  std::vector<int> only;
  tables->add_option("-t,--table", only, "Only these table numbers")->check(CLI::Range(1, 12));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    write_error(err, "UsageError", e.what());
    return 2;
  }

  try {
    if (rel->parsed()) return run_relativities(rel_opts, out);
    if (alloc->parsed()) return run_allocate(alloc_opts, out);
    if (val->parsed()) return run_validate(val_opts, schedule_path, residual_tol, out, err);
    if (sim->parsed()) return run_simulate(sim_opts, seed, policies, out);
    if (tables->parsed()) return run_tables(table_opts, only, out);
  } catch (const Error& e) {
    write_error(err, to_string(e.code()), e.what());
    return e.code() == ErrorCode::ConfigError ? 2 : 1;
  } catch (const std::exception& e) {
    write_error(err, "InternalError", e.what());
    return 1;
  }
  return 2;
}

}  // namespace bms
