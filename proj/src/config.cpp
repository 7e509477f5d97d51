#include "bms/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bms/errors.hpp"

namespace bms {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& origin, const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ConfigError, origin + ": " + (path.empty() ? "" : path + ": ") + what);
}

class Reader {
 public:
  Reader(const json& node, std::string origin, std::string path)
      : node_(node), origin_(std::move(origin)), path_(std::move(path)) {
    if (!node_.is_object()) fail("expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, _] : node_.items()) {
      if (!allowed.count(key)) config_error(origin_, child(key), "unknown key");
    }
  }

  bool has(const char* key) const { return node_.contains(key) && !node_.at(key).is_null(); }

  const json& at(const char* key) const {
    if (!node_.contains(key)) config_error(origin_, child(key), "missing required key");
    return node_.at(key);
  }

  double number(const char* key) const {
    const json& v = at(key);
    if (!v.is_number()) config_error(origin_, child(key), "expected a number");
    return v.get<double>();
  }

  std::uint64_t unsigned_integer(const char* key) const {
    const json& v = at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      config_error(origin_, child(key), "expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string string(const char* key) const {
    const json& v = at(key);
    if (!v.is_string()) config_error(origin_, child(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const char* key) const {
    const json& v = at(key);
    if (!v.is_array()) config_error(origin_, child(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) config_error(origin_, child(key) + "/" + std::to_string(i), "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  Reader object(const char* key) const { return Reader(at(key), origin_, child(key)); }

  std::string child(const std::string& key) const { return path_ + "/" + key; }
  [[noreturn]] void fail(const std::string& what) const { config_error(origin_, path_, what); }
  const std::string& origin() const { return origin_; }

 private:
  const json& node_;
  std::string origin_;
  std::string path_;
};

MixingDistribution parse_mixing(const Reader& r) {
  r.allow({"kind", "shape"});
  const std::string kind = r.string("kind");
  if (kind == "exponential_unit") return MixingDistribution::exponential_unit();
  if (kind == "dirac") return MixingDistribution::dirac();
  if (kind == "gamma_unit_mean") {
    const double shape = r.number("shape");
    if (!(shape > 0.0)) config_error(r.origin(), r.child("shape"), "must be positive");
    return MixingDistribution::gamma_unit_mean(shape);
  }
  config_error(r.origin(), r.child("kind"), "unknown mixing kind '" + kind + "'");
}

Principle parse_principle(const Reader& r) {
  const std::string name = r.string("principle");
  for (Principle p : {Principle::Manual, Principle::SingleType, Principle::ProportionalTop, Principle::GreedyTop,
                      Principle::Uniform}) {
    if (principle_name(p) == name) return p;
  }
  config_error(r.origin(), r.child("principle"), "unknown principle '" + name + "'");
}

DeductibleSpec parse_deductible(const Reader& r) {
  r.allow({"principle", "alphas", "deductibles"});
  DeductibleSpec spec;
  spec.principle = parse_principle(r);

  if (r.has("alphas")) {
    const json& a = r.at("alphas");
    if (a.is_number()) {
      spec.alphas = {a.get<double>()};
    } else {
      spec.alphas = r.numbers("alphas");
    }
  }
  const bool top_only = spec.principle == Principle::ProportionalTop || spec.principle == Principle::GreedyTop;
  if (top_only && spec.alphas.size() != 1) {
    config_error(r.origin(), r.child("alphas"), "top-level principles take exactly one alpha");
  }
  if ((spec.principle == Principle::SingleType || spec.principle == Principle::Manual) && spec.alphas.empty()) {
    config_error(r.origin(), r.child("alphas"), "one alpha per malus level is required");
  }

  if (r.has("deductibles")) {
    const json& rows = r.at("deductibles");
    const std::string path = r.child("deductibles");
    if (!rows.is_array()) config_error(r.origin(), path, "expected an array of rows");
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (!rows[k].is_array()) config_error(r.origin(), path + "/" + std::to_string(k), "expected an array");
      std::vector<std::optional<double>> row;
      std::size_t free = 0;
      for (std::size_t i = 0; i < rows[k].size(); ++i) {
        const json& v = rows[k][i];
        const std::string at = path + "/" + std::to_string(k) + "/" + std::to_string(i);
        if (v.is_null()) {
          row.emplace_back(std::nullopt);
          ++free;
        } else if (v.is_number()) {
          row.emplace_back(v.get<double>());
        } else {
          config_error(r.origin(), at, "expected a number or null");
        }
      }
      if (free > 1) config_error(r.origin(), path + "/" + std::to_string(k), "at most one free deductible per level");
      spec.deductibles.push_back(std::move(row));
    }
  }
  if (spec.principle == Principle::Manual) {
    if (spec.deductibles.size() != spec.alphas.size()) {
      config_error(r.origin(), r.child("deductibles"), "manual mode needs one deductible row per alpha");
    }
  } else if (spec.principle == Principle::Uniform) {
    if (spec.deductibles.size() > 1) {
      config_error(r.origin(), r.child("deductibles"), "uniform principle takes at most one fixed row");
    }
    for (const auto& v : spec.deductibles.empty() ? std::vector<std::optional<double>>{} : spec.deductibles[0]) {
      if (!v) config_error(r.origin(), r.child("deductibles"), "uniform deductible row must be fully specified");
    }
  } else if (!spec.deductibles.empty()) {
    config_error(r.origin(), r.child("deductibles"), "only manual and uniform principles take deductibles");
  }
  return spec;
}

SimulationConfig parse_simulation(const Reader& r) {
  r.allow({"n_policies", "burn_in_years", "sample_years", "seed", "initial_level", "threads"});
  SimulationConfig sim;
  if (r.has("n_policies")) sim.n_policies = r.unsigned_integer("n_policies");
  if (r.has("burn_in_years")) sim.burn_in_years = r.unsigned_integer("burn_in_years");
  if (r.has("sample_years")) sim.sample_years = r.unsigned_integer("sample_years");
  if (r.has("seed")) sim.seed = r.unsigned_integer("seed");
  if (r.has("initial_level")) sim.initial_level = r.unsigned_integer("initial_level");
  if (r.has("threads")) sim.threads = static_cast<unsigned>(r.unsigned_integer("threads"));
  if (sim.n_policies < 1) config_error(r.origin(), r.child("n_policies"), "must be at least 1");
  if (sim.sample_years < 1) config_error(r.origin(), r.child("sample_years"), "must be at least 1");
  return sim;
}

}  // namespace

std::string_view principle_name(Principle p) noexcept {
  switch (p) {
    case Principle::Manual: return "manual";
    case Principle::SingleType: return "single_type";
    case Principle::ProportionalTop: return "proportional_top";
    case Principle::GreedyTop: return "greedy_top";
    case Principle::Uniform: return "uniform";
  }
  return "unknown";
}

TariffConfig parse_config(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(origin, "", std::string("parse error: ") + e.what());
  }

  const Reader root(doc, origin, "");
  root.allow({"lambda", "severity", "thresholds", "mixing", "scale", "deductible", "numerics", "simulation"});

  TariffConfig config;
  config.lambda = root.number("lambda");
  if (!(config.lambda > 0.0)) config_error(origin, "/lambda", "must be positive");

  const Reader severity = root.object("severity");
  severity.allow({"kind", "mean"});
  if (severity.string("kind") != "exponential") {
    config_error(origin, "/severity/kind", "only 'exponential' severity is supported");
  }
  config.severity_mean = severity.number("mean");
  if (!(config.severity_mean > 0.0)) config_error(origin, "/severity/mean", "must be positive");

  config.thresholds = root.numbers("thresholds");
  if (config.thresholds.empty()) config_error(origin, "/thresholds", "at least one threshold is required");

  config.mixing = parse_mixing(root.object("mixing"));

  const Reader scale = root.object("scale");
  scale.allow({"levels", "penalties"});
  config.levels = scale.unsigned_integer("levels");
  for (double p : scale.numbers("penalties")) {
    if (p != static_cast<int>(p)) config_error(origin, "/scale/penalties", "penalties must be integers");
    config.penalties.push_back(static_cast<int>(p));
  }
  if (config.penalties.size() != config.thresholds.size() + 1) {
    config_error(origin, "/scale/penalties", "needs one penalty per claim type (thresholds + 1)");
  }

  if (root.has("deductible")) config.deductible = parse_deductible(root.object("deductible"));

  if (root.has("numerics")) {
    const Reader numerics = root.object("numerics");
    numerics.allow({"quadrature_order", "bisection_tol"});
    if (numerics.has("quadrature_order")) {
      config.quadrature_order = numerics.unsigned_integer("quadrature_order");
      if (config.quadrature_order < 16) config_error(origin, "/numerics/quadrature_order", "must be at least 16");
    }
    if (numerics.has("bisection_tol")) {
      config.bisection_tol = numerics.number("bisection_tol");
      if (!(config.bisection_tol > 0.0)) config_error(origin, "/numerics/bisection_tol", "must be positive");
    }
  }

  if (root.has("simulation")) config.simulation = parse_simulation(root.object("simulation"));
  return config;
}

TariffConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, path.string() + ": cannot open file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

Tariff build_tariff(const TariffConfig& config) {
  ClaimSeverityModel model = ClaimSeverityModel::exponential(config.severity_mean);
  ClaimTypePartition partition = type_probabilities(model, config.thresholds);
  return Tariff{std::move(model), std::move(partition), ScaleRules(config.levels, config.penalties), config.mixing};
}

Allocation allocate(const TariffConfig& config, const Tariff& tariff, const SteadyStateProfile& profile) {
  if (!config.deductible) throw Error(ErrorCode::ConfigError, "config has no 'deductible' section");
  const DeductibleSpec& spec = *config.deductible;
  const auto& r = profile.relativities;
  const double tol = config.bisection_tol;

  switch (spec.principle) {
    case Principle::ProportionalTop: {
      ProportionalAllocation p = allocate_proportional_top(spec.alphas[0], r, tariff.model, tariff.partition, tol);
      return {std::move(p.schedule), p.coefficient, p.coefficient_bound};
    }
    case Principle::GreedyTop:
      return {allocate_greedy_top(spec.alphas[0], r, tariff.model, tariff.partition, tol), {}, {}};
    case Principle::SingleType:
      return {allocate_single_type(spec.alphas, r, tariff.model, tariff.partition), {}, {}};
    case Principle::Uniform: {
      std::optional<std::vector<double>> row;
      if (!spec.deductibles.empty()) {
        row.emplace();
        for (const auto& v : spec.deductibles[0]) row->push_back(*v);
      }
      return {uniform_schedule(r, tariff.model, tariff.partition, row, tol), {}, {}};
    }
    case Principle::Manual: {
      std::vector<ManualLevel> levels;
      for (std::size_t k = 0; k < spec.alphas.size(); ++k) levels.push_back({spec.alphas[k], spec.deductibles[k]});
      return {allocate_manual(levels, r, tariff.model, tariff.partition, tol), {}, {}};
    }
  }
  throw Error(ErrorCode::ConfigError, "unknown deductible principle");
}

}  // namespace bms
