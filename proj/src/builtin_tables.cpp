#include "bms/builtin_tables.hpp"

#include "bms/errors.hpp"

namespace bms {

namespace {

// Scale and severity shared by every reference tariff; the thresholds pick
// between the two claim classifications.
std::string tariff_json(const std::string& thresholds, const std::string& deductible) {
  return R"({
  "lambda": 0.1,
  "severity": {"kind": "exponential", "mean": 2},
  "thresholds": )" +
         thresholds + R"(,
  "mixing": {"kind": "exponential_unit"},
  "scale": {"levels": 4, "penalties": [1, 2, 3, 3]},
  "deductible": )" +
         deductible + "\n}\n";
}

const std::string kCoarse = "[1, 2, 4]";
const std::string kFine = "[0.3, 1.2, 2.8]";

std::vector<BuiltinTable> make_tables() {
  return {
      {1, "top level only, proportional, alpha_3 = 0.05",
       tariff_json(kCoarse, R"({"principle": "proportional_top", "alphas": 0.05})")},
      {2, "top level only, proportional, alpha_3 = 0.13",
       tariff_json(kCoarse, R"({"principle": "proportional_top", "alphas": 0.13})")},
      {3, "top level only, largest claims first, alpha_3 = 0.05",
       tariff_json(kCoarse, R"({"principle": "greedy_top", "alphas": 0.05})")},
      {4, "top level only, largest claims first, alpha_3 = 0.13",
       tariff_json(kCoarse, R"({"principle": "greedy_top", "alphas": 0.13})")},
      {5, "type 3 claims only",
       tariff_json(kCoarse, R"({"principle": "single_type", "alphas": [0.06, 0.13, 0.24]})")},
      {6, "type 3 claims only, larger reductions",
       tariff_json(kCoarse, R"({"principle": "single_type", "alphas": [0.24, 0.25, 0.26]})")},
      {7, "types 2 and 3",
       tariff_json(kCoarse, R"({"principle": "manual", "alphas": [0.24, 0.25, 0.26],
    "deductibles": [[0, 0, 1.1, null], [0, 0, 1.1, null], [0, 0, 1.1, null]]})")},
      {8, "types 2 and 3, larger reductions",
       tariff_json(kCoarse, R"({"principle": "manual", "alphas": [0.35, 0.40, 0.45],
    "deductibles": [[0, 0, 1.5, null], [0, 0, 1.6, null], [0, 0, 1.7, null]]})")},
      {9, "types 1, 2 and 3",
       tariff_json(kCoarse, R"({"principle": "manual", "alphas": [0.35, 0.40, 0.45],
    "deductibles": [[0, 0.3, 1.3, null], [0, 0.5, 1.4, null], [0, 0.7, 1.5, null]]})")},
      {10, "finer classes, types 2 and 3",
       tariff_json(kFine, R"({"principle": "manual", "alphas": [0.10, 0.15, 0.20],
    "deductibles": [[0, 0, 0.2, null], [0, 0, 0.25, null], [0, 0, 0.3, null]]})")},
      {11, "finer classes, types 1, 2 and 3",
       tariff_json(kFine, R"({"principle": "manual", "alphas": [0.20, 0.22, 0.24],
    "deductibles": [[0, 0.05, 0.5, null], [0, 0.1, 0.55, null], [0, 0.1, 0.6, null]]})")},
      {12, "finer classes, types 1, 2 and 3, larger reductions",
       tariff_json(kFine, R"({"principle": "manual", "alphas": [0.35, 0.40, 0.45],
    "deductibles": [[0, 0.1, 0.7, null], [0, 0.15, 0.8, null], [0, 0.2, 0.9, null]]})")},
  };
}

}  // namespace

const std::vector<BuiltinTable>& builtin_tables() {
  static const std::vector<BuiltinTable> tables = make_tables();
  return tables;
}

const BuiltinTable& builtin_table(int number) {
  const auto& tables = builtin_tables();
  if (number < 1 || number > static_cast<int>(tables.size())) {
    throw Error(ErrorCode::InvalidArgument, "no built-in table " + std::to_string(number));
  }
  return tables[static_cast<std::size_t>(number - 1)];
}

}  // namespace bms
