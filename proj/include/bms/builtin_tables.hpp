#pragma once

#include <string>
#include <vector>

#include "bms/config.hpp"

namespace bms {

/// One of the twelve reference tariffs reproduced by `bms tables`.
struct BuiltinTable {
  int number;
  std::string title;
  std::string config_json;
};

const std::vector<BuiltinTable>& builtin_tables();

/// Throws InvalidArgument for a number outside 1..12.
const BuiltinTable& builtin_table(int number);

}  // namespace bms
