#pragma once

#include <doctest.h>

#include "bms/errors.hpp"

// Runs f and returns the code of the bms::Error it throws; fails the current
// test when nothing is thrown.
template <class F>
bms::ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const bms::Error& e) {
    return e.code();
  }
  FAIL("expected bms::Error");
  return bms::ErrorCode::InvalidArgument;
}
