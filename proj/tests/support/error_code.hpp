#pragma once

#include <catch_amalgamated.hpp>

#include "emorec/error.hpp"

/// Code of the emorec::Error thrown by fn; fails the test when nothing is thrown.
inline emorec::ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const emorec::Error& e) {
    return e.code();
  }
  FAIL("expected an emorec::Error");
  return emorec::ErrorCode::IoError;
}
