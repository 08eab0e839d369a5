#pragma once

#include <cstdint>
#include <iosfwd>

#include "ymflow/config.hpp"

namespace ymflow {

struct VerifyOptions {
  uint64_t seed = 1;
  int threads = 1;
  bool quick = false;  // reduced sizes for smoke runs; the gate uses quick = false
  std::ostream* log = nullptr;
};

/// Runs the acceptance suite (criteria 1-10) and returns one assertion per
/// checked property, printing a PASS/FAIL line per criterion when log is set.
ResultRecord run_verify(const VerifyOptions& opts);

}  // namespace ymflow
