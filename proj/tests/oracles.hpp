#pragma once

// Frozen high-precision references; regenerate with tests/oracles/generate.py.
namespace oracle {
#include "oracles.inc"
}  // namespace oracle
