#pragma once

#include <cstdint>

namespace bodesim {

// Simulation clock: integer microseconds from run start. Trace files are
// millisecond-granular, so the conversion below is exact.
using SimTime = std::int64_t;

constexpr SimTime kNever = -1;

constexpr SimTime msec(std::int64_t n) { return n * 1000; }
constexpr SimTime seconds(std::int64_t n) { return n * 1'000'000; }
constexpr double to_ms(SimTime t) { return static_cast<double>(t) / 1e3; }
constexpr double to_sec(SimTime t) { return static_cast<double>(t) / 1e6; }

} // namespace bodesim
