#pragma once

#include <cmath>
#include <cstdint>

namespace pipetune {

// Simulation time is a 64-bit count of fixed-point ticks. Configs and
// reports speak in abstract "time units"; one unit is 1e9 ticks, so unit
// values with up to nine fractional digits convert exactly and two runs
// of the same scenario produce bit-identical timelines.
using Tick = std::int64_t;

inline constexpr Tick kTicksPerUnit = 1'000'000'000;

inline Tick to_ticks(double units) {
    return static_cast<Tick>(std::llround(units * static_cast<double>(kTicksPerUnit)));
}

inline double to_units(Tick ticks) {
    return static_cast<double>(ticks) / static_cast<double>(kTicksPerUnit);
}

}  // namespace pipetune
