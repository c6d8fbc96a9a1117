#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "foodchain/fridge.hpp"
#include "foodchain/time_series.hpp"

namespace foodchain {

// Synthetic greenhouse-style series sampled every 15 minutes: temperature
// target driven by a slow trend, daily/seasonal sinusoids and a
// low-persistence AR disturbance with occasional sensor-style spikes, plus
// correlated environment channels (humidity, radiation, co2) carrying the
// same spiky measurement-noise profile.
TimeSeriesFrame synth_greenhouse(std::size_t rows, std::uint64_t seed,
                                 std::int64_t start_epoch_s = 1704067200,
                                 std::int64_t step_s = 900);

// Two interleaved half-moons rotated by `rotation_deg`, with additive noise.
// Labels are 0/1 by moon. Used to fabricate related-but-shifted domains.
void synth_two_moons(std::size_t n, double rotation_deg, double noise_std,
                     std::uint64_t seed,
                     std::vector<std::vector<double>>* features,
                     std::vector<std::size_t>* labels);

// A fleet of fridge specs with varied thermal constants, setpoints and power
// draws. Ids are "unit-000", "unit-001", ...
std::vector<FridgeSpec> synth_fleet(std::size_t count, std::uint64_t seed);

}  // namespace foodchain
