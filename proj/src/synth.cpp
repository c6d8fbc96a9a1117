#include "foodchain/synth.hpp"

#include <cmath>
#include <cstdio>

#include "foodchain/rng.hpp"

namespace foodchain {

TimeSeriesFrame synth_greenhouse(std::size_t rows, std::uint64_t seed,
                                 std::int64_t start_epoch_s,
                                 std::int64_t step_s) {
  Rng rng(seed);
  TimeSeriesFrame frame;
  frame.channel_names = {"humidity_pct", "radiation_wm2", "co2_ppm"};
  frame.target_name = "air_temp_c";
  frame.channels.resize(frame.channel_names.size());

  double ar = 0.0;
  const double two_pi = 2.0 * M_PI;
  for (std::size_t i = 0; i < rows; ++i) {
    double t = static_cast<double>(i);
    double day_phase = two_pi * t / 96.0;
    double season_phase = two_pi * t / (96.0 * 30.0);
    // Low-persistence AR noise with heavy-tailed (mixture) innovations:
    // mostly small perturbations plus occasional sensor-style spikes. The
    // spikes are close to unpredictable one step ahead, and wavelet
    // soft-thresholding removes them from the inputs at little cost.
    double innovation = uniform(rng, 0.0, 1.0) < 0.05
                            ? gaussian(rng, 0.0, 3.0)
                            : gaussian(rng, 0.0, 0.15);
    ar = 0.05 * ar + innovation;

    double trend = 0.0008 * t;
    double temp = 21.0 + trend + 4.5 * std::sin(day_phase - two_pi * 0.25) +
                  2.0 * std::sin(season_phase) + ar;
    // Sensor channels carry the same spiky measurement-noise profile,
    // scaled to each channel's range.
    auto spiky = [&](double base_std, double spike_std) {
      return uniform(rng, 0.0, 1.0) < 0.05 ? gaussian(rng, 0.0, spike_std)
                                           : gaussian(rng, 0.0, base_std);
    };
    double radiation =
        std::max(0.0, 550.0 * std::sin(day_phase - two_pi * 0.25)) +
        spiky(15.0, 220.0);
    double humidity = 68.0 - 1.8 * (temp - 21.0) + spiky(2.0, 30.0);
    double co2 = 430.0 + 35.0 * std::sin(day_phase + two_pi * 0.1) +
                 spiky(8.0, 120.0);

    frame.timestamps.push_back(start_epoch_s +
                               static_cast<std::int64_t>(i) * step_s);
    frame.channels[0].push_back(humidity);
    frame.channels[1].push_back(radiation);
    frame.channels[2].push_back(co2);
    frame.target.push_back(temp);
  }
  frame.validate();
  return frame;
}

void synth_two_moons(std::size_t n, double rotation_deg, double noise_std,
                     std::uint64_t seed,
                     std::vector<std::vector<double>>* features,
                     std::vector<std::size_t>* labels) {
  Rng rng(seed);
  features->clear();
  labels->clear();
  double theta = rotation_deg * M_PI / 180.0;
  double ct = std::cos(theta), st = std::sin(theta);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t cls = i % 2;
    double a = uniform(rng, 0.0, M_PI);
    double x, y;
    if (cls == 0) {
      x = std::cos(a);
      y = std::sin(a);
    } else {
      x = 1.0 - std::cos(a);
      y = 0.5 - std::sin(a);
    }
    x += gaussian(rng, 0.0, noise_std);
    y += gaussian(rng, 0.0, noise_std);
    features->push_back({ct * x - st * y, st * x + ct * y});
    labels->push_back(cls);
  }
}

std::vector<FridgeSpec> synth_fleet(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<FridgeSpec> fleet;
  char buf[32];
  for (std::size_t i = 0; i < count; ++i) {
    FridgeSpec spec;
    std::snprintf(buf, sizeof(buf), "unit-%03zu", i);
    spec.id = buf;
    spec.tau_s = uniform(rng, 300.0, 1200.0);
    spec.cooling_tau_s = spec.tau_s * uniform(rng, 0.4, 0.7);
    spec.ambient_c = uniform(rng, 18.0, 26.0);
    spec.setpoint_c = uniform(rng, 1.0, 3.0);
    spec.cycle_low_c = spec.setpoint_c + 0.5;
    spec.cycle_high_c = spec.cycle_low_c + uniform(rng, 1.5, 3.0);
    spec.threshold_c = 8.0;
    spec.initial_c = uniform(rng, spec.cycle_low_c, spec.cycle_high_c);
    spec.noise_std_c = 0.02;
    spec.defrost_every_s = uniform(rng, 5400.0, 10800.0);
    spec.power_kw = uniform(rng, 0.4, 2.5);
    spec.seed = seed * 1000003ULL + i;
    fleet.push_back(std::move(spec));
  }
  return fleet;
}

}  // namespace foodchain
