#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "foodchain/rng.hpp"
#include "foodchain/signal.hpp"
#include "foodchain/synth.hpp"
#include "foodchain/time_series.hpp"

using namespace foodchain;

namespace {

TimeSeriesFrame frame_from_target(const std::vector<double>& target) {
  TimeSeriesFrame f;
  f.target_name = "y";
  for (std::size_t i = 0; i < target.size(); ++i) {
    f.timestamps.push_back(1700000000 + 3600 * static_cast<std::int64_t>(i));
    f.target.push_back(target[i]);
  }
  return f;
}

}  // namespace

TEST_CASE("min-max on [2,4,6] fit on all rows") {
  auto f = frame_from_target({2, 4, 6});
  auto [out, norm] = fit_apply_minmax(f, 1.0);
  CHECK(out.target[0] == doctest::Approx(0.0));
  CHECK(out.target[1] == doctest::Approx(0.5));
  CHECK(out.target[2] == doctest::Approx(1.0));
  CHECK(norm.warnings.empty());
}

TEST_CASE("constant channel maps to zeros with a warning") {
  auto f = frame_from_target({7, 7, 7});
  auto [out, norm] = fit_apply_minmax(f, 1.0);
  for (double v : out.target) CHECK(v == 0.0);
  CHECK(norm.warnings.size() == 1);
}

TEST_CASE("min-max fit on leading rows extrapolates past 1") {
  auto f = frame_from_target({2, 4, 6});
  auto [out, norm] = fit_apply_minmax(f, 2.0 / 3.0);
  CHECK(out.target[0] == doctest::Approx(0.0));
  CHECK(out.target[1] == doctest::Approx(1.0));
  CHECK(out.target[2] == doctest::Approx(2.0));
}

TEST_CASE("normalize/denormalize round-trips within 1e-12") {
  Rng rng(9);
  std::vector<double> vals;
  for (int i = 0; i < 50; ++i) vals.push_back(uniform(rng, -40.0, 90.0));
  auto f = frame_from_target(vals);
  auto [out, norm] = fit_apply_minmax(f, 0.7);
  std::size_t tcol = norm.target_col();
  for (std::size_t i = 0; i < vals.size(); ++i)
    CHECK(std::fabs(norm.denormalize(tcol, out.target[i]) - vals[i]) < 1e-12);
}

TEST_CASE("wavelet: constant series is a fixed point") {
  auto out = wavelet_denoise({5, 5, 5, 5}, 1);
  REQUIRE(out.size() == 4);
  for (double v : out) CHECK(v == 5.0);
}

TEST_CASE("wavelet: [1,3,1,3] -> [2,2,2,2] exactly") {
  auto out = wavelet_denoise({1, 3, 1, 3}, 1);
  REQUIRE(out.size() == 4);
  for (double v : out) CHECK(v == 2.0);
}

TEST_CASE("haar round-trip error < 1e-10") {
  Rng rng(17);
  for (std::size_t len : {4u, 7u, 16u, 33u, 250u}) {
    std::vector<double> x;
    for (std::size_t i = 0; i < len; ++i) x.push_back(gaussian(rng));
    auto back = haar_inverse(haar_forward(x, 2));
    REQUIRE(back.size() == x.size());
    for (std::size_t i = 0; i < len; ++i)
      CHECK(std::fabs(back[i] - x[i]) < 1e-10);
  }
}

TEST_CASE("denoise is idempotent, exactly") {
  Rng rng(23);
  for (std::size_t len : {8u, 9u, 64u, 101u}) {
    std::vector<double> x;
    for (std::size_t i = 0; i < len; ++i) x.push_back(gaussian(rng));
    auto once = wavelet_denoise(x, 1);
    auto twice = wavelet_denoise(once, 1);
    CHECK(once == twice);  // bitwise
  }
}

TEST_CASE("denoise never increases energy") {
  Rng rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x;
    for (int i = 0; i < 96; ++i) x.push_back(gaussian(rng));
    auto y = wavelet_denoise(x, 1);
    double ex = 0, ey = 0;
    for (double v : x) ex += v * v;
    for (double v : y) ey += v * v;
    CHECK(ey <= ex + 1e-12);
  }
}

TEST_CASE("denoise rejects levels too deep for the series") {
  CHECK_THROWS_AS(wavelet_denoise({1, 2, 3}, 2), std::invalid_argument);
  CHECK_THROWS_AS(wavelet_denoise({1}, 1), std::invalid_argument);
}

TEST_CASE("window counts match length - window - lead + 1") {
  std::vector<double> t(100);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i);
  auto f = frame_from_target(t);
  auto ds = make_windows(f, 15, 1);
  CHECK(ds.size() == 85);

  t.resize(16);
  auto ds2 = make_windows(frame_from_target(t), 15, 1);
  CHECK(ds2.size() == 1);

  t.resize(15);
  CHECK_THROWS(make_windows(frame_from_target(t), 15, 1));
}

TEST_CASE("horizon-to-lead mapping is 1/6/12 hours") {
  CHECK(lead_hours_for(1) == 1);
  CHECK(lead_hours_for(2) == 6);
  CHECK(lead_hours_for(3) == 12);
}

TEST_CASE("training windows never contain validation/test-period values") {
  std::vector<double> t(200);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i);
  auto f = frame_from_target(t);
  auto ds = make_windows(f, 15, 1);
  // targets are row values, so any input cell >= first val row is a leak
  double b1 = std::floor(0.7 * 200);
  std::int64_t b1_time = f.timestamps[static_cast<std::size_t>(b1)];
  for (std::size_t s = 0; s < ds.size(); ++s) {
    if (ds.splits[s] != Split::train) continue;
    CHECK(ds.target_times[s] < b1_time);
    for (const auto& step : ds.inputs[s])
      for (double v : step) CHECK(v < b1);
  }
}

TEST_CASE("chronological split ordering of target times") {
  auto f = synth_greenhouse(400, 3);
  auto ds = make_windows(f, 15, 1);
  std::int64_t max_train = -1, min_val = INT64_MAX, min_test = INT64_MAX;
  std::int64_t max_val = -1;
  for (std::size_t s = 0; s < ds.size(); ++s) {
    auto t = ds.target_times[s];
    if (ds.splits[s] == Split::train) max_train = std::max(max_train, t);
    if (ds.splits[s] == Split::val) {
      min_val = std::min(min_val, t);
      max_val = std::max(max_val, t);
    }
    if (ds.splits[s] == Split::test) min_test = std::min(min_test, t);
  }
  CHECK(max_train < min_val);
  CHECK(max_val < min_test);
}

TEST_CASE("weekly yield resamples to daily by linear interpolation") {
  TimeSeriesFrame env;
  env.target_name = "unused";
  env.channel_names = {"temp"};
  env.channels.resize(1);
  std::int64_t day = 86400;
  std::int64_t t0 = 1700006400;  // midnight-aligned
  for (int h = 0; h < 24 * 8; ++h) {
    env.timestamps.push_back(t0 + 3600 * h);
    env.channels[0].push_back(10.0);
    env.target.push_back(0.0);
  }
  TimeSeriesFrame yw;
  yw.target_name = "yield";
  yw.timestamps = {t0, t0 + 7 * day};
  yw.target = {7.0, 14.0};

  auto daily = resample_yield(env, yw);
  REQUIRE(daily.target.size() == 8);
  for (int d = 0; d < 8; ++d)
    CHECK(daily.target[d] == doctest::Approx(7.0 + d));
  // constant env channel -> constant daily mean (stored as a channel)
  REQUIRE(daily.channels.size() == 1);
  for (double v : daily.channels[0]) CHECK(v == doctest::Approx(10.0));
}

TEST_CASE("daily mean of 1..24 is 12.5") {
  TimeSeriesFrame env;
  env.target_name = "x";
  env.channel_names = {"temp"};
  env.channels.resize(1);
  std::int64_t t0 = 1700006400;
  for (int h = 0; h < 48; ++h) {
    env.timestamps.push_back(t0 + 3600 * h);
    env.channels[0].push_back(static_cast<double>(h % 24 + 1));
    env.target.push_back(0.0);
  }
  TimeSeriesFrame yw;
  yw.target_name = "yield";
  yw.timestamps = {t0, t0 + 86400};
  yw.target = {1.0, 2.0};
  auto daily = resample_yield(env, yw);
  REQUIRE(daily.channels.size() == 1);
  CHECK(daily.channels[0][0] == doctest::Approx(12.5));
}

TEST_CASE("resample_yield needs at least two weekly points") {
  TimeSeriesFrame env = frame_from_target({1, 2, 3});
  TimeSeriesFrame yw;
  yw.target_name = "yield";
  yw.timestamps = {1700000000};
  yw.target = {5.0};
  CHECK_THROWS(resample_yield(env, yw));
}

TEST_CASE("csv ingestion rejects bad rows with line numbers") {
  std::string path = "/tmp/fc_bad_csv_test.csv";
  {
    std::ofstream os(path);
    os << "timestamp,hum,temp\n";
    os << "2024-01-01 00:00:00,1.0,2.0\n";
    os << "2024-01-01 01:00:00,oops,2.0\n";
  }
  CHECK_THROWS_WITH_AS(read_frame_csv(path), doctest::Contains(":3"),
                       std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("csv round-trips a frame") {
  auto f = synth_greenhouse(50, 4);
  std::string path = "/tmp/fc_csv_roundtrip.csv";
  write_frame_csv(f, path);
  auto g = read_frame_csv(path);
  REQUIRE(g.timestamps.size() == f.timestamps.size());
  CHECK(g.timestamps == f.timestamps);
  CHECK(g.channel_names == f.channel_names);
  for (std::size_t i = 0; i < f.target.size(); ++i)
    CHECK(g.target[i] == doctest::Approx(f.target[i]).epsilon(1e-9));
  std::remove(path.c_str());
}

TEST_CASE("frame validation catches non-increasing timestamps") {
  TimeSeriesFrame f = frame_from_target({1, 2});
  f.timestamps[1] = f.timestamps[0];
  CHECK_THROWS(f.validate());
}
