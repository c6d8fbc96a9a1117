#include "foodchain/signal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace foodchain {

double NormalizerState::normalize(std::size_t col, double x) const {
  double range = maxs[col] - mins[col];
  if (range == 0.0) return 0.0;
  return (x - mins[col]) / range;
}

double NormalizerState::denormalize(std::size_t col, double x) const {
  double range = maxs[col] - mins[col];
  if (range == 0.0) return mins[col];
  return x * range + mins[col];
}

std::pair<TimeSeriesFrame, NormalizerState> fit_apply_minmax(
    const TimeSeriesFrame& frame, double train_fraction) {
  if (!(train_fraction > 0.0) || train_fraction > 1.0)
    throw std::invalid_argument("train_fraction must be in (0, 1]");
  if (frame.rows() == 0) throw std::invalid_argument("empty frame");

  std::size_t fit_rows = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(train_fraction *
                                             static_cast<double>(frame.rows()))));

  NormalizerState state;
  auto fit_col = [&](const std::vector<double>& col, const std::string& name) {
    double mn = col[0], mx = col[0];
    for (std::size_t i = 1; i < fit_rows; ++i) {
      mn = std::min(mn, col[i]);
      mx = std::max(mx, col[i]);
    }
    if (mn == mx)
      state.warnings.push_back("constant channel '" + name +
                               "' normalized to zeros");
    state.mins.push_back(mn);
    state.maxs.push_back(mx);
  };
  for (std::size_t c = 0; c < frame.channel_count(); ++c)
    fit_col(frame.channels[c], frame.channel_names[c]);
  fit_col(frame.target, frame.target_name);

  TimeSeriesFrame out = frame;
  for (std::size_t c = 0; c < out.channel_count(); ++c)
    for (double& x : out.channels[c]) x = state.normalize(c, x);
  std::size_t tc = state.target_col();
  for (double& x : out.target) x = state.normalize(tc, x);
  return {std::move(out), std::move(state)};
}

// ---------------------------------------------------------------------------

HaarPyramid haar_forward(const std::vector<double>& series,
                         std::size_t levels) {
  if (levels < 1) throw std::invalid_argument("levels must be >= 1");
  if (series.size() < (std::size_t{1} << levels))
    throw std::invalid_argument("series too short for requested wavelet depth");

  HaarPyramid p;
  std::vector<double> cur = series;
  for (std::size_t l = 0; l < levels; ++l) {
    p.level_lengths.push_back(cur.size());
    if (cur.size() % 2) cur.push_back(cur.back());  // symmetric edge pad
    std::size_t half = cur.size() / 2;
    std::vector<double> approx(half), detail(half);
    for (std::size_t i = 0; i < half; ++i) {
      approx[i] = (cur[2 * i] + cur[2 * i + 1]) / 2.0;
      detail[i] = (cur[2 * i] - cur[2 * i + 1]) / 2.0;
    }
    p.details.push_back(std::move(detail));
    cur = std::move(approx);
  }
  p.approx = std::move(cur);
  return p;
}

std::vector<double> haar_inverse(const HaarPyramid& pyramid) {
  std::vector<double> cur = pyramid.approx;
  for (std::size_t l = pyramid.details.size(); l-- > 0;) {
    const auto& detail = pyramid.details[l];
    if (detail.size() != cur.size())
      throw std::invalid_argument("pyramid level size mismatch");
    std::vector<double> up(2 * cur.size());
    for (std::size_t i = 0; i < cur.size(); ++i) {
      up[2 * i] = cur[i] + detail[i];
      up[2 * i + 1] = cur[i] - detail[i];
    }
    up.resize(pyramid.level_lengths[l]);  // trim edge padding
    cur = std::move(up);
  }
  return cur;
}

std::vector<double> wavelet_denoise(const std::vector<double>& series,
                                    std::size_t levels) {
  HaarPyramid p = haar_forward(series, levels);
  for (auto& detail : p.details) std::fill(detail.begin(), detail.end(), 0.0);
  return haar_inverse(p);
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> WindowedDataset::indices(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < splits.size(); ++i)
    if (splits[i] == s) out.push_back(i);
  return out;
}

std::size_t lead_hours_for(std::size_t horizon_steps) {
  switch (horizon_steps) {
    case 1: return 1;
    case 2: return 6;
    case 3: return 12;
    default:
      throw std::invalid_argument("horizon_steps must be in {1, 2, 3}");
  }
}

WindowedDataset make_windows(const TimeSeriesFrame& frame, std::size_t window,
                             std::size_t horizon_steps,
                             std::size_t step_hours) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  std::size_t lead = step_hours ? step_hours : lead_hours_for(horizon_steps);
  std::size_t rows = frame.rows();
  if (rows < window + lead)
    throw std::invalid_argument("series shorter than window + lead");

  WindowedDataset ds;
  ds.window = window;
  ds.lead = lead;
  ds.input_dim = frame.channel_count() + 1;
  std::size_t count = rows - window - lead + 1;

  // 70/10/20 chronological by target position
  std::size_t b1 = static_cast<std::size_t>(0.7 * static_cast<double>(rows));
  std::size_t b2 = static_cast<std::size_t>(0.8 * static_cast<double>(rows));

  for (std::size_t s = 0; s < count; ++s) {
    std::size_t t = s + window + lead - 1;
    std::vector<std::vector<double>> in(window,
                                        std::vector<double>(ds.input_dim));
    for (std::size_t r = 0; r < window; ++r) {
      for (std::size_t c = 0; c < frame.channel_count(); ++c)
        in[r][c] = frame.channels[c][s + r];
      in[r][frame.channel_count()] = frame.target[s + r];
    }
    ds.inputs.push_back(std::move(in));
    ds.targets.push_back(frame.target[t]);
    ds.target_times.push_back(frame.timestamps[t]);
    ds.splits.push_back(t < b1 ? Split::train : (t < b2 ? Split::val : Split::test));
  }
  return ds;
}

// ---------------------------------------------------------------------------

TimeSeriesFrame resample_yield(const TimeSeriesFrame& env_hourly,
                               const TimeSeriesFrame& yield_weekly) {
  if (yield_weekly.rows() < 2)
    throw std::invalid_argument("need at least 2 weekly yield points");
  if (yield_weekly.timestamps.front() < env_hourly.timestamps.front() ||
      yield_weekly.timestamps.back() > env_hourly.timestamps.back())
    throw std::invalid_argument("yield timestamps outside env series span");

  constexpr std::int64_t kDay = 86400;
  std::int64_t first_day = yield_weekly.timestamps.front() / kDay;
  std::int64_t last_day = yield_weekly.timestamps.back() / kDay;

  // Per-day sums of the hourly environment channels.
  std::map<std::int64_t, std::pair<std::vector<double>, std::size_t>> day_env;
  for (std::size_t i = 0; i < env_hourly.rows(); ++i) {
    std::int64_t day = env_hourly.timestamps[i] / kDay;
    auto& [sums, n] = day_env[day];
    if (sums.empty()) sums.assign(env_hourly.channel_count(), 0.0);
    for (std::size_t c = 0; c < env_hourly.channel_count(); ++c)
      sums[c] += env_hourly.channels[c][i];
    ++n;
  }

  TimeSeriesFrame out;
  out.channel_names = env_hourly.channel_names;
  out.channels.resize(env_hourly.channel_count());
  out.target_name = yield_weekly.target_name;

  std::size_t wk = 0;
  for (std::int64_t day = first_day; day <= last_day; ++day) {
    std::int64_t ts = day * kDay;
    auto it = day_env.find(day);
    if (it == day_env.end()) continue;  // no environmental coverage that day
    while (wk + 1 < yield_weekly.rows() - 1 &&
           yield_weekly.timestamps[wk + 1] < ts)
      ++wk;
    std::int64_t t0 = yield_weekly.timestamps[wk];
    std::int64_t t1 = yield_weekly.timestamps[wk + 1];
    double frac = t1 == t0 ? 0.0
                           : static_cast<double>(ts - t0) /
                                 static_cast<double>(t1 - t0);
    frac = std::clamp(frac, 0.0, 1.0);
    double y = yield_weekly.target[wk] +
               frac * (yield_weekly.target[wk + 1] - yield_weekly.target[wk]);
    out.timestamps.push_back(ts);
    out.target.push_back(y);
    for (std::size_t c = 0; c < out.channels.size(); ++c)
      out.channels[c].push_back(it->second.first[c] /
                                static_cast<double>(it->second.second));
  }
  out.validate();
  return out;
}

}  // namespace foodchain
