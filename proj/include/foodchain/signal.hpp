#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "foodchain/time_series.hpp"

namespace foodchain {

// ---------------------------------------------------------------------------
// Min-max normalization

/// Per-channel min/max fitted on the training split only. The target column
/// is normalized with the same scheme as the inputs.
struct NormalizerState {
  std::vector<double> mins;  // channels..., target last
  std::vector<double> maxs;
  std::vector<std::string> warnings;

  double normalize(std::size_t col, double x) const;
  double denormalize(std::size_t col, double x) const;
  std::size_t target_col() const { return mins.size() - 1; }
};

/// Fits min/max on the leading train_fraction of rows and maps every column
/// (channels and target) through (x - min) / (max - min). Constant columns
/// map to all-zeros with a recorded warning.
std::pair<TimeSeriesFrame, NormalizerState> fit_apply_minmax(
    const TimeSeriesFrame& frame, double train_fraction);

// ---------------------------------------------------------------------------
// Haar wavelet denoising

/// Multi-level Haar decomposition: averages/differences with symmetric edge
/// padding for odd lengths. details[0] is the finest scale.
struct HaarPyramid {
  std::vector<double> approx;
  std::vector<std::vector<double>> details;
  std::vector<std::size_t> level_lengths;  // pre-padding length at each level
};

HaarPyramid haar_forward(const std::vector<double>& series, std::size_t levels);
std::vector<double> haar_inverse(const HaarPyramid& pyramid);

/// Haar transform to the stated depth, all detail coefficients zeroed,
/// inverse transform returned. Output length = input length.
std::vector<double> wavelet_denoise(const std::vector<double>& series,
                                    std::size_t levels = 1);

// ---------------------------------------------------------------------------
// Supervised window construction

enum class Split : int { train = 0, val = 1, test = 2 };

/// (input-window, horizon-target) sample pairs. Each input is a
/// window x input_dim matrix of all channels plus the past target; each
/// target is the single future target value `lead` steps after the window.
struct WindowedDataset {
  std::size_t window = 0;
  std::size_t input_dim = 0;
  std::size_t lead = 0;
  std::vector<std::vector<std::vector<double>>> inputs;  // sample, step, feat
  std::vector<double> targets;
  std::vector<Split> splits;
  std::vector<std::int64_t> target_times;

  std::vector<std::size_t> indices(Split s) const;
  std::size_t size() const { return inputs.size(); }
};

/// Maps the one/two/three-step forecast horizons to hours-ahead offsets.
std::size_t lead_hours_for(std::size_t horizon_steps);

/// Builds supervised windows; split tags (70/10/20 chronological by target
/// position) are assigned so that no training input ever contains a
/// validation- or test-period value.
WindowedDataset make_windows(const TimeSeriesFrame& frame, std::size_t window,
                             std::size_t horizon_steps,
                             std::size_t step_hours = 0);

// ---------------------------------------------------------------------------
// Yield resampling

/// Weekly yield linearly interpolated to daily resolution; each environmental
/// channel replaced by its per-day mean.
TimeSeriesFrame resample_yield(const TimeSeriesFrame& env_hourly,
                               const TimeSeriesFrame& yield_weekly);

}  // namespace foodchain
