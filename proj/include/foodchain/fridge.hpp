#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "foodchain/lstm.hpp"
#include "foodchain/mlp.hpp"
#include "foodchain/seq2seq.hpp"
#include "foodchain/sgd.hpp"

namespace foodchain {

/// First-order Newton thermal model of one refrigerator plus its duty
/// schedule. Compressor-off warming relaxes toward ambient with time
/// constant tau; compressor-on cooling relaxes toward the setpoint with
/// cooling_tau.
struct FridgeSpec {
  std::string id = "fridge";
  double tau_s = 600.0;          // warming time constant
  double cooling_tau_s = 300.0;  // cooling time constant
  double ambient_c = 20.0;
  double setpoint_c = 2.0;
  double threshold_c = 8.0;  // food-safety threshold (freezer profile: -18)
  double initial_c = 3.0;
  double noise_std_c = 0.0;  // additive Gaussian sensor noise
  double sample_interval_s = 10.0;
  double duration_s = 6.0 * 3600.0;
  double cycle_low_c = 2.0;   // thermostat band
  double cycle_high_c = 5.0;
  double defrost_every_s = 2.0 * 3600.0;  // forced off-segments
  double defrost_cap_s = 1800.0;          // max off duration (30 min)
  double door_open_rate_per_h = 0.0;      // step disturbances
  double door_open_bump_c = 1.0;
  double power_kw = 1.0;
  std::uint64_t seed = 0;
};

struct FridgeTrace {
  std::string id;
  std::vector<double> t_s;
  std::vector<double> temp_c;
  std::vector<int> compressor_on;
  std::vector<int> defrost_flag;
  double ambient_c = 0.0;
  double tau_s = 0.0;
  double threshold_c = 8.0;
  double sample_interval_s = 10.0;
  double power_kw = 1.0;

  void save_csv(const std::string& path) const;
  static FridgeTrace load_csv(const std::string& path);
};

/// Deterministic synthetic trace (same seed, same trace).
FridgeTrace simulate_trace(const FridgeSpec& spec);

/// One supervised defrost example: the feature window preceding switch-off
/// and the seconds until the safety threshold is breached.
struct DefrostExample {
  std::string fridge_id;
  std::vector<std::vector<double>> window;  // steps x {temp_c, compressor}
  double label_s = 0.0;
  double lead_s = 0.0;
};

struct ExtractStats {
  std::size_t segments_seen = 0;
  std::size_t skipped_no_crossing = 0;
};

/// For every compressor-off segment crossing the threshold, the label is the
/// time from switch-off to the first crossing (linearly interpolated); the
/// input window ends `lead_s` seconds before switch-off and spans
/// `window_s` seconds at `feature_interval_s` resolution.
std::vector<DefrostExample> extract_examples(const FridgeTrace& trace,
                                             double lead_s,
                                             ExtractStats* stats = nullptr,
                                             double window_s = 1800.0,
                                             double feature_interval_s = 60.0,
                                             double cap_s = 1800.0);

/// Two-layer-LSTM safe-off-duration regressor.
struct DefrostPredictor {
  LstmStack stack;
  DenseLayer head;
  double temp_scale = 30.0;  // feature/label normalization constants
  double temp_offset = 0.0;
  double label_scale = 1800.0;

  double predict_seconds(const std::vector<std::vector<double>>& window) const;
  void register_params(ParamSet& ps);
};

struct DefrostEvalReport {
  double rmse_s = 0.0;
  std::vector<double> predictions_s;
  std::vector<double> truths_s;
  std::vector<double> val_rmse_curve_s;
  std::size_t best_epoch = 0;
};

/// Trains on a 70/10/20 fridge-level split (no fridge spans splits).
std::pair<DefrostPredictor, DefrostEvalReport> train_defrost_predictor(
    const std::vector<DefrostExample>& examples, const SgdConfig& config,
    const std::vector<std::size_t>& lstm_sizes = {16, 8});

// ---------------------------------------------------------------------------
// Fleet selection

struct FleetCandidate {
  std::string id;
  double predicted_safe_off_s = 0.0;
  double power_kw = 0.0;
};

struct FleetPlan {
  bool feasible = true;
  std::vector<std::string> selected_ids;
  double total_power_kw = 0.0;
  double achievable_max_kw = 0.0;  // filled when infeasible
  double event_duration_s = 0.0;

  std::string to_csv(const std::vector<FleetCandidate>& fridges) const;
};

/// Minimum-cardinality subset of eligible fridges whose power sum meets the
/// requirement. Eligibility: predicted safe-off x (1 - safety_margin) >=
/// event duration. Exact search up to 20 eligible fridges (ties broken by
/// lowest total power, then lexicographic ids), greedy by descending power
/// beyond that.
FleetPlan select_fleet(const std::vector<FleetCandidate>& fridges,
                       double required_reduction_kw, double event_duration_s,
                       double safety_margin = 0.10);

}  // namespace foodchain
