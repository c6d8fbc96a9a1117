#include "foodchain/fridge.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace foodchain {

// ---------------------------------------------------------------------------
// Simulation

FridgeTrace simulate_trace(const FridgeSpec& spec) {
  if (!(spec.tau_s > 0.0) || !(spec.cooling_tau_s > 0.0))
    throw std::invalid_argument("thermal time constants must be > 0");
  if (!(spec.ambient_c > spec.setpoint_c))
    throw std::invalid_argument("ambient must exceed setpoint");
  if (!(spec.sample_interval_s > 0.0) || !(spec.duration_s > 0.0))
    throw std::invalid_argument("bad sampling parameters");

  Rng rng(spec.seed);
  FridgeTrace trace;
  trace.id = spec.id;
  trace.ambient_c = spec.ambient_c;
  trace.tau_s = spec.tau_s;
  trace.threshold_c = spec.threshold_c;
  trace.sample_interval_s = spec.sample_interval_s;
  trace.power_kw = spec.power_kw;

  const double dt = spec.sample_interval_s;
  const double warm_decay = std::exp(-dt / spec.tau_s);
  const double cool_decay = std::exp(-dt / spec.cooling_tau_s);
  const std::size_t steps =
      static_cast<std::size_t>(spec.duration_s / dt) + 1;

  double temp = spec.initial_c;
  bool on = temp >= spec.cycle_high_c;
  bool defrost = false;
  double defrost_started = 0.0;
  double next_defrost =
      spec.defrost_every_s > 0.0 ? spec.defrost_every_s
                                 : std::numeric_limits<double>::infinity();

  for (std::size_t i = 0; i < steps; ++i) {
    double t = static_cast<double>(i) * dt;

    if (!defrost && t >= next_defrost) {
      defrost = true;
      defrost_started = t;
      next_defrost += spec.defrost_every_s;
    }
    if (defrost) {
      on = false;
      bool breached = temp >= spec.threshold_c;
      if (breached || t - defrost_started >= spec.defrost_cap_s) {
        defrost = false;
        on = true;
      }
    } else {
      if (temp >= spec.cycle_high_c) on = true;
      if (temp <= spec.cycle_low_c) on = false;
    }

    double noise =
        spec.noise_std_c > 0.0 ? gaussian(rng, 0.0, spec.noise_std_c) : 0.0;
    trace.t_s.push_back(t);
    trace.temp_c.push_back(temp + noise);
    trace.compressor_on.push_back(on ? 1 : 0);
    trace.defrost_flag.push_back(defrost ? 1 : 0);

    // advance the state
    if (on)
      temp = spec.setpoint_c - (spec.setpoint_c - temp) * cool_decay;
    else
      temp = spec.ambient_c - (spec.ambient_c - temp) * warm_decay;

    if (spec.door_open_rate_per_h > 0.0) {
      double p = spec.door_open_rate_per_h * dt / 3600.0;
      if (uniform(rng, 0.0, 1.0) < p) temp += spec.door_open_bump_c;
    }
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Example extraction

std::vector<DefrostExample> extract_examples(const FridgeTrace& trace,
                                             double lead_s,
                                             ExtractStats* stats,
                                             double window_s,
                                             double feature_interval_s,
                                             double cap_s) {
  const double dt = trace.sample_interval_s;
  const std::size_t n = trace.t_s.size();
  std::vector<DefrostExample> out;
  ExtractStats local{};

  std::size_t stride = std::max<std::size_t>(
      1, static_cast<std::size_t>(feature_interval_s / dt));
  std::size_t window_steps =
      std::max<std::size_t>(1, static_cast<std::size_t>(window_s / feature_interval_s));

  std::size_t i = 0;
  while (i < n) {
    if (trace.compressor_on[i] != 0 || (i > 0 && trace.compressor_on[i - 1] == 0)) {
      ++i;
      continue;
    }
    // off-segment starts at i
    std::size_t seg_end = i;
    while (seg_end < n && trace.compressor_on[seg_end] == 0) ++seg_end;
    ++local.segments_seen;

    // first threshold crossing; the breach sample itself may already carry
    // the compressor-on flag, so look one sample past the segment
    std::size_t scan_end = std::min(seg_end + 1, n);
    double label = -1.0;
    for (std::size_t j = i; j < scan_end; ++j) {
      if (trace.temp_c[j] >= trace.threshold_c) {
        if (j == i) break;  // already above threshold at switch-off
        double t0 = trace.temp_c[j - 1], t1 = trace.temp_c[j];
        double frac = t1 > t0 ? (trace.threshold_c - t0) / (t1 - t0) : 0.0;
        label = trace.t_s[j - 1] + frac * dt - trace.t_s[i];
        break;
      }
    }
    if (label <= 0.0 || label > cap_s) {
      ++local.skipped_no_crossing;
      i = seg_end;
      continue;
    }

    // window ends lead_s before switch-off; missing history repeats the
    // earliest sample
    DefrostExample ex;
    ex.fridge_id = trace.id;
    ex.label_s = label;
    ex.lead_s = lead_s;
    std::ptrdiff_t end_idx =
        static_cast<std::ptrdiff_t>(i) -
        static_cast<std::ptrdiff_t>(lead_s / dt);
    for (std::size_t k = window_steps; k-- > 0;) {
      std::ptrdiff_t idx = end_idx - static_cast<std::ptrdiff_t>(k * stride);
      if (idx < 0) idx = 0;
      if (idx >= static_cast<std::ptrdiff_t>(n)) idx = static_cast<std::ptrdiff_t>(n) - 1;
      ex.window.push_back({trace.temp_c[static_cast<std::size_t>(idx)],
                           static_cast<double>(
                               trace.compressor_on[static_cast<std::size_t>(idx)])});
    }
    out.push_back(std::move(ex));
    i = seg_end;
  }
  if (local.segments_seen == 0 || out.empty()) {
    // acceptable: caller sees zero examples plus the skip counts
  }
  if (stats) *stats = local;
  return out;
}

// ---------------------------------------------------------------------------
// Predictor

double DefrostPredictor::predict_seconds(
    const std::vector<std::vector<double>>& window) const {
  Seq xs;
  xs.reserve(window.size());
  for (const auto& row : window)
    xs.push_back({(row[0] - temp_offset) / temp_scale, row[1]});
  auto cache = stack.forward(xs);
  auto out = head.forward({cache.top_hidden().back()});
  return out[0][0] * label_scale;
}

void DefrostPredictor::register_params(ParamSet& ps) {
  const_cast<LstmStack&>(stack).register_params(ps, "defrost");
  head.register_params(ps, "defrost.head");
}

std::pair<DefrostPredictor, DefrostEvalReport> train_defrost_predictor(
    const std::vector<DefrostExample>& examples, const SgdConfig& config,
    const std::vector<std::size_t>& lstm_sizes) {
  config.validate();
  if (examples.empty()) throw std::invalid_argument("no defrost examples");

  // fridge-level 70/10/20 split (no fridge spans splits)
  std::vector<std::string> ids;
  for (const auto& ex : examples)
    if (std::find(ids.begin(), ids.end(), ex.fridge_id) == ids.end())
      ids.push_back(ex.fridge_id);

  std::vector<std::size_t> train_idx, val_idx, test_idx;
  if (ids.size() >= 3) {
    std::size_t b1 = std::max<std::size_t>(1, static_cast<std::size_t>(0.7 * ids.size()));
    std::size_t b2 = std::max(b1 + 1, static_cast<std::size_t>(0.8 * ids.size()));
    b2 = std::min(b2, ids.size() - 1);
    auto split_of = [&](const std::string& id) {
      std::size_t pos = static_cast<std::size_t>(
          std::find(ids.begin(), ids.end(), id) - ids.begin());
      return pos < b1 ? 0 : (pos < b2 ? 1 : 2);
    };
    for (std::size_t i = 0; i < examples.size(); ++i) {
      int s = split_of(examples[i].fridge_id);
      (s == 0 ? train_idx : s == 1 ? val_idx : test_idx).push_back(i);
    }
  } else {
    // too few fridges for a fridge-level split; fall back to example order
    std::size_t b1 = static_cast<std::size_t>(0.7 * examples.size());
    std::size_t b2 = static_cast<std::size_t>(0.8 * examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i)
      (i < b1 ? train_idx : i < b2 ? val_idx : test_idx).push_back(i);
  }
  if (train_idx.empty()) throw std::invalid_argument("no training examples");

  Rng rng(config.seed);
  DefrostPredictor model;
  model.stack = LstmStack(2, lstm_sizes, rng);
  model.head = DenseLayer(model.stack.top_size(), 1, Activation::linear, rng);

  ParamSet ps;
  model.register_params(ps);

  auto normalize_window = [&](const DefrostExample& ex) {
    Seq xs;
    xs.reserve(ex.window.size());
    for (const auto& row : ex.window)
      xs.push_back({(row[0] - model.temp_offset) / model.temp_scale, row[1]});
    return xs;
  };

  auto eval_norm = [&](std::size_t i) {
    auto cache = model.stack.forward(normalize_window(examples[i]));
    return model.head.forward({cache.top_hidden().back()})[0][0];
  };
  auto rmse_seconds = [&](const std::vector<std::size_t>& idx) {
    if (idx.empty()) return 0.0;
    double s = 0.0;
    for (std::size_t i : idx) {
      double e = eval_norm(i) * model.label_scale - examples[i].label_s;
      s += e * e;
    }
    return std::sqrt(s / static_cast<double>(idx.size()));
  };

  DefrostEvalReport report;
  Rng shuffle_rng(config.seed ^ 0x5eed5eedULL);
  double best_val = std::numeric_limits<double>::infinity();
  auto best_snap = ps.snapshot();
  auto order = train_idx;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    std::size_t done = 0;
    while (done < order.size()) {
      std::size_t bsz = std::min(config.batch_size, order.size() - done);
      double scale = 1.0 / static_cast<double>(bsz);
      for (std::size_t k = 0; k < bsz; ++k) {
        const auto& ex = examples[order[done + k]];
        Seq xs = normalize_window(ex);
        auto cache = model.stack.forward(xs);
        const Vec& h = cache.top_hidden().back();
        auto out = model.head.forward({h});
        double err = out[0][0] - ex.label_s / model.label_scale;
        if (!std::isfinite(err))
          throw std::runtime_error("defrost training diverged at epoch " +
                                   std::to_string(epoch));
        auto dh = model.head.backward({{2.0 * err * scale}}, {h}, out);
        Seq d_top(xs.size());
        d_top.back() = dh[0];
        model.stack.backward(cache, d_top);
      }
      sgd_step(ps, config);
      done += bsz;
    }
    double val = rmse_seconds(val_idx.empty() ? train_idx : val_idx);
    report.val_rmse_curve_s.push_back(val);
    if (val < best_val) {
      best_val = val;
      best_snap = ps.snapshot();
      report.best_epoch = epoch;
    }
  }
  ps.restore(best_snap);

  const auto& eval_idx = test_idx.empty() ? val_idx : test_idx;
  double s = 0.0;
  for (std::size_t i : eval_idx) {
    double pred = eval_norm(i) * model.label_scale;
    report.predictions_s.push_back(pred);
    report.truths_s.push_back(examples[i].label_s);
    double e = pred - examples[i].label_s;
    s += e * e;
  }
  report.rmse_s = eval_idx.empty()
                      ? 0.0
                      : std::sqrt(s / static_cast<double>(eval_idx.size()));
  return {std::move(model), std::move(report)};
}

// ---------------------------------------------------------------------------
// Fleet selection

FleetPlan select_fleet(const std::vector<FleetCandidate>& fridges,
                       double required_reduction_kw, double event_duration_s,
                       double safety_margin) {
  if (required_reduction_kw < 0.0)
    throw std::invalid_argument("required reduction must be >= 0");

  FleetPlan plan;
  plan.event_duration_s = event_duration_s;

  std::vector<const FleetCandidate*> eligible;
  for (const auto& f : fridges)
    if (f.predicted_safe_off_s * (1.0 - safety_margin) >= event_duration_s)
      eligible.push_back(&f);

  if (required_reduction_kw == 0.0) return plan;  // empty selection suffices

  double all_power = 0.0;
  for (const auto* f : eligible) all_power += f->power_kw;
  if (all_power < required_reduction_kw) {
    plan.feasible = false;
    plan.achievable_max_kw = all_power;
    return plan;
  }

  if (eligible.size() <= 20) {
    // exact: minimum cardinality, ties by lowest total power, then ids
    std::size_t n = eligible.size();
    std::size_t best_card = n + 1;
    double best_power = std::numeric_limits<double>::infinity();
    std::vector<std::string> best_ids;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      std::size_t card = static_cast<std::size_t>(std::popcount(mask));
      if (card > best_card) continue;
      double power = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (1u << i)) power += eligible[i]->power_kw;
      if (power + 1e-12 < required_reduction_kw) continue;
      std::vector<std::string> ids;
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (1u << i)) ids.push_back(eligible[i]->id);
      std::sort(ids.begin(), ids.end());
      if (card < best_card || (card == best_card && power < best_power) ||
          (card == best_card && power == best_power && ids < best_ids)) {
        best_card = card;
        best_power = power;
        best_ids = std::move(ids);
      }
    }
    plan.selected_ids = best_ids;
    plan.total_power_kw = best_power;
  } else {
    // greedy by descending power
    std::vector<const FleetCandidate*> sorted = eligible;
    std::sort(sorted.begin(), sorted.end(),
              [](const FleetCandidate* a, const FleetCandidate* b) {
                if (a->power_kw != b->power_kw) return a->power_kw > b->power_kw;
                return a->id < b->id;
              });
    double power = 0.0;
    for (const auto* f : sorted) {
      plan.selected_ids.push_back(f->id);
      power += f->power_kw;
      if (power >= required_reduction_kw) break;
    }
    plan.total_power_kw = power;
  }
  return plan;
}

std::string FleetPlan::to_csv(const std::vector<FleetCandidate>& fridges) const {
  std::ostringstream os;
  os << "fridge_id,predicted_safe_off_s,power_kw,selected\n";
  char buf[64];
  for (const auto& f : fridges) {
    bool sel = std::find(selected_ids.begin(), selected_ids.end(), f.id) !=
               selected_ids.end();
    std::snprintf(buf, sizeof(buf), "%.17g", f.predicted_safe_off_s);
    os << f.id << "," << buf << ",";
    std::snprintf(buf, sizeof(buf), "%.17g", f.power_kw);
    os << buf << "," << (sel ? 1 : 0) << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Trace CSV

void FridgeTrace::save_csv(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for write: " + path);
  os << "# id=" << id << " ambient_c=" << ambient_c << " tau_s=" << tau_s
     << " threshold_c=" << threshold_c << " interval_s=" << sample_interval_s
     << " power_kw=" << power_kw << "\n";
  os << "timestamp_s,temp_c,compressor,defrost_flag\n";
  char buf[64];
  for (std::size_t i = 0; i < t_s.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", t_s[i]);
    os << buf << ",";
    std::snprintf(buf, sizeof(buf), "%.17g", temp_c[i]);
    os << buf << "," << compressor_on[i] << "," << defrost_flag[i] << "\n";
  }
}

FridgeTrace FridgeTrace::load_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for read: " + path);
  FridgeTrace trace;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string kv;
      while (hs >> kv) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
        if (key == "id") trace.id = val;
        else if (key == "ambient_c") trace.ambient_c = std::stod(val);
        else if (key == "tau_s") trace.tau_s = std::stod(val);
        else if (key == "threshold_c") trace.threshold_c = std::stod(val);
        else if (key == "interval_s") trace.sample_interval_s = std::stod(val);
        else if (key == "power_kw") trace.power_kw = std::stod(val);
      }
      continue;
    }
    if (line.rfind("timestamp_s", 0) == 0) continue;
    std::istringstream ls(line);
    std::string f0, f1, f2, f3;
    if (!std::getline(ls, f0, ',') || !std::getline(ls, f1, ',') ||
        !std::getline(ls, f2, ',') || !std::getline(ls, f3))
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": bad trace row");
    trace.t_s.push_back(std::stod(f0));
    trace.temp_c.push_back(std::stod(f1));
    trace.compressor_on.push_back(std::stoi(f2));
    trace.defrost_flag.push_back(std::stoi(f3));
  }
  return trace;
}

}  // namespace foodchain
