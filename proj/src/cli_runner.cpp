#include "foodchain/cli_runner.hpp"

#include <sys/stat.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "foodchain/clustering.hpp"
#include "foodchain/domain_adapt.hpp"
#include "foodchain/fridge.hpp"
#include "foodchain/registry.hpp"
#include "foodchain/seq2seq.hpp"
#include "foodchain/synth.hpp"
#include "foodchain/time_series.hpp"

namespace foodchain {

namespace {

constexpr const char* kVersion = "1.0.0";

struct BadInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct Infeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void make_dir(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw std::runtime_error("cannot create directory: " + path);
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write: " + path);
  os << body;
  if (!os) throw std::runtime_error("short write: " + path);
}

void write_manifest(const Config& cfg, const std::string& subcommand) {
  std::ostringstream os;
  os << "subcommand=" << subcommand << "\n";
  os << "version=" << kVersion << "\n";
  os << "fingerprint=" << cfg.fingerprint() << "\n";
  for (const auto& [k, v] : cfg.entries()) os << k << "=" << v << "\n";
  write_text(cfg.get("run.out") + "/manifest.txt", os.str());
}

TimeSeriesFrame load_or_synth_frame(const Config& cfg) {
  std::string input = cfg.get("run.input");
  if (input.empty())
    return synth_greenhouse(static_cast<std::size_t>(cfg.get_int("synth.rows")),
                            cfg.get_u64("run.seed"));
  try {
    return read_frame_csv(input);
  } catch (const std::exception& e) {
    throw BadInput(e.what());
  }
}

ForecasterConfig forecaster_config(const Config& cfg) {
  ForecasterConfig fc;
  fc.encoder_sizes = cfg.get_sizes("forecast.encoder_sizes");
  fc.predictor_sizes = cfg.get_sizes("forecast.predictor_sizes");
  fc.attention_align = static_cast<std::size_t>(cfg.get_int("forecast.attention_align"));
  fc.mlp_hidden = cfg.get_sizes("forecast.mlp_hidden");
  fc.window = static_cast<std::size_t>(cfg.get_int("forecast.window"));
  fc.horizon_steps = static_cast<std::size_t>(cfg.get_int("forecast.horizon"));
  fc.wavelet_levels = static_cast<std::size_t>(cfg.get_int("forecast.wavelet_levels"));
  fc.pretrain_epochs = static_cast<std::size_t>(cfg.get_int("forecast.pretrain_epochs"));
  fc.sgd.learning_rate = cfg.get_double("train.lr");
  fc.sgd.batch_size = static_cast<std::size_t>(cfg.get_int("train.batch"));
  fc.sgd.epochs = static_cast<std::size_t>(cfg.get_int("train.epochs"));
  fc.sgd.clip_norm = cfg.get_double("train.clip");
  fc.sgd.seed = cfg.get_u64("run.seed");

  std::string variant = cfg.get("forecast.variant");
  if (variant == "WT-ED-LSTM-AM") {
  } else if (variant == "WT-ED-LSTM") {
    fc.use_attention = false;
  } else if (variant == "ED-LSTM-AM") {
    fc.use_wavelet = false;
  } else if (variant == "LSTM") {
    fc.use_wavelet = fc.use_attention = fc.use_encoder = false;
    fc.predictor_sizes = fc.encoder_sizes;
  } else if (variant == "MLP") {
    fc.use_wavelet = fc.use_attention = fc.use_encoder = false;
  } else {
    throw std::invalid_argument("unknown forecast.variant: " + variant);
  }
  return fc;
}

std::string eval_csv(const EvalReport& r) {
  std::ostringstream os;
  os << "timestamp,truth,prediction\n";
  for (std::size_t i = 0; i < r.predictions.size(); ++i)
    os << format_iso8601(r.times[i]) << "," << fmt(r.truths[i]) << ","
       << fmt(r.predictions[i]) << "\n";
  return os.str();
}

std::string curves_csv(const EvalReport& r) {
  std::ostringstream os;
  os << "epoch,train_loss,val_rmse\n";
  for (std::size_t e = 0; e < r.val_rmse_curve.size(); ++e) {
    double tl = e < r.train_loss_curve.size() ? r.train_loss_curve[e] : 0.0;
    os << e << "," << fmt(tl) << "," << fmt(r.val_rmse_curve[e]) << "\n";
  }
  return os.str();
}

// -------------------------------------------------------------------------
// subcommands

int cmd_ingest(const Config& cfg, std::ostream& out) {
  TimeSeriesFrame frame = load_or_synth_frame(cfg);
  try {
    frame.validate();
  } catch (const std::exception& e) {
    throw BadInput(e.what());
  }
  std::string dir = cfg.get("run.out");
  write_frame_csv(frame, dir + "/ingested.csv");
  auto [norm_frame, norm] = fit_apply_minmax(frame, 0.7);
  write_frame_csv(norm_frame, dir + "/normalized.csv");
  std::ostringstream warn;
  for (const auto& w : norm.warnings) warn << w << "\n";
  write_text(dir + "/ingest_warnings.txt", warn.str());
  out << "ingested rows=" << frame.timestamps.size()
      << " channels=" << frame.channel_names.size()
      << " warnings=" << norm.warnings.size() << "\n";
  return kExitOk;
}

std::string model_card(const ForecasterConfig& fc, const std::string& variant,
                       std::size_t input_dim, const NormalizerState& norm) {
  std::ostringstream os;
  os << "variant=" << variant << "\n";
  os << "input_dim=" << input_dim << "\n";
  os << "window=" << fc.window << "\n";
  os << "horizon=" << fc.horizon_steps << "\n";
  auto join = [](const std::vector<std::size_t>& v) {
    std::ostringstream s;
    for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
    return s.str();
  };
  os << "encoder_sizes=" << join(fc.encoder_sizes) << "\n";
  os << "predictor_sizes=" << join(fc.predictor_sizes) << "\n";
  os << "attention_align=" << fc.attention_align << "\n";
  os << "wavelet_levels=" << fc.wavelet_levels << "\n";
  os << "seed=" << fc.sgd.seed << "\n";
  os << "fingerprint=" << fc.fingerprint() << "\n";
  auto join_d = [](const std::vector<double>& v) {
    std::ostringstream s;
    for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << fmt(v[i]);
    return s.str();
  };
  os << "norm_mins=" << join_d(norm.mins) << "\n";
  os << "norm_maxs=" << join_d(norm.maxs) << "\n";
  return os.str();
}

std::map<std::string, std::string> read_card(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw BadInput("cannot open model card: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(is, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::vector<std::size_t> parse_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ','))
    if (!tok.empty()) out.push_back(static_cast<std::size_t>(std::stoull(tok)));
  return out;
}

int cmd_train(const Config& cfg, std::ostream& out) {
  TimeSeriesFrame frame = load_or_synth_frame(cfg);
  ForecasterConfig fc = forecaster_config(cfg);
  std::string variant = cfg.get("forecast.variant");
  std::string dir = cfg.get("run.out");

  NormalizerState norm;
  build_forecast_dataset(frame, fc, &norm);  // for the card only

  EvalReport report;
  if (variant == "MLP") {
    report = train_mlp_baseline(fc, frame);
    write_text(dir + "/model.card", model_card(fc, variant,
                                               fc.window * (frame.channels.size() + 1),
                                               norm));
  } else {
    auto [model, rep] = train_forecaster(fc, frame);
    report = std::move(rep);
    ParamSet ps;
    model->register_params(ps, /*include_frozen_encoder=*/true);
    ps.save_file(dir + "/model.fcps");
    write_text(dir + "/model.card",
               model_card(fc, variant, frame.channels.size() + 1, norm));
  }
  write_text(dir + "/eval.csv", eval_csv(report));
  write_text(dir + "/curves.csv", curves_csv(report));

  std::string registry = cfg.get("registry.root");
  if (!registry.empty() && variant != "MLP") {
    double best_val = report.val_rmse_curve.empty()
                          ? report.rmse
                          : report.val_rmse_curve[report.best_epoch];
    auto entry = registry_publish(registry, "forecaster-" + variant,
                                  dir + "/model.fcps", best_val,
                                  report.config_fingerprint);
    out << "registry sequence=" << entry.sequence << "\n";
  }
  out << "variant=" << variant << " horizon=" << fc.horizon_steps
      << " test_rmse=" << fmt(report.rmse) << " best_epoch=" << report.best_epoch
      << "\n";
  return kExitOk;
}

int cmd_forecast(const Config& cfg, std::ostream& out) {
  std::string dir = cfg.get("run.out");
  std::string model_dir = cfg.get("run.input");
  if (model_dir.empty())
    throw std::invalid_argument(
        "forecast needs run.input = directory holding model.card/model.fcps");
  auto card = read_card(model_dir + "/model.card");
  if (card["variant"] == "MLP")
    throw std::invalid_argument("forecast does not support the MLP baseline");

  ForecasterConfig fc;
  fc.window = std::stoull(card["window"]);
  fc.horizon_steps = std::stoull(card["horizon"]);
  fc.encoder_sizes = parse_sizes(card["encoder_sizes"]);
  fc.predictor_sizes = parse_sizes(card["predictor_sizes"]);
  fc.attention_align = std::stoull(card["attention_align"]);
  fc.wavelet_levels = std::stoull(card["wavelet_levels"]);
  fc.sgd.seed = std::stoull(card["seed"]);
  std::string variant = card["variant"];
  if (variant == "WT-ED-LSTM") fc.use_attention = false;
  if (variant == "ED-LSTM-AM") fc.use_wavelet = false;
  if (variant == "LSTM")
    fc.use_wavelet = fc.use_attention = fc.use_encoder = false;

  std::size_t input_dim = std::stoull(card["input_dim"]);
  Rng rng(fc.sgd.seed);
  Forecaster model(fc, input_dim, rng);
  ParamSet ps;
  model.register_params(ps, /*include_frozen_encoder=*/true);
  try {
    ps.load_from_file(model_dir + "/model.fcps");
  } catch (const std::exception& e) {
    throw BadInput(e.what());
  }

  // fresh data goes through the same preprocessing wiring
  std::string data = cfg.get("forecast.data");
  TimeSeriesFrame frame;
  if (data.empty()) {
    frame = synth_greenhouse(
        static_cast<std::size_t>(cfg.get_int("synth.rows")),
        cfg.get_u64("run.seed"));
  } else {
    try {
      frame = read_frame_csv(data);
    } catch (const std::exception& e) {
      throw BadInput(e.what());
    }
  }
  NormalizerState norm;
  WindowedDataset ds = build_forecast_dataset(frame, fc, &norm);

  std::ostringstream os;
  os << "timestamp,truth,prediction\n";
  std::size_t tcol = norm.target_col();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    double pred = model.forward(ds.inputs[i]);
    os << format_iso8601(ds.target_times[i]) << ","
       << fmt(norm.denormalize(tcol, ds.targets[i])) << ","
       << fmt(norm.denormalize(tcol, pred)) << "\n";
  }
  write_text(dir + "/predictions.csv", os.str());
  out << "predicted samples=" << ds.size() << "\n";
  return kExitOk;
}

int cmd_ablate(const Config& cfg, std::ostream& out) {
  TimeSeriesFrame frame = load_or_synth_frame(cfg);
  ForecasterConfig base = forecaster_config(cfg);
  AblationReport report = ablate(frame, {1, 2, 3}, base);
  std::string dir = cfg.get("run.out");
  write_text(dir + "/ablation.csv", report.to_csv());
  write_text(dir + "/ablation.txt", report.to_text());
  out << report.to_text();
  return kExitOk;
}

std::vector<LatentVector> load_latents(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw BadInput("cannot open: " + path);
  std::vector<LatentVector> vectors;
  std::string line;
  std::size_t lineno = 0;
  bool header = true;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (header) {  // header row: feature names..., label
      header = false;
      continue;
    }
    std::istringstream ls(line);
    std::string tok;
    std::vector<double> row;
    while (std::getline(ls, tok, ',')) {
      try {
        row.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw BadInput(path + ":" + std::to_string(lineno) + ": bad number");
      }
    }
    if (row.size() < 2)
      throw BadInput(path + ":" + std::to_string(lineno) + ": too few columns");
    LatentVector v;
    v.label = static_cast<int>(row.back());
    row.pop_back();
    v.values = std::move(row);
    vectors.push_back(std::move(v));
  }
  if (vectors.empty()) throw BadInput(path + ": no data rows");
  return vectors;
}

int cmd_cluster(const Config& cfg, std::ostream& out) {
  std::vector<LatentVector> vectors;
  std::string input = cfg.get("run.input");
  if (input.empty()) {
    std::vector<std::vector<double>> feats;
    std::vector<std::size_t> labels;
    synth_two_moons(600, 0.0, cfg.get_double("adapt.noise"),
                    cfg.get_u64("run.seed"), &feats, &labels);
    for (std::size_t i = 0; i < feats.size(); ++i)
      vectors.push_back({feats[i], static_cast<int>(labels[i]), "synth"});
  } else {
    vectors = load_latents(input);
  }

  double val_frac = cfg.get_double("cluster.val_fraction");
  std::size_t split = static_cast<std::size_t>(
      static_cast<double>(vectors.size()) * (1.0 - val_frac));
  if (split == 0 || split >= vectors.size())
    throw std::invalid_argument("cluster.val_fraction leaves an empty split");
  std::vector<LatentVector> train(vectors.begin(), vectors.begin() + split);
  std::vector<LatentVector> val(vectors.begin() + split, vectors.end());

  std::size_t k = static_cast<std::size_t>(cfg.get_int("cluster.k"));
  std::vector<double> cost_trace;
  CentroidSet initial = kmeans_fit(train, k, cfg.get_u64("run.seed"), &cost_trace);
  auto [pruned, trace] = prune_adapt(initial, val);

  std::string dir = cfg.get("run.out");
  initial.save_file(dir + "/centroids.fccs");
  pruned.save_file(dir + "/pruned.fccs");
  write_text(dir + "/prune_trace.csv", trace.to_csv());
  std::ostringstream costs;
  costs << "iteration,cost\n";
  for (std::size_t i = 0; i < cost_trace.size(); ++i)
    costs << i << "," << fmt(cost_trace[i]) << "\n";
  write_text(dir + "/kmeans_cost.csv", costs.str());
  out << "centroids=" << initial.size() << " pruned=" << pruned.size()
      << " val_accuracy_before=" << fmt(trace.steps.front().accuracy)
      << " val_accuracy_after=" << fmt(trace.steps.back().accuracy) << "\n";
  return kExitOk;
}

int cmd_adapt(const Config& cfg, std::ostream& out) {
  std::size_t n_sources = static_cast<std::size_t>(cfg.get_int("adapt.sources"));
  std::size_t n = static_cast<std::size_t>(cfg.get_int("adapt.samples"));
  double step_deg = cfg.get_double("adapt.rotation_deg");
  double noise = cfg.get_double("adapt.noise");
  std::uint64_t seed = cfg.get_u64("run.seed");

  std::vector<LabeledDataset> sources;
  for (std::size_t s = 0; s < n_sources; ++s) {
    std::vector<std::vector<double>> feats;
    std::vector<std::size_t> labels;
    synth_two_moons(n, step_deg * static_cast<double>(s), noise,
                    seed * 7919ULL + s, &feats, &labels);
    LabeledDataset d;
    d.features = std::move(feats);
    for (auto l : labels) d.labels.push_back(static_cast<int>(l));
    d.domain = "rot" + std::to_string(static_cast<int>(step_deg * s));
    sources.push_back(std::move(d));
  }
  std::vector<std::vector<double>> target_feats;
  std::vector<std::size_t> target_labels_raw;
  synth_two_moons(n, step_deg * static_cast<double>(n_sources), noise,
                  seed * 7919ULL + n_sources, &target_feats, &target_labels_raw);
  std::vector<int> target_labels(target_labels_raw.begin(),
                                 target_labels_raw.end());

  AdaptConfig ac;
  ac.trunk_sizes = cfg.get_sizes("adapt.trunk");
  ac.branch_sizes = cfg.get_sizes("adapt.branch");
  ac.class_count = static_cast<std::size_t>(cfg.get_int("adapt.classes"));
  ac.sgd.learning_rate = cfg.get_double("train.lr");
  ac.sgd.batch_size = static_cast<std::size_t>(cfg.get_int("train.batch"));
  ac.sgd.epochs = static_cast<std::size_t>(cfg.get_int("train.epochs"));
  ac.sgd.clip_norm = cfg.get_double("train.clip");
  ac.sgd.seed = seed;

  MultiSourceResult result =
      train_multisource(sources, target_feats, target_labels, ac);

  std::string dir = cfg.get("run.out");
  write_text(dir + "/adapt_losses.csv", result.loss_curve_csv());
  std::ostringstream rep;
  rep << "sources=" << n_sources << "\n";
  rep << "target_accuracy=" << fmt(result.target_accuracy) << "\n";
  write_text(dir + "/adapt_report.txt", rep.str());
  out << "target_accuracy=" << fmt(result.target_accuracy) << "\n";
  return kExitOk;
}

int cmd_fridge_sim(const Config& cfg, std::ostream& out) {
  std::size_t count = static_cast<std::size_t>(cfg.get_int("fridge.count"));
  auto fleet = synth_fleet(count, cfg.get_u64("run.seed"));
  double duration = cfg.get_double("fridge.duration_s");
  std::string dir = cfg.get("run.out");
  make_dir(dir + "/traces");
  std::ostringstream idx;
  idx << "fridge_id,tau_s,ambient_c,threshold_c,power_kw\n";
  for (auto& spec : fleet) {
    spec.duration_s = duration;
    FridgeTrace trace = simulate_trace(spec);
    trace.save_csv(dir + "/traces/" + spec.id + ".csv");
    idx << spec.id << "," << fmt(spec.tau_s) << "," << fmt(spec.ambient_c)
        << "," << fmt(spec.threshold_c) << "," << fmt(spec.power_kw) << "\n";
  }
  write_text(dir + "/fleet.csv", idx.str());
  out << "simulated fridges=" << fleet.size() << "\n";
  return kExitOk;
}

std::vector<FridgeTrace> load_traces(const Config& cfg) {
  std::string input = cfg.get("run.input");
  std::vector<FridgeTrace> traces;
  if (input.empty()) {
    auto fleet = synth_fleet(static_cast<std::size_t>(cfg.get_int("fridge.count")),
                             cfg.get_u64("run.seed"));
    double duration = cfg.get_double("fridge.duration_s");
    for (auto& spec : fleet) {
      spec.duration_s = duration;
      traces.push_back(simulate_trace(spec));
    }
    return traces;
  }
  // input is the fleet.csv written by fridge-sim; traces sit alongside it
  std::ifstream is(input);
  if (!is) throw BadInput("cannot open: " + input);
  std::string base = input.substr(0, input.find_last_of('/') + 1);
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::string id = line.substr(0, line.find(','));
    try {
      traces.push_back(FridgeTrace::load_csv(base + "traces/" + id + ".csv"));
    } catch (const std::exception& e) {
      throw BadInput(e.what());
    }
  }
  if (traces.empty()) throw BadInput(input + ": no fleet rows");
  return traces;
}

int cmd_fridge_train(const Config& cfg, std::ostream& out) {
  auto traces = load_traces(cfg);
  double lead_s = cfg.get_double("fridge.lead_s");

  std::vector<DefrostExample> examples;
  ExtractStats total{};
  for (const auto& trace : traces) {
    ExtractStats stats{};
    auto ex = extract_examples(trace, lead_s, &stats);
    examples.insert(examples.end(), ex.begin(), ex.end());
    total.segments_seen += stats.segments_seen;
    total.skipped_no_crossing += stats.skipped_no_crossing;
  }
  if (examples.empty()) throw BadInput("no usable defrost segments in traces");

  SgdConfig sgd;
  sgd.learning_rate = cfg.get_double("train.lr");
  sgd.batch_size = static_cast<std::size_t>(cfg.get_int("train.batch"));
  sgd.epochs = static_cast<std::size_t>(cfg.get_int("train.epochs"));
  sgd.clip_norm = cfg.get_double("train.clip");
  sgd.seed = cfg.get_u64("run.seed");
  auto [model, report] = train_defrost_predictor(examples, sgd,
                                                 cfg.get_sizes("fridge.lstm_sizes"));

  std::string dir = cfg.get("run.out");
  ParamSet ps;
  model.register_params(ps);
  ps.save_file(dir + "/defrost.fcps");

  std::ostringstream rep;
  rep << "prediction_s,truth_s\n";
  for (std::size_t i = 0; i < report.predictions_s.size(); ++i)
    rep << fmt(report.predictions_s[i]) << "," << fmt(report.truths_s[i]) << "\n";
  write_text(dir + "/defrost_eval.csv", rep.str());

  // per-fridge safe-off prediction from the latest window in each trace
  std::ostringstream cand;
  cand << "fridge_id,predicted_safe_off_s,power_kw\n";
  for (const auto& trace : traces) {
    std::vector<std::vector<double>> window;
    std::size_t stride = std::max<std::size_t>(
        1, static_cast<std::size_t>(60.0 / trace.sample_interval_s));
    std::size_t steps = 30;
    std::size_t n = trace.temp_c.size();
    for (std::size_t k = steps; k-- > 0;) {
      std::size_t idx = n > 1 + k * stride ? n - 1 - k * stride : 0;
      window.push_back({trace.temp_c[idx],
                        static_cast<double>(trace.compressor_on[idx])});
    }
    double pred = std::max(0.0, model.predict_seconds(window));
    cand << trace.id << "," << fmt(pred) << "," << fmt(trace.power_kw) << "\n";
  }
  write_text(dir + "/candidates.csv", cand.str());
  out << "examples=" << examples.size() << " segments=" << total.segments_seen
      << " skipped=" << total.skipped_no_crossing
      << " test_rmse_s=" << fmt(report.rmse_s) << "\n";
  return kExitOk;
}

int cmd_fridge_select(const Config& cfg, std::ostream& out) {
  std::string input = cfg.get("run.input");
  if (input.empty())
    throw std::invalid_argument(
        "fridge-select needs run.input = candidates.csv from fridge-train");
  std::ifstream is(input);
  if (!is) throw BadInput("cannot open: " + input);

  std::vector<FleetCandidate> fridges;
  std::string line;
  bool header = true;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream ls(line);
    std::string id, off, power;
    if (!std::getline(ls, id, ',') || !std::getline(ls, off, ',') ||
        !std::getline(ls, power))
      throw BadInput(input + ":" + std::to_string(lineno) + ": bad row");
    try {
      fridges.push_back({id, std::stod(off), std::stod(power)});
    } catch (const std::exception&) {
      throw BadInput(input + ":" + std::to_string(lineno) + ": bad number");
    }
  }

  double required = cfg.get_double("fridge.required_kw");
  double event_s = cfg.get_double("fridge.event_s");
  double margin = cfg.get_double("fridge.margin");
  FleetPlan plan = select_fleet(fridges, required, event_s, margin);
  write_text(cfg.get("run.out") + "/plan.csv", plan.to_csv(fridges));
  if (!plan.feasible)
    throw Infeasible("fleet cannot shed " + fmt(required) +
                     " kW; achievable maximum is " + fmt(plan.achievable_max_kw) +
                     " kW");
  out << "selected=" << plan.selected_ids.size()
      << " total_kw=" << fmt(plan.total_power_kw) << "\n";
  return kExitOk;
}

int cmd_report(const Config& cfg, std::ostream& out) {
  std::string input = cfg.get("run.input");
  if (input.empty())
    throw std::invalid_argument(
        "report needs run.input = eval/predictions CSV (timestamp,truth,prediction)");
  std::ifstream is(input);
  if (!is) throw BadInput("cannot open: " + input);

  std::vector<std::string> times;
  std::vector<double> truth, pred;
  std::string line;
  bool header = true;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream ls(line);
    std::string t, a, b;
    if (!std::getline(ls, t, ',') || !std::getline(ls, a, ',') ||
        !std::getline(ls, b))
      throw BadInput(input + ":" + std::to_string(lineno) + ": bad row");
    try {
      times.push_back(t);
      truth.push_back(std::stod(a));
      pred.push_back(std::stod(b));
    } catch (const std::exception&) {
      throw BadInput(input + ":" + std::to_string(lineno) + ": bad number");
    }
  }
  if (truth.empty()) throw BadInput(input + ": no data rows");

  // overlay CSV plus a simple SVG line chart, truth vs prediction
  std::ostringstream csv;
  csv << "timestamp,truth,prediction\n";
  for (std::size_t i = 0; i < truth.size(); ++i)
    csv << times[i] << "," << fmt(truth[i]) << "," << fmt(pred[i]) << "\n";
  std::string dir = cfg.get("run.out");
  write_text(dir + "/overlay.csv", csv.str());

  double lo = truth[0], hi = truth[0];
  for (double v : truth) lo = std::min(lo, v), hi = std::max(hi, v);
  for (double v : pred) lo = std::min(lo, v), hi = std::max(hi, v);
  if (hi <= lo) hi = lo + 1.0;
  const double w = 960.0, h = 360.0, pad = 24.0;
  auto x_of = [&](std::size_t i) {
    return pad + (w - 2 * pad) * static_cast<double>(i) /
                     static_cast<double>(std::max<std::size_t>(1, truth.size() - 1));
  };
  auto y_of = [&](double v) {
    return h - pad - (h - 2 * pad) * (v - lo) / (hi - lo);
  };
  auto polyline = [&](const std::vector<double>& ys, const char* color) {
    std::ostringstream p;
    p << "  <polyline fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < ys.size(); ++i) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", x_of(i), y_of(ys[i]));
      p << buf;
    }
    p << "\"/>\n";
    return p.str();
  };
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  svg << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << polyline(truth, "#1f77b4");
  svg << polyline(pred, "#d62728");
  svg << "  <text x=\"" << pad << "\" y=\"16\" font-size=\"12\">truth (blue) "
         "vs prediction (red), n=" << truth.size() << "</text>\n";
  svg << "</svg>\n";
  write_text(dir + "/overlay.svg", svg.str());
  out << "report rows=" << truth.size() << "\n";
  return kExitOk;
}

}  // namespace

const char* runner_version() { return kVersion; }

int run_command(const std::string& subcommand, const Config& cfg,
                std::ostream& out, std::ostream& err) {
  int code = kExitInternal;
  std::string message;
  try {
    make_dir(cfg.get("run.out"));
    if (subcommand == "ingest") code = cmd_ingest(cfg, out);
    else if (subcommand == "train") code = cmd_train(cfg, out);
    else if (subcommand == "forecast") code = cmd_forecast(cfg, out);
    else if (subcommand == "ablate") code = cmd_ablate(cfg, out);
    else if (subcommand == "cluster") code = cmd_cluster(cfg, out);
    else if (subcommand == "adapt") code = cmd_adapt(cfg, out);
    else if (subcommand == "fridge-sim") code = cmd_fridge_sim(cfg, out);
    else if (subcommand == "fridge-train") code = cmd_fridge_train(cfg, out);
    else if (subcommand == "fridge-select") code = cmd_fridge_select(cfg, out);
    else if (subcommand == "report") code = cmd_report(cfg, out);
    else {
      err << "error " << kExitUsage << " unknown subcommand: " << subcommand
          << "\n";
      return kExitUsage;
    }
    write_manifest(cfg, subcommand);
    return code;
  } catch (const Infeasible& e) {
    code = kExitInfeasible;
    message = e.what();
    // the plan artifact and manifest are still useful on infeasibility
    try {
      write_manifest(cfg, subcommand);
    } catch (...) {
    }
  } catch (const BadInput& e) {
    code = kExitBadInput;
    message = e.what();
  } catch (const std::invalid_argument& e) {
    code = kExitUsage;
    message = e.what();
  } catch (const std::out_of_range& e) {
    code = kExitUsage;
    message = e.what();
  } catch (const std::exception& e) {
    code = kExitInternal;
    message = e.what();
  }
  for (char& c : message)
    if (c == '\n') c = ' ';
  err << "error " << code << " " << message << "\n";
  return code;
}

}  // namespace foodchain
