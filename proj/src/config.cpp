#include "foodchain/config.hpp"

#include <zlib.h>

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace foodchain {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

const std::vector<Config::KeySpec>& Config::key_table() {
  static const std::vector<KeySpec> table = {
      {"run.profile", "desk", "paper", "hyperparameter profile"},
      {"run.seed", "0", nullptr, "master RNG seed"},
      {"run.out", "out", nullptr, "artifact output directory"},
      {"run.input", "", nullptr, "input CSV path; empty = bundled synthetic"},
      {"train.epochs", "30", "100", "SGD epochs"},
      {"train.lr", "0.001", nullptr, "SGD learning rate"},
      {"train.batch", "32", nullptr, "minibatch size"},
      {"train.clip", "5", nullptr, "global gradient-norm clip"},
      {"forecast.data", "", nullptr,
       "CSV to forecast on; empty = bundled synthetic"},
      {"forecast.variant", "WT-ED-LSTM-AM", nullptr,
       "MLP | LSTM | WT-ED-LSTM | ED-LSTM-AM | WT-ED-LSTM-AM"},
      {"forecast.window", "15", nullptr, "input window length (steps)"},
      {"forecast.horizon", "1", nullptr, "forecast horizon (1|2|3 steps)"},
      {"forecast.encoder_sizes", "16,8", "128,32", "encoder LSTM widths"},
      {"forecast.predictor_sizes", "16", "128", "predictor LSTM widths"},
      {"forecast.attention_align", "8", "32", "attention alignment width"},
      {"forecast.mlp_hidden", "16,16", "64,64", "MLP baseline hidden widths"},
      {"forecast.wavelet_levels", "1", nullptr, "wavelet decomposition depth"},
      {"forecast.pretrain_epochs", "5", "10", "autoencoder pretrain epochs"},
      {"synth.rows", "5000", nullptr, "bundled synthetic series length"},
      {"cluster.k", "8", "14", "initial centroid count"},
      {"cluster.val_fraction", "0.3", nullptr, "validation share for pruning"},
      {"adapt.trunk", "32", "256,64", "shared trunk hidden widths"},
      {"adapt.branch", "16", "64", "per-source branch hidden widths"},
      {"adapt.classes", "2", nullptr, "class count"},
      {"adapt.sources", "3", nullptr, "synthetic source-domain count"},
      {"adapt.samples", "300", "2000", "samples per synthetic domain"},
      {"adapt.rotation_deg", "15", nullptr, "per-domain rotation step"},
      {"adapt.noise", "0.15", nullptr, "two-moons noise std"},
      {"fridge.count", "12", "100", "fleet size for simulation"},
      {"fridge.duration_s", "86400", nullptr, "simulated trace length"},
      {"fridge.lead_s", "300", nullptr, "prediction lead time"},
      {"fridge.lstm_sizes", "16,8", "32,16", "defrost predictor LSTM widths"},
      {"fridge.required_kw", "0", nullptr, "demand-response reduction target"},
      {"fridge.event_s", "600", nullptr, "demand-response event duration"},
      {"fridge.margin", "0.1", nullptr, "safety margin on predicted off-time"},
      {"registry.root", "", nullptr, "model registry directory; empty = off"},
  };
  return table;
}

Config Config::with_profile(const std::string& profile) {
  if (profile != "desk" && profile != "paper")
    throw std::invalid_argument("unknown profile: " + profile);
  Config cfg;
  for (const auto& spec : key_table()) {
    const char* v = spec.desk_value;
    if (profile == "paper" && spec.paper_value) v = spec.paper_value;
    cfg.kv_[spec.key] = v;
  }
  cfg.kv_["run.profile"] = profile;
  return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
  if (kv_.find(key) == kv_.end())
    throw std::out_of_range("unknown config key: " + key);
  kv_[key] = value;
}

bool Config::has(const std::string& key) const { return kv_.count(key) != 0; }

std::string Config::get(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw std::out_of_range("unknown config key: " + key);
  return it->second;
}

double Config::get_double(const std::string& key) const {
  std::string v = get(key);
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": bad number '" + v + "'");
  }
}

std::int64_t Config::get_int(const std::string& key) const {
  std::string v = get(key);
  try {
    std::size_t pos = 0;
    std::int64_t d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": bad integer '" + v + "'");
  }
}

std::uint64_t Config::get_u64(const std::string& key) const {
  std::int64_t v = get_int(key);
  if (v < 0) throw std::invalid_argument("config key " + key + ": negative");
  return static_cast<std::uint64_t>(v);
}

bool Config::get_bool(const std::string& key) const {
  std::string v = get(key);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw std::invalid_argument("config key " + key + ": bad boolean '" + v + "'");
}

std::vector<std::size_t> Config::get_sizes(const std::string& key) const {
  std::string v = get(key);
  std::vector<std::size_t> out;
  std::istringstream is(v);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    try {
      long long n = std::stoll(tok);
      if (n <= 0) throw std::invalid_argument(tok);
      out.push_back(static_cast<std::size_t>(n));
    } catch (const std::exception&) {
      throw std::invalid_argument("config key " + key + ": bad size list '" +
                                  v + "'");
    }
  }
  if (out.empty())
    throw std::invalid_argument("config key " + key + ": empty size list");
  return out;
}

void Config::load_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file: " + path);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!section.empty() && key.find('.') == std::string::npos)
      key = section + "." + key;
    try {
      set(key, value);
    } catch (const std::out_of_range&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": unknown config key '" + key + "'");
    }
  }
}

void Config::apply_environment() {
  for (const auto& spec : key_table()) {
    std::string env = "FOODCHAIN_";
    for (const char* p = spec.key; *p; ++p)
      env += *p == '.' ? '_' : static_cast<char>(std::toupper(*p));
    if (const char* v = std::getenv(env.c_str())) kv_[spec.key] = v;
  }
}

std::string Config::fingerprint() const {
  std::ostringstream os;
  for (const auto& [k, v] : kv_) os << k << "=" << v << "\n";
  std::string s = os.str();
  unsigned long crc = crc32(0L, reinterpret_cast<const Bytef*>(s.data()),
                            static_cast<uInt>(s.size()));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%08lx", crc);
  return buf;
}

}  // namespace foodchain
