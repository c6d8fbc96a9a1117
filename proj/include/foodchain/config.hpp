#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace foodchain {

// Flat key-value configuration. Keys are "section.name". Precedence, lowest
// to highest: profile defaults, config file, FOODCHAIN_SECTION_NAME
// environment variables, explicit set() calls (CLI flags).
class Config {
 public:
  // "desk" (small, fast) or "paper" (full-size hyperparameters)
  static Config with_profile(const std::string& profile);

  // every known key with its desk default and paper override, for help text
  struct KeySpec {
    const char* key;
    const char* desk_value;
    const char* paper_value;  // nullptr = same as desk
    const char* doc;
  };
  static const std::vector<KeySpec>& key_table();

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  // getters throw std::out_of_range for unknown keys and
  // std::invalid_argument for unparseable values (naming the key)
  std::string get(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<std::size_t> get_sizes(const std::string& key) const;

  // "key = value" lines with optional [section] headers and '#' comments
  void load_file(const std::string& path);
  void apply_environment();

  const std::map<std::string, std::string>& entries() const { return kv_; }
  std::string profile() const { return get("run.profile"); }

  // stable digest of the full key-value map (checked for reproducibility)
  std::string fingerprint() const;

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace foodchain
