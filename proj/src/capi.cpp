#include "foodchain.h"

#include <cstring>
#include <iostream>
#include <sstream>
#include <string>

#include "foodchain/cli_runner.hpp"
#include "foodchain/config.hpp"

struct fc_config {
  foodchain::Config cfg;
};

namespace {

thread_local std::string g_last_error;

int set_error(int code, const char* what) {
  g_last_error = what ? what : "";
  return code;
}

}  // namespace

extern "C" {

fc_config* fc_config_create(const char* profile) {
  try {
    auto* handle = new fc_config{
        foodchain::Config::with_profile(profile ? profile : "desk")};
    handle->cfg.apply_environment();
    g_last_error.clear();
    return handle;
  } catch (const std::exception& e) {
    set_error(FC_ERR_USAGE, e.what());
    return nullptr;
  }
}

void fc_config_destroy(fc_config* cfg) { delete cfg; }

int fc_config_set(fc_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return set_error(FC_ERR_USAGE, "null argument");
  try {
    cfg->cfg.set(key, value);
    return FC_OK;
  } catch (const std::exception& e) {
    return set_error(FC_ERR_USAGE, e.what());
  }
}

int fc_config_load_file(fc_config* cfg, const char* path) {
  if (!cfg || !path) return set_error(FC_ERR_USAGE, "null argument");
  try {
    cfg->cfg.load_file(path);
    return FC_OK;
  } catch (const std::exception& e) {
    return set_error(FC_ERR_BAD_INPUT, e.what());
  }
}

int fc_config_get(const fc_config* cfg, const char* key, char* buf,
                  unsigned long buf_len) {
  if (!cfg || !key || !buf || buf_len == 0)
    return set_error(FC_ERR_USAGE, "null argument");
  try {
    std::string v = cfg->cfg.get(key);
    std::strncpy(buf, v.c_str(), buf_len - 1);
    buf[buf_len - 1] = '\0';
    return FC_OK;
  } catch (const std::exception& e) {
    return set_error(FC_ERR_USAGE, e.what());
  }
}

int fc_run(const char* subcommand, fc_config* cfg) {
  if (!subcommand || !cfg) return set_error(FC_ERR_USAGE, "null argument");
  std::ostringstream err;
  int code = foodchain::run_command(subcommand, cfg->cfg, std::cout, err);
  if (code != FC_OK) {
    std::string msg = err.str();
    while (!msg.empty() && (msg.back() == '\n' || msg.back() == '\r'))
      msg.pop_back();
    // the runner prefixes "error <code> "; the stored message is bare
    if (msg.rfind("error ", 0) == 0) {
      std::size_t sp = msg.find(' ', 6);
      if (sp != std::string::npos) msg.erase(0, sp + 1);
    }
    return set_error(code, msg.c_str());
  }
  g_last_error.clear();
  return FC_OK;
}

const char* fc_last_error(void) { return g_last_error.c_str(); }

const char* fc_version(void) { return foodchain::runner_version(); }

unsigned long fc_config_key_count(void) {
  return static_cast<unsigned long>(foodchain::Config::key_table().size());
}

const char* fc_config_key_name(unsigned long i) {
  const auto& t = foodchain::Config::key_table();
  return i < t.size() ? t[i].key : nullptr;
}

const char* fc_config_key_default(unsigned long i) {
  const auto& t = foodchain::Config::key_table();
  return i < t.size() ? t[i].desk_value : nullptr;
}

const char* fc_config_key_paper(unsigned long i) {
  const auto& t = foodchain::Config::key_table();
  if (i >= t.size()) return nullptr;
  return t[i].paper_value ? t[i].paper_value : t[i].desk_value;
}

const char* fc_config_key_doc(unsigned long i) {
  const auto& t = foodchain::Config::key_table();
  return i < t.size() ? t[i].doc : nullptr;
}

}  // extern "C"
