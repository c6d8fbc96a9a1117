// Command-line front end; talks to the core only through the C API.
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "foodchain.h"

namespace {

void print_exit_codes() {
  std::printf(
      "exit codes:\n"
      "  0  success\n"
      "  2  usage error (unknown subcommand/flag/key, bad value)\n"
      "  3  malformed or missing input file\n"
      "  4  fleet selection cannot meet the reduction target\n"
      "  5  internal error\n");
}

void print_keys() {
  std::printf("config keys (key = desk default | paper value):\n");
  for (unsigned long i = 0; i < fc_config_key_count(); ++i)
    std::printf("  %-26s = %-14s | %-14s %s\n", fc_config_key_name(i),
                fc_config_key_default(i), fc_config_key_paper(i),
                fc_config_key_doc(i));
  std::printf(
      "\noverride order: profile defaults < config file < FOODCHAIN_* "
      "environment < --set flags\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"food-supply-chain forecasting, clustering, adaptation and "
               "refrigeration toolkit"};
  app.footer(
      "subcommands: ingest | train | forecast | ablate | cluster | adapt | "
      "fridge-sim | fridge-train | fridge-select | report\n"
      "run '" +
      std::string(argv[0]) + " --keys' for every config key; exit codes 0/2/3/4/5");

  std::string subcommand, profile = "desk", config_file, input, output = "out";
  long long seed = -1;
  std::vector<std::string> overrides;
  bool show_keys = false, show_codes = false, show_version = false;

  app.add_option("subcommand", subcommand,
                 "ingest|train|forecast|ablate|cluster|adapt|fridge-sim|"
                 "fridge-train|fridge-select|report");
  app.add_option("-p,--profile", profile, "hyperparameter profile: desk|paper");
  app.add_option("-c,--config", config_file, "key=value config file");
  app.add_option("-i,--input", input, "input path (sets run.input)");
  app.add_option("-o,--output", output, "artifact directory (sets run.out)");
  app.add_option("--seed", seed, "RNG seed (sets run.seed)");
  app.add_option("-s,--set", overrides, "config override, key=value (repeatable)");
  app.add_flag("--keys", show_keys, "list every config key with defaults");
  app.add_flag("--exit-codes", show_codes, "document the exit codes");
  app.add_flag("--version", show_version, "print version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : FC_ERR_USAGE;
  }

  if (show_version) {
    std::printf("%s\n", fc_version());
    return FC_OK;
  }
  if (show_keys) {
    print_keys();
    return FC_OK;
  }
  if (show_codes) {
    print_exit_codes();
    return FC_OK;
  }
  if (subcommand.empty()) {
    std::fprintf(stderr, "error %d missing subcommand (try --help)\n",
                 FC_ERR_USAGE);
    return FC_ERR_USAGE;
  }

  fc_config* cfg = fc_config_create(profile.c_str());
  if (!cfg) {
    std::fprintf(stderr, "error %d %s\n", FC_ERR_USAGE, fc_last_error());
    return FC_ERR_USAGE;
  }

  int rc = FC_OK;
  if (!config_file.empty()) rc = fc_config_load_file(cfg, config_file.c_str());
  if (rc == FC_OK && !input.empty())
    rc = fc_config_set(cfg, "run.input", input.c_str());
  if (rc == FC_OK) rc = fc_config_set(cfg, "run.out", output.c_str());
  if (rc == FC_OK && seed >= 0)
    rc = fc_config_set(cfg, "run.seed", std::to_string(seed).c_str());
  for (const auto& kv : overrides) {
    if (rc != FC_OK) break;
    auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error %d --set expects key=value, got '%s'\n",
                   FC_ERR_USAGE, kv.c_str());
      fc_config_destroy(cfg);
      return FC_ERR_USAGE;
    }
    rc = fc_config_set(cfg, kv.substr(0, eq).c_str(),
                       kv.substr(eq + 1).c_str());
  }
  if (rc == FC_OK) rc = fc_run(subcommand.c_str(), cfg);
  if (rc != FC_OK) std::fprintf(stderr, "error %d %s\n", rc, fc_last_error());
  fc_config_destroy(cfg);
  return rc;
}
