#pragma once

#include <ostream>
#include <string>

#include "foodchain/config.hpp"

namespace foodchain {

// Exit codes shared by the C API and the command-line tool.
enum ExitCode {
  kExitOk = 0,
  kExitUsage = 2,     // unknown subcommand/key, bad config value
  kExitBadInput = 3,  // malformed or missing input file
  kExitInfeasible = 4,  // fleet selection cannot meet the reduction target
  kExitInternal = 5,
};

// Executes one subcommand: ingest | train | forecast | ablate | cluster |
// adapt | fridge-sim | fridge-train | fridge-select | report.
// Writes artifacts plus a manifest under cfg "run.out". On failure prints a
// single machine-parseable line "error <code> <message>" to `err`.
int run_command(const std::string& subcommand, const Config& cfg,
                std::ostream& out, std::ostream& err);

const char* runner_version();

}  // namespace foodchain
