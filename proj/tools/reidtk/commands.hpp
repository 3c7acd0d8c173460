#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace reidtk::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kIoError = 3,
  kDataError = 4,
};

/// Parses `args` (args[0] is the program name) and runs the selected
/// subcommand: synth, rerank, eval, sweep or pipeline.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace reidtk::cli
