#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace skillmpc {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitValidation = 2,
  kExitRuntime = 3,
};

// Environment variable that overrides the config's output_dir (--out wins
// over both).
inline constexpr const char* kOutDirEnv = "SKILLMPC_OUT_DIR";

// Entry point of the skillmpc command line: train | compose | eval | plot.
// Messages go to `out` / `err`; returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace skillmpc
