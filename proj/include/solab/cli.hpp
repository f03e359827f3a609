#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace solab {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitRuntime = 2 };

/// Entry point of the so-lab tool. `args` excludes the program name.
/// Summaries go to `out`, progress and errors to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Settings the arguments resolve to, in the config-file format read by
/// --config (the text --write-config produces). Throws on bad arguments.
std::string effective_config(const std::vector<std::string>& args);

}  // namespace solab
