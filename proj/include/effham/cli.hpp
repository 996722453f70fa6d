// cli.hpp: `effham <subcommand>` entry point.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 pipeline failure,
// 3 selfcheck failure. EFFHAM_RESULTS_DIR sets the default results directory.

#pragma once

#include <string>
#include <vector>

namespace effham {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitPipeline = 2;
inline constexpr int kExitSelfcheck = 3;

// args excludes the program name.
int run_command(const std::vector<std::string>& args);
int run_command(int argc, char** argv);

}  // namespace effham
