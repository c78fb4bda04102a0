#pragma once

#include <string>
#include <vector>

namespace trimix {

// Exit codes: 0 success, 2 usage error, 3 I/O error, 4 invalid
// configuration or input, 1 unexpected failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitConfig = 4;

// Run one subcommand: args excludes the program name, e.g.
// {"schedule", "--te", "250"}.
int run_cli(std::vector<std::string> args);

} // namespace trimix
