#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pubflow::client {

// Exit codes of the pubflow command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitTransport = 3;
inline constexpr int kExitServer = 4;

// Runs one command line (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace pubflow::client
