#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace stagecraft {

// Exit codes of the command-line driver.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsageError = 2;

// args excludes the program name. Input files may be "-" for stdin.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stagecraft
