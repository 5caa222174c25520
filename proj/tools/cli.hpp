#ifndef HAMM_TOOLS_CLI_HPP
#define HAMM_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace hamm::cli {

// Exit codes.
inline constexpr int kPass = 0;
inline constexpr int kFail = 1;
inline constexpr int kUsage = 2;

// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace hamm::cli

#endif // HAMM_TOOLS_CLI_HPP
