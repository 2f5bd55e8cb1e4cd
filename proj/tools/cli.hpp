#ifndef LWA_TOOLS_CLI_HPP
#define LWA_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace lwa::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line (args excludes the program name). Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Expands "start:stop:step" into the grid values, inclusive of stop.
std::vector<double> expand_grid(const std::string& spec);

}  // namespace lwa::cli

#endif  // LWA_TOOLS_CLI_HPP
