#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace climnorm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitPartial = 2;

/// Runs one subcommand. `args` excludes the program name. Errors are written
/// to `err` as a single line `error: <code>: <message>`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace climnorm::cli
