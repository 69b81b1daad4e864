#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace randfeat::cli {

/// Environment variable holding the default output directory.
inline constexpr const char* kOutDirEnv = "RANDFEAT_OUT_DIR";

/// Runs the command line `args` (without the program name). Returns the exit
/// code: 0 success, 2 argument error, 1 numeric or data failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace randfeat::cli
