#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace socialsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Runs one subcommand. `args` excludes the program name. Failures print a
/// single `error: kind=<kind> message="<text>"` line to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace socialsim
