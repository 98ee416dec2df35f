#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace darboux::cli {

/// Runs one command line (without the program name). Data goes to `out`,
/// diagnostics to `err`. Returns 0 on success or a passing study, 1 on a
/// failed study or runtime error, 2 on a usage error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Name of the environment variable holding the default config file path.
inline constexpr const char* kConfigEnv = "DARBOUX_CONFIG";

}  // namespace darboux::cli
