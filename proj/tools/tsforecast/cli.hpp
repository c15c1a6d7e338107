#pragma once

#include <string>
#include <vector>

namespace tsf::cli {

/// Runs one `tsforecast` invocation. `args` excludes the program name.
/// Returns the process exit code; diagnostics go to stderr.
int run(const std::vector<std::string>& args);

/// FNV-1a 64-bit digest rendered as 16 hex digits.
std::string config_hash(const std::string& canonical_config);

}  // namespace tsf::cli
