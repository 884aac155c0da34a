#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace errml::cli {

enum ExitCode : int { ok = 0, model_error = 1, usage_error = 2 };

/// Runs one `errml` invocation. `args` excludes the program name. Reports and
/// exports go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace errml::cli
