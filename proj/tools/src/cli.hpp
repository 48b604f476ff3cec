#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sle::cli {

enum ExitCode : int { ok = 0, certificate_failed = 1, error = 2 };

/// Runs one invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sle::cli
