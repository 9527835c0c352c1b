#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wzlab::cli {

enum ExitCode : int { ok = 0, validation_error = 1, inconclusive = 2, failed = 3 };

/// Runs one wz-lab invocation. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace wzlab::cli
