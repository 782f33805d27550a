#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace expd::cli {

// Exit codes.
constexpr int kOk = 0;
constexpr int kCheckFailed = 2;
constexpr int kInputError = 3;
constexpr int kBudget = 4;

// Runs `expd` with the given arguments (program name excluded). Reports go
// to `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace expd::cli
