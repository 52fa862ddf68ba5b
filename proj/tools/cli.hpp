#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace leaftree::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitVerificationFailed = 2;

// Runs one invocation; args excludes the program name. Results go to `out`
// (or the --output file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "a:b", "a:b:step", "a,b,c" or a single integer.
std::vector<int> parse_grid(const std::string& text);

}  // namespace leaftree::cli
