#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pubdyn::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIngest = 2;
inline constexpr int kExitFit = 3;
inline constexpr int kExitVerifyFailed = 4;

/// Subcommands: analyze, fit, synth, verify. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int main(int argc, char** argv);

}  // namespace pubdyn::cli
