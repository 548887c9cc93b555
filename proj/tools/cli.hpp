#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace superpos::cli {

inline constexpr const char* kSchema = "superpos-report/1";

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kNotCertified = 2;  // a certificate or check did not pass
inline constexpr int kNumericFailure = 3;

// Runs one command line (args excludes the program name), writing the report
// to out (or to --output) and diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace superpos::cli
