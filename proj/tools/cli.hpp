#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bianchi::cli {

enum ExitCode { kOk = 0, kEvent = 1, kInvalid = 2 };

/// Runs the command line (args excludes the program name) writing regular
/// output to out and diagnostics to err. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "1,2/3,-0.5" into numbers; fractions p/q are allowed.
std::vector<double> parse_list(const std::string& s);

}  // namespace bianchi::cli
