#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ambistop {

// `a:b:n` gives n + 1 equally spaced points from a to b; otherwise a comma
// list. Ranges and lists must be strictly increasing.
std::vector<double> parse_values(const std::string& text);

// Runs the command line; returns the process exit status. CSV goes to out
// (or --output), a single-line error to err.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ambistop
