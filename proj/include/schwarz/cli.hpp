#pragma once

// Command-line front end. Exit codes: 0 success, 1 computational failure or
// failed check, 2 usage error.

#include <iosfwd>
#include <string>
#include <vector>

namespace schwarz {

inline constexpr const char* kToolVersion = "1.0.0";

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "start:stop:step" (stop included when hit within rounding) or "a,b,c".
// Every radius must lie in [0, 0.999).
std::vector<double> parse_radius_grid(const std::string& text);

// %.15g
std::string format_real(double v);

}  // namespace schwarz
