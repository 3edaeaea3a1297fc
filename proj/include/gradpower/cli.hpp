#ifndef GRADPOWER_CLI_HPP
#define GRADPOWER_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace gradpower::cli {

enum ExitCode : int { Success = 0, Usage = 1, Domain = 2, Numeric = 3 };

/// Runs one command. `args` excludes the program name. Output goes to `out`
/// (or to --output), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Formats a double with 17 significant digits, locale independent.
std::string format_double(double x);

} // namespace gradpower::cli

#endif // GRADPOWER_CLI_HPP
