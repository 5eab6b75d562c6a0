#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kdiv::cli {

/// Runs one command line (without the program name). Results go to out
/// (or the --out file), diagnostics to err. Returns 0, 2 on invalid input
/// or 3 on numeric failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kdiv::cli
