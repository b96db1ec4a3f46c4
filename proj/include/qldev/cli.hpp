#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qldev::cli {

// Runs the command line given as argument list (without argv[0]).
// Exit codes: 0 success, 2 validation/configuration error, 3 capacity error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qldev::cli
