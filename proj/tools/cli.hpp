#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace faultforge::cli {

// Exit codes: 0 success, 1 runtime failure, 2 usage/parse error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace faultforge::cli
