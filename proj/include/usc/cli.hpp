#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace usc {

/// Exit codes: 0 success, 1 validation or runtime failure, 2 usage error.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_command(int argc, char** argv);

}  // namespace usc
