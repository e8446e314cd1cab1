#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace incexc::cli {

// Runs one CLI invocation; `args` excludes the program name. Returns the
// process exit code: 0 success, 1 evaluation below --min-f1, 2 usage or
// input errors.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace incexc::cli
