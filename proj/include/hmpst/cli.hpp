#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hmpst::cli {

// argv excludes the program name. Returns 0 on success, 1 on a semantic
// failure, 2 on usage or parse errors.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace hmpst::cli
