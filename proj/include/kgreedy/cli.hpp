#pragma once

#include <string>
#include <vector>

namespace kgreedy {

// Exit codes: 0 success, 2 invalid config/arguments, 3 numerical
// termination before min_points, 4 theory verification failure.
int cli_main(const std::vector<std::string>& args);

}  // namespace kgreedy
