#pragma once

#include <string>
#include <vector>

namespace cbf_surrogate::cli {

// Exit codes: 0 success, 1 invalid input or usage, 2 runtime or convergence failure.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args[0] is the program name

}  // namespace cbf_surrogate::cli
