#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nlos::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitInternal = 1;  // anything that is neither bad input nor I/O

/// Runs one command line. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace nlos::cli
