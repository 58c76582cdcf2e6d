#pragma once

#include <iosfwd>

namespace orlicz::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes: 0 success or pass, 2 a fail verdict, 3 inconclusive, 1 usage,
/// IO or solver error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace orlicz::cli
