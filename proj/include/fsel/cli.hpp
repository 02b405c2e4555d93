#pragma once

#include <iosfwd>

namespace fsel {

/// Command-line entry point. Exit codes: 0 success, 1 runtime failure
/// (I/O, unexpected), 2 usage or validation failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fsel
