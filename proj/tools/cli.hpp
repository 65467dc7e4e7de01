#pragma once

#include <iosfwd>

namespace metamorph {

// Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 numerical validation failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace metamorph
