#pragma once

#include <iosfwd>

namespace tsolve {

// Exit codes: 0 success, 1 runtime failure or failed validation, 2 bad configuration or usage.
int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace tsolve
