#pragma once

#include <ostream>

namespace lamlab {

// Exit codes: 0 ok, 1 schema or I/O error (and failed verify checks), 2 contraction-escape or
// eps refusal, 3 no-convergence.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lamlab
