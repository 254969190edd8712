#pragma once

#include <iosfwd>

namespace densfda {

/// Entry point for the densfda tool. Returns 0 on success, 2 on usage
/// errors, 1 on computation errors (an error JSON is written to err).
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace densfda
