#pragma once

#include <string>
#include <vector>

namespace revmine {

// Subcommand front end: filter, frames, split, train, eval, analyze,
// pipeline. Returns the process exit status; errors print one
// machine-parsable `error: ...` line on stderr.
int dispatch(const std::vector<std::string>& args);

}  // namespace revmine
