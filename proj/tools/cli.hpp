#pragma once

#include <iosfwd>

namespace mcdiv::cli {

/// Runs the mcdiv command line; returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mcdiv::cli
