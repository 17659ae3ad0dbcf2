#pragma once

#include <iosfwd>

namespace sparsegpt::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitNumerical = 2,
};

/// Entry point for `sparsegpt {prune|verify|bench|costmodel}`.
/// Returns 0 on success, 1 on usage / I/O errors, 2 on numerical or
/// configuration failures.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace sparsegpt::cli
