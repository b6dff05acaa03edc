#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vgtree::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;     ///< invalid flags, parameters or input
inline constexpr int kExitNumerical = 3; ///< negative probabilities, FD instability, quadrature failure

/// Runs one invocation. args excludes the program name; the first element is the verb
/// (price | table | p3-curve | fit). Results go to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace vgtree::cli
