#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace finsent::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitStageError = 1;
inline constexpr int kExitUsage = 2;

/// Entry point behind the `finsent` binary. Errors are reported on `err` as
/// a single line: error: stage=<stage> code=<code> message="<text>".
int run_subcommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace finsent::cli
