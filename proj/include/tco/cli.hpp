#pragma once

#include <iosfwd>

namespace tco {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitInfeasible = 2, kExitRuntime = 3 };

/// Entry point of `tco-sa eval|optimize|sweep`. Never throws; every failure
/// maps onto an ExitCode with a message on `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tco
