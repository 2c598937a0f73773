#pragma once

#include <iosfwd>

namespace hcflow {

enum ExitCode : int { kExitOk = 0, kExitInvalid = 2, kExitConstruction = 3 };

// hcflow sample|solve|oracle|audit|verify|experiment ...
int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hcflow
