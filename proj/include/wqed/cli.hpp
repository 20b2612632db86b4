#pragma once

#include <string>
#include <vector>

namespace wqed {

// Batch front-end: parameter sweeps, correlation curves, photon statistics,
// lattice validation runs.  Deterministic output for identical configs
// (the timestamp lives in a metadata comment).  Returns the process exit
// code; diagnostics go to stderr.
int cli_run(const std::vector<std::string>& args);

}  // namespace wqed
