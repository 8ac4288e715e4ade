#pragma once

namespace ipld {

/// Entry point of the `ipld` command-line tool. Returns 0 when every run
/// converged, 2 when a run stopped at its iteration cap, 1 on errors.
int run_cli(int argc, char** argv);

}  // namespace ipld
