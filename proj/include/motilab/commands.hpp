#pragma once

namespace motilab {

// Batch front-end. Subcommands: simulate, envelope, verify, sweep, audit,
// constants. Exit codes: 0 all gated checks pass, 1 a gated check failed,
// 2 configuration or runtime error.
int run_cli(int argc, const char* const* argv);

}  // namespace motilab
