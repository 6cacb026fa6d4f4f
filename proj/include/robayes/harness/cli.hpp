#pragma once

namespace robayes::harness {

/// Entry point behind the `robayes` binary. Subcommands:
///   run <config.json>       execute an experiment, write report + curves
///   validate <config.json>  schema and precondition checks only
///   oracle <measures.json>  ad-hoc metric computations on two measures
/// Exit codes: 0 ok, 1 config error, 2 precondition violation,
/// 3 internal invariant failure.
int cli_main(int argc, const char* const* argv);

}  // namespace robayes::harness
