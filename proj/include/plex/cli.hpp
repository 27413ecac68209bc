#pragma once

#include <iosfwd>
#include <string>

namespace plex {

// CSV schema written by `probe`.
inline constexpr const char* kProbeCsvHeader =
    "dataset,index,epsilon,r,delta,bytes,build_ns,median_lookup_ns,p99_lookup_ns";

/// Entry point of the plexbench tool (subcommands gen, build, probe, tune).
/// Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace plex
