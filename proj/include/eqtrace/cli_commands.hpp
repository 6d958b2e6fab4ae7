#pragma once

#include "eqtrace/path_tracer.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace eqtrace::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNoConvergence = 2;

/// Entry point behind the `eqtrace` binary: subcommands solve, trace-dump,
/// validate and export.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Writes the path log as CSV: step,lambda,residual,steplength,x1,...,x2n.
void write_trace_csv(const TraceResult& trace, std::ostream& out);

}  // namespace eqtrace::cli
