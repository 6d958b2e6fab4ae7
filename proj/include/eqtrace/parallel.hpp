#pragma once

// OpenMP batch kernels. Every kernel has a serial reference twin that
// produces identical output; tests compare the two and bench/ times them.

#include "eqtrace/economy_models.hpp"
#include "eqtrace/reference_oracles.hpp"

#include <optional>
#include <string>
#include <vector>

namespace eqtrace::parallel {

/// Same result (and order) as lcp_enumerate, support sets split across threads.
std::vector<Vector> lcp_enumerate_omp(const LcpInstance& inst);
std::vector<Vector> lcp_enumerate_serial(const LcpInstance& inst);

struct StartOutcome {
  std::optional<EquilibriumReport> report;
  bool no_convergence = false;  // solver gave up (as opposed to bad input)
  std::string error;

  bool ok() const noexcept { return report.has_value(); }
};

/// One compute_equilibrium per start; results follow input order.
std::vector<StartOutcome> solve_starts_omp(const EconomyModel& model,
                                           const std::vector<std::optional<Vector>>& starts,
                                           const TraceConfig& cfg,
                                           const EquilibriumOptions& options = {});
std::vector<StartOutcome> solve_starts_serial(const EconomyModel& model,
                                              const std::vector<std::optional<Vector>>& starts,
                                              const TraceConfig& cfg,
                                              const EquilibriumOptions& options = {});

/// solve_ncp on each LCP from the all-ones start; nullopt where it fails.
std::vector<std::optional<Vector>> solve_lcps_omp(const std::vector<LcpInstance>& batch,
                                                  const TraceConfig& cfg);
std::vector<std::optional<Vector>> solve_lcps_serial(const std::vector<LcpInstance>& batch,
                                                     const TraceConfig& cfg);

int max_threads();

}  // namespace eqtrace::parallel
