#include "eqtrace/parallel.hpp"

#include <omp.h>

#include <cstdint>
#include <exception>

namespace eqtrace::parallel {

namespace {

StartOutcome solve_one(const EconomyModel& model, const std::optional<Vector>& start,
                       const TraceConfig& cfg, EquilibriumOptions options) {
  StartOutcome out;
  options.start = start;
  try {
    out.report = compute_equilibrium(model, cfg, options);
  } catch (const NoConvergenceError& e) {
    out.no_convergence = true;
    out.error = e.what();
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

std::optional<Vector> solve_lcp(const LcpInstance& inst, const TraceConfig& cfg) {
  const Index n = inst.dimension();
  try {
    return solve_ncp(inst.as_ncp(), Vector::Ones(n), Vector::Ones(n), cfg).x;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

int max_threads() { return omp_get_max_threads(); }

std::vector<Vector> lcp_enumerate_serial(const LcpInstance& inst) { return lcp_enumerate(inst); }

std::vector<Vector> lcp_enumerate_omp(const LcpInstance& inst) {
  // Validation and the n <= 14 limit come from the serial path on tiny input.
  if (inst.dimension() > kMaxEnumerationSize || inst.M.rows() != inst.dimension() ||
      inst.M.cols() != inst.dimension()) {
    return lcp_enumerate(inst);
  }
  const std::int64_t count = std::int64_t{1} << inst.dimension();
  std::vector<std::optional<Vector>> candidates(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < count; ++s) {
    candidates[static_cast<std::size_t>(s)] =
        lcp_support_candidate(inst, static_cast<std::uint32_t>(s));
  }
  std::vector<Vector> out;
  for (const auto& c : candidates) {
    if (c) merge_distinct(out, *c);
  }
  return out;
}

std::vector<StartOutcome> solve_starts_serial(const EconomyModel& model,
                                              const std::vector<std::optional<Vector>>& starts,
                                              const TraceConfig& cfg,
                                              const EquilibriumOptions& options) {
  std::vector<StartOutcome> out;
  out.reserve(starts.size());
  for (const auto& s : starts) out.push_back(solve_one(model, s, cfg, options));
  return out;
}

std::vector<StartOutcome> solve_starts_omp(const EconomyModel& model,
                                           const std::vector<std::optional<Vector>>& starts,
                                           const TraceConfig& cfg,
                                           const EquilibriumOptions& options) {
  const auto count = static_cast<std::int64_t>(starts.size());
  std::vector<StartOutcome> out(starts.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = solve_one(model, starts[k], cfg, options);
  }
  return out;
}

std::vector<std::optional<Vector>> solve_lcps_serial(const std::vector<LcpInstance>& batch,
                                                     const TraceConfig& cfg) {
  std::vector<std::optional<Vector>> out;
  out.reserve(batch.size());
  for (const auto& inst : batch) out.push_back(solve_lcp(inst, cfg));
  return out;
}

std::vector<std::optional<Vector>> solve_lcps_omp(const std::vector<LcpInstance>& batch,
                                                  const TraceConfig& cfg) {
  const auto count = static_cast<std::int64_t>(batch.size());
  std::vector<std::optional<Vector>> out(batch.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = solve_lcp(batch[k], cfg);
  }
  return out;
}

}  // namespace eqtrace::parallel
