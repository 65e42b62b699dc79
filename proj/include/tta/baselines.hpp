#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tta/model.hpp"
#include "tta/objective.hpp"
#include "tta/scheduler.hpp"

namespace tta {

struct InitialSolution {
  Assignment assignment;
  GclSchedule gcl;
};

/// HRT → TT, SRT → AVB, with the GCL of the TT flows.
InitialSolution initial_solution(const TestCase& tc);

/// Every flow AVB.
Assignment avb_only(const TestCase& tc);

/// Canonical order; TT whenever the flow fits and meets its deadline (HRT)
/// or buffer deadline (SRT) on the schedule so far, AVB otherwise.
Assignment greedy_tt_first(const TestCase& tc);

struct OracleResult {
  Assignment best_assignment;
  Objectives best_objective;
  std::uint64_t evaluations = 0;
};

/// Lexicographic order used by the oracle: higher δ_HRT, then higher δ_SRT,
/// then fewer TT flows, then the smaller type vector in flow order (AVB < TT).
/// Masks carry one bit per flow index, set for TT.
bool oracle_prefers(const Objectives& a, std::uint64_t mask_a, const Objectives& b, std::uint64_t mask_b);

Assignment assignment_from_mask(std::size_t flows, std::uint64_t mask);

/// Evaluates all 2^|F| assignments. Throws TooLargeError above `max_flows`.
OracleResult exhaustive_oracle(const TestCase& tc, int max_flows = 12);

namespace serial {
OracleResult exhaustive_oracle(const TestCase& tc, int max_flows = 12);
}

struct Strategy {
  std::string name;
  std::function<Assignment(const TestCase&)> assign;
};

/// One row per strategy; runtime_s covers assignment plus evaluation.
std::vector<ReportRow> compare(const std::string& id, const TestCase& tc, const std::vector<Strategy>& strategies);

}  // namespace tta
