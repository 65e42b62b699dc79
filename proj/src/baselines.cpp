#include "tta/baselines.hpp"

#include <bit>
#include <chrono>

#include "tta/errors.hpp"

namespace tta {

InitialSolution initial_solution(const TestCase& tc) {
  InitialSolution out;
  out.assignment = Assignment(tc.flow_count());
  for (std::size_t i = 0; i < tc.flow_count(); ++i)
    out.assignment.types[i] = tc.flow(i).is_hrt() ? TrafficType::TT : TrafficType::AVB;
  out.gcl = build_gcl(tc, out.assignment);
  return out;
}

Assignment avb_only(const TestCase& tc) { return Assignment(tc.flow_count(), TrafficType::AVB); }

Assignment greedy_tt_first(const TestCase& tc) {
  Assignment a(tc.flow_count(), TrafficType::AVB);
  if (tc.flow_count() == 0) return a;
  GclSchedule gcl = empty_schedule(tc);
  for (std::size_t i : canonical_order(tc)) {
    if (!schedule_flow_asap(gcl, tc, i)) continue;
    const double wcd = tt_wcd(gcl, tc, i);
    const double bound = tc.flow(i).is_hrt() ? static_cast<double>(tc.flow(i).deadline_us) : tc.buffer_deadline_us(i);
    if (wcd <= bound)
      a.types[i] = TrafficType::TT;
    else
      unschedule_flow(gcl, i);
  }
  return a;
}

bool oracle_prefers(const Objectives& a, std::uint64_t mask_a, const Objectives& b, std::uint64_t mask_b) {
  if (a.delta_hrt != b.delta_hrt) return a.delta_hrt > b.delta_hrt;
  if (a.delta_srt != b.delta_srt) return a.delta_srt > b.delta_srt;
  const int ta = std::popcount(mask_a), tb = std::popcount(mask_b);
  if (ta != tb) return ta < tb;
  const std::uint64_t diff = mask_a ^ mask_b;
  if (diff == 0) return false;
  // First differing flow: the side with AVB there is smaller.
  return (mask_a & (diff & (~diff + 1))) == 0;
}

Assignment assignment_from_mask(std::size_t flows, std::uint64_t mask) {
  Assignment a(flows, TrafficType::AVB);
  for (std::size_t i = 0; i < flows; ++i)
    if (mask >> i & 1U) a.types[i] = TrafficType::TT;
  return a;
}

namespace {

std::uint64_t mask_count(const TestCase& tc, int max_flows) {
  if (max_flows < 0 || max_flows > 30) throw ArgumentError("oracle flow cap must lie in [0, 30]");
  if (tc.flow_count() > static_cast<std::size_t>(max_flows))
    throw TooLargeError("exhaustive oracle refuses " + std::to_string(tc.flow_count()) + " flows (cap " +
                        std::to_string(max_flows) + ")");
  return std::uint64_t{1} << tc.flow_count();
}

struct Best {
  Objectives objective;
  std::uint64_t mask = 0;
  bool set = false;

  void offer(const Objectives& o, std::uint64_t m) {
    if (!set || oracle_prefers(o, m, objective, mask)) {
      objective = o;
      mask = m;
      set = true;
    }
  }
};

OracleResult finish(const TestCase& tc, const Best& best, std::uint64_t evaluations) {
  OracleResult out;
  out.best_assignment = evaluate_assignment(tc, assignment_from_mask(tc.flow_count(), best.mask)).assignment;
  out.best_objective = best.objective;
  out.evaluations = evaluations;
  return out;
}

Objectives score(const TestCase& tc, std::uint64_t mask) {
  return evaluate_assignment(tc, assignment_from_mask(tc.flow_count(), mask)).objective();
}

}  // namespace

OracleResult exhaustive_oracle(const TestCase& tc, int max_flows) {
  const std::uint64_t total = mask_count(tc, max_flows);
  const auto n = static_cast<std::int64_t>(total);
  Best best;
#pragma omp parallel
  {
    Best local;
#pragma omp for schedule(dynamic, 16) nowait
    for (std::int64_t m = 0; m < n; ++m) local.offer(score(tc, static_cast<std::uint64_t>(m)), static_cast<std::uint64_t>(m));
#pragma omp critical
    if (local.set) best.offer(local.objective, local.mask);
  }
  return finish(tc, best, total);
}

namespace serial {

OracleResult exhaustive_oracle(const TestCase& tc, int max_flows) {
  const std::uint64_t total = mask_count(tc, max_flows);
  Best best;
  for (std::uint64_t m = 0; m < total; ++m) best.offer(score(tc, m), m);
  return finish(tc, best, total);
}

}  // namespace serial

std::vector<ReportRow> compare(const std::string& id, const TestCase& tc, const std::vector<Strategy>& strategies) {
  std::vector<ReportRow> rows;
  for (const Strategy& s : strategies) {
    const auto start = std::chrono::steady_clock::now();
    EvalReport report = evaluate_assignment(tc, s.assign(tc));
    report.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(make_row(id, s.name, tc, report));
  }
  return rows;
}

}  // namespace tta
