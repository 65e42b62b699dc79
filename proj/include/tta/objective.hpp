#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tta/delay.hpp"
#include "tta/model.hpp"
#include "tta/scheduler.hpp"

namespace tta {

struct UtilityParams {
  double cap = 6.0;
  double bd_factor = 1.5;

  static UtilityParams from(const CaseParams& p) { return {p.utility_cap, p.bd_factor}; }
};

/// SRT utility of a worst-case delay `wcd_us` against soft deadline D:
///   cap                     w ≤ D
///   −(12/D)(w − D) + 6      D < w ≤ BD
///   0                       w > BD
/// The decay slope is fixed, so the curve is continuous only for cap = 6 and
/// bd_factor = 1.5.
double utility(double wcd_us, double deadline_us, const UtilityParams& params);

/// HRT: finite delay within the deadline. SRT: finite delay within the buffer deadline.
bool schedulable(const Flow& flow, const Delay& wcd, const UtilityParams& params);

struct Objectives {
  int delta_hrt = 0;
  double delta_srt = 0;

  bool operator==(const Objectives&) const = default;
};

/// δ_HRT and δ_SRT from one delay per flow (aligned with tc.flows()).
/// Throws MissingWcdError for an absent entry.
Objectives objectives(const TestCase& tc, const std::vector<std::optional<Delay>>& wcds,
                      const Assignment& assignment);

struct FlowResult {
  std::string flow;
  Criticality criticality = Criticality::HRT;
  TrafficType type = TrafficType::AVB;
  Delay wcd;
  bool scheduled = false;
  double utility = 0;
};

struct EvalReport {
  std::vector<FlowResult> flows;
  std::size_t hrt_count = 0;
  std::size_t srt_count = 0;
  int delta_hrt = 0;
  double delta_srt = 0;
  double hrt_scheduled_pct = 0;
  double srt_utility_pct = 0;
  double runtime_s = 0;

  /// Input assignment with status updated: Unscheduled for every flow that is
  /// not schedulable.
  Assignment assignment;
  GclSchedule gcl;

  Objectives objective() const { return {delta_hrt, delta_srt}; }
};

/// GCL synthesis, TT delays, AVB bounds and objectives in one pass.
/// Deterministic; runtime_s is left at 0 for the caller to fill.
EvalReport evaluate_assignment(const TestCase& tc, const Assignment& assignment);

/// Aggregate columns of one comparison row.
struct ReportRow {
  std::string id;
  std::string strategy;
  std::size_t hrt_count = 0;
  std::size_t srt_count = 0;
  std::size_t es = 0;
  std::size_t sw = 0;
  double hrt_scheduled_pct = 0;
  double srt_utility_pct = 0;
  double runtime_s = 0;
};

ReportRow make_row(const std::string& id, const std::string& strategy, const TestCase& tc,
                   const EvalReport& report);
std::string csv_header();
std::string csv_line(const ReportRow& row);

}  // namespace tta
