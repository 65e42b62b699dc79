#include "tta/objective.hpp"

#include <cstdio>

#include "tta/avb_analysis.hpp"
#include "tta/errors.hpp"

namespace tta {

double utility(double wcd_us, double deadline_us, const UtilityParams& params) {
  const double bd = params.bd_factor * deadline_us;
  if (wcd_us <= deadline_us) return params.cap;
  if (wcd_us <= bd) return -(12.0 / deadline_us) * (wcd_us - deadline_us) + 6.0;
  return 0.0;
}

bool schedulable(const Flow& flow, const Delay& wcd, const UtilityParams& params) {
  if (!wcd.is_finite()) return false;
  const auto deadline = static_cast<double>(flow.deadline_us);
  return flow.is_hrt() ? wcd.us <= deadline : wcd.us <= params.bd_factor * deadline;
}

Objectives objectives(const TestCase& tc, const std::vector<std::optional<Delay>>& wcds,
                      const Assignment& assignment) {
  if (wcds.size() != tc.flow_count() || assignment.size() != tc.flow_count())
    throw MissingWcdError("delay list does not cover the test case");
  const auto params = UtilityParams::from(tc.params());
  Objectives out;
  for (std::size_t i = 0; i < tc.flow_count(); ++i) {
    if (!wcds[i]) throw MissingWcdError("no delay for flow " + tc.flow(i).id);
    const Flow& f = tc.flow(i);
    const bool ok = assignment.status[i] == FlowStatus::Scheduled && schedulable(f, *wcds[i], params);
    if (f.is_hrt())
      out.delta_hrt += ok ? 1 : 0;
    else if (ok)
      out.delta_srt += utility(wcds[i]->us, static_cast<double>(f.deadline_us), params);
  }
  return out;
}

EvalReport evaluate_assignment(const TestCase& tc, const Assignment& input) {
  if (input.size() != tc.flow_count()) throw ArgumentError("assignment does not cover the test case");
  EvalReport report;
  report.assignment = input;
  report.gcl = build_gcl(tc, report.assignment);
  const auto avb = all_avb_wcds(tc, report.assignment, report.gcl);
  const auto params = UtilityParams::from(tc.params());

  std::vector<std::optional<Delay>> wcds(tc.flow_count());
  for (std::size_t i = 0; i < tc.flow_count(); ++i) {
    if (report.assignment.types[i] == TrafficType::TT)
      wcds[i] = report.assignment.status[i] == FlowStatus::Scheduled
                    ? Delay::finite(tt_wcd(report.gcl, tc, i))
                    : Delay::unscheduled();
    else
      wcds[i] = avb.at(i);
  }

  const Objectives obj = objectives(tc, wcds, report.assignment);
  report.delta_hrt = obj.delta_hrt;
  report.delta_srt = obj.delta_srt;

  for (std::size_t i = 0; i < tc.flow_count(); ++i) {
    const Flow& f = tc.flow(i);
    FlowResult row;
    row.flow = f.id;
    row.criticality = f.criticality;
    row.type = report.assignment.types[i];
    row.wcd = *wcds[i];
    row.scheduled = report.assignment.status[i] == FlowStatus::Scheduled && schedulable(f, row.wcd, params);
    row.utility = (!f.is_hrt() && row.scheduled) ? utility(row.wcd.us, static_cast<double>(f.deadline_us), params)
                                                 : 0.0;
    if (!row.scheduled) report.assignment.status[i] = FlowStatus::Unscheduled;
    report.flows.push_back(std::move(row));
  }

  report.hrt_count = tc.hrt_count();
  report.srt_count = tc.srt_count();
  report.hrt_scheduled_pct =
      report.hrt_count == 0 ? 100.0 : 100.0 * report.delta_hrt / static_cast<double>(report.hrt_count);
  report.srt_utility_pct =
      report.srt_count == 0 ? 100.0
                            : 100.0 * report.delta_srt / (static_cast<double>(report.srt_count) * params.cap);
  return report;
}

ReportRow make_row(const std::string& id, const std::string& strategy, const TestCase& tc,
                   const EvalReport& report) {
  ReportRow row;
  row.id = id;
  row.strategy = strategy;
  row.hrt_count = report.hrt_count;
  row.srt_count = report.srt_count;
  row.es = tc.topology().count(NodeKind::EndStation);
  row.sw = tc.topology().count(NodeKind::Switch);
  row.hrt_scheduled_pct = report.hrt_scheduled_pct;
  row.srt_utility_pct = report.srt_utility_pct;
  row.runtime_s = report.runtime_s;
  return row;
}

std::string csv_header() {
  return "id,hrt_count,srt_count,es,sw,strategy,hrt_scheduled_pct,srt_utility_pct,runtime_s";
}

std::string csv_line(const ReportRow& row) {
  char buf[256];
  std::snprintf(buf, sizeof buf, ",%zu,%zu,%zu,%zu,", row.hrt_count, row.srt_count, row.es, row.sw);
  char tail[128];
  std::snprintf(tail, sizeof tail, ",%.2f,%.2f,%.6f", row.hrt_scheduled_pct, row.srt_utility_pct,
                row.runtime_s);
  return row.id + buf + row.strategy + tail;
}

}  // namespace tta
