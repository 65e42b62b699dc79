#include "tta/avb_analysis.hpp"

#include "tta/errors.hpp"

namespace tta {

namespace {

struct Aggregate {
  double burst_bits = 0;
  double rate_bps = 0;
};

Aggregate avb_aggregate(std::size_t link, const TestCase& tc, const Assignment& assignment) {
  Aggregate agg;
  for (std::size_t i = 0; i < tc.flow_count(); ++i) {
    if (assignment.types[i] != TrafficType::AVB) continue;
    for (auto l : tc.route_links(i))
      if (l == link) {
        const ArrivalCurve a = arrival_curve(tc.flow(i));
        agg.burst_bits += a.burst_bits;
        agg.rate_bps += a.rate_bps;
        break;
      }
  }
  return agg;
}

Delay bound(const Aggregate& agg, const std::optional<LinkService>& service) {
  if (!service || agg.rate_bps > service->rate_bps) return Delay::unstable();
  return Delay::finite(service->latency_us + agg.burst_bits / service->rate_bps * 1e6);
}

std::optional<LinkService> try_service(std::size_t link, const GclSchedule& gcl, const TestCase& tc) {
  try {
    return link_service(link, gcl, tc);
  } catch (const DegenerateServiceError&) {
    return std::nullopt;
  }
}

}  // namespace

ArrivalCurve arrival_curve(const Flow& flow) {
  const double bits = 8.0 * static_cast<double>(flow.payload_bytes);
  return {bits, bits * 1e6 / static_cast<double>(flow.period_us)};
}

LinkService link_service(std::size_t link, const GclSchedule& gcl, const TestCase& tc) {
  const SlotGrid& grid = gcl.grid;
  const auto capacity = static_cast<double>(tc.topology().links().at(link).rate_bps);
  double tt_share = 0;
  double longest_window_us = 0;
  if (grid.cells_per_link() > 0) {
    const std::size_t occupied = grid.occupied(link);
    if (occupied == grid.cells_per_link()) throw DegenerateServiceError("link fully gated to TT traffic");
    tt_share = static_cast<double>(occupied) / static_cast<double>(grid.cells_per_link());
    longest_window_us = static_cast<double>(grid.longest_occupied_run(link)) * grid.slot_us();
  }
  const double mtu_us = 8.0 * kMtuBytes / capacity * 1e6;
  return {tc.params().idle_slope * capacity * (1.0 - tt_share), mtu_us + longest_window_us};
}

Delay hop_delay_bound(std::size_t flow, std::size_t link, const GclSchedule& gcl, const TestCase& tc,
                      const Assignment& assignment) {
  if (assignment.types.at(flow) != TrafficType::AVB)
    throw ArgumentError("flow " + tc.flow(flow).id + " is not assigned AVB");
  return bound(avb_aggregate(link, tc, assignment), try_service(link, gcl, tc));
}

Delay avb_wcd(std::size_t flow, const GclSchedule& gcl, const TestCase& tc, const Assignment& assignment) {
  double total = 0;
  for (auto link : tc.route_links(flow)) {
    const Delay hop = hop_delay_bound(flow, link, gcl, tc, assignment);
    if (!hop.is_finite()) return hop;
    total += hop.us;
  }
  return Delay::finite(total);
}

std::map<std::size_t, Delay> all_avb_wcds(const TestCase& tc, const Assignment& assignment,
                                          const GclSchedule& gcl) {
  // Same arithmetic as avb_wcd, with per-link aggregates computed once.
  const std::size_t n_links = tc.topology().links().size();
  std::vector<Aggregate> agg(n_links);
  for (std::size_t i = 0; i < tc.flow_count(); ++i) {
    if (assignment.types[i] != TrafficType::AVB) continue;
    const ArrivalCurve a = arrival_curve(tc.flow(i));
    for (auto l : tc.route_links(i)) {
      agg[l].burst_bits += a.burst_bits;
      agg[l].rate_bps += a.rate_bps;
    }
  }
  std::vector<std::optional<Delay>> per_link(n_links);

  std::map<std::size_t, Delay> out;
  for (std::size_t i = 0; i < tc.flow_count(); ++i) {
    if (assignment.types[i] != TrafficType::AVB) continue;
    Delay total = Delay::finite(0);
    for (auto l : tc.route_links(i)) {
      if (!per_link[l]) per_link[l] = bound(agg[l], try_service(l, gcl, tc));
      if (!per_link[l]->is_finite()) {
        total = *per_link[l];
        break;
      }
      total.us += per_link[l]->us;
    }
    out.emplace(i, total);
  }
  return out;
}

}  // namespace tta
