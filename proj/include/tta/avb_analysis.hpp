#pragma once

#include <map>

#include "tta/delay.hpp"
#include "tta/model.hpp"
#include "tta/scheduler.hpp"

namespace tta {

/// Leaky-bucket arrival curve α(t) = burst + rate·t.
struct ArrivalCurve {
  double burst_bits = 0;
  double rate_bps = 0;
};

/// Rate-latency service curve β(t) = R·(t − T)⁺.
struct LinkService {
  double rate_bps = 0;
  double latency_us = 0;
};

/// One frame of burst, one frame per period of sustained rate.
ArrivalCurve arrival_curve(const Flow& flow);

/// Class-A service left over by the gate schedule on `link`:
///   R = idleSlope · C · (1 − ρ_TT)
///   T = t_MTU + longest contiguous TT window
/// where ρ_TT is the TT-occupied share of the hyperperiod and t_MTU the
/// non-preemptive blocking of one lower-priority MTU frame.
/// Throws DegenerateServiceError when the link is fully gated to TT.
LinkService link_service(std::size_t link, const GclSchedule& gcl, const TestCase& tc);

/// Horizontal deviation between the aggregate AVB arrival curve on `link`
/// and its service curve: T + ΣB / R. Unstable when Σr > R.
Delay hop_delay_bound(std::size_t flow, std::size_t link, const GclSchedule& gcl, const TestCase& tc,
                      const Assignment& assignment);

/// Sum of per-hop bounds along the route; Unstable if any hop is.
Delay avb_wcd(std::size_t flow, const GclSchedule& gcl, const TestCase& tc, const Assignment& assignment);

/// avb_wcd for every AVB-assigned flow, keyed by flow index.
std::map<std::size_t, Delay> all_avb_wcds(const TestCase& tc, const Assignment& assignment,
                                          const GclSchedule& gcl);

}  // namespace tta
