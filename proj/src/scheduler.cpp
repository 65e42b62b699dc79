#include "tta/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tta/errors.hpp"

namespace tta {

namespace {

constexpr double kEps = 1e-9;

std::int64_t exact_ratio(double num, double den, const char* what) {
  const double q = num / den;
  const double r = std::round(q);
  if (std::fabs(q - r) > kEps * std::max(1.0, std::fabs(q)))
    throw ValidationError(std::string(what) + " is not a whole number of slots");
  return static_cast<std::int64_t>(r);
}

// First cell of instance k: its release k·P rounded up to the slot grid.
std::int64_t release_cell(std::int64_t instance, std::int64_t period_us, double slot_us) {
  const double cells = static_cast<double>(instance * period_us) / slot_us;
  return static_cast<std::int64_t>(std::ceil(cells - kEps));
}

bool run_free(const SlotGrid& grid, std::size_t link, std::int64_t start, std::int64_t len) {
  const auto n = static_cast<std::int64_t>(grid.cells_per_link());
  if (start < 0 || start + len > n) return false;
  for (std::int64_t c = start; c < start + len; ++c)
    if (!grid.is_free(link, static_cast<std::size_t>(c))) return false;
  return true;
}

// Earliest start >= from with `len` consecutive free cells, or -1.
std::int64_t earliest_run(const SlotGrid& grid, std::size_t link, std::int64_t from, std::int64_t len) {
  const auto n = static_cast<std::int64_t>(grid.cells_per_link());
  std::int64_t run = 0;
  for (std::int64_t c = std::max<std::int64_t>(from, 0); c < n; ++c) {
    run = grid.is_free(link, static_cast<std::size_t>(c)) ? run + 1 : 0;
    if (run == len) return c - len + 1;
  }
  return -1;
}

void mark(SlotGrid& grid, const HopCells& hop, std::size_t flow, std::size_t instance) {
  for (std::int64_t c = hop.start; c < hop.end(); ++c)
    grid.at(hop.link, static_cast<std::size_t>(c)) = {static_cast<std::int32_t>(flow),
                                                      static_cast<std::int32_t>(instance)};
}

void clear(SlotGrid& grid, const HopCells& hop) {
  for (std::int64_t c = hop.start; c < hop.end(); ++c) grid.at(hop.link, static_cast<std::size_t>(c)) = {};
}

}  // namespace

SlotGrid::SlotGrid(std::size_t links, std::int64_t hyperperiod_us, double slot_us)
    : links_(links), slot_us_(slot_us), hyperperiod_us_(hyperperiod_us) {
  if (!(slot_us > 0)) throw ValidationError("slot length must be positive");
  cells_ = static_cast<std::size_t>(exact_ratio(static_cast<double>(hyperperiod_us), slot_us, "hyperperiod"));
  data_.assign(links_ * cells_, Cell{});
}

std::size_t SlotGrid::occupied(std::size_t link) const {
  std::size_t n = 0;
  for (std::size_t c = 0; c < cells_; ++c) n += !is_free(link, c);
  return n;
}

std::size_t SlotGrid::longest_occupied_run(std::size_t link) const {
  if (cells_ == 0) return 0;
  // Rotate so the scan starts right after a free cell; a run may wrap around H.
  std::size_t first_free = cells_;
  for (std::size_t c = 0; c < cells_; ++c)
    if (is_free(link, c)) {
      first_free = c;
      break;
    }
  if (first_free == cells_) return cells_;
  std::size_t best = 0, run = 0;
  for (std::size_t i = 1; i <= cells_; ++i) {
    const std::size_t c = (first_free + i) % cells_;
    run = is_free(link, c) ? 0 : run + 1;
    best = std::max(best, run);
  }
  return best;
}

std::vector<std::vector<GateWindow>> GclSchedule::windows() const {
  std::vector<std::vector<GateWindow>> out(grid.link_count());
  const double slot = grid.slot_us();
  for (std::size_t l = 0; l < grid.link_count(); ++l) {
    std::size_t c = 0;
    while (c < grid.cells_per_link()) {
      const Cell cell = grid.at(l, c);
      if (cell.empty()) {
        ++c;
        continue;
      }
      std::size_t e = c + 1;
      while (e < grid.cells_per_link() && grid.at(l, e) == cell) ++e;
      out[l].push_back({static_cast<double>(c) * slot, static_cast<double>(e) * slot,
                        static_cast<std::size_t>(cell.flow)});
      c = e;
    }
  }
  return out;
}

SlotGrid make_grid(const TestCase& tc) {
  const std::int64_t h = tc.flows().empty() ? 0 : hyperperiod(tc.flows());
  return SlotGrid(tc.topology().links().size(), h, tc.params().slot_us);
}

GclSchedule empty_schedule(const TestCase& tc) { return GclSchedule{make_grid(tc), {}}; }

std::vector<std::size_t> canonical_order(const TestCase& tc) {
  std::vector<std::size_t> order(tc.flow_count());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Flow& fa = tc.flow(a);
    const Flow& fb = tc.flow(b);
    if (fa.is_hrt() != fb.is_hrt()) return fa.is_hrt();
    if (fa.deadline_us != fb.deadline_us) return fa.deadline_us < fb.deadline_us;
    return fa.id < fb.id;
  });
  return order;
}

std::optional<FlowPlacement> schedule_flow_asap(GclSchedule& gcl, const TestCase& tc,
                                                std::size_t flow) {
  if (gcl.placements.count(flow)) throw ArgumentError("flow " + tc.flow(flow).id + " already scheduled");
  SlotGrid& grid = gcl.grid;
  const Flow& f = tc.flow(flow);
  const std::int64_t h = grid.hyperperiod_us();
  if (h <= 0 || h % f.period_us != 0)
    throw ArgumentError("grid hyperperiod not divisible by period of flow " + f.id);

  const double slot = grid.slot_us();
  const std::int64_t len = frame_slots(f, slot, tc.topology().rate_bps());
  const std::int64_t instances = h / f.period_us;
  const auto& route = tc.route_links(flow);

  FlowPlacement placement;
  placement.flow = flow;
  placement.instances.assign(static_cast<std::size_t>(instances), std::vector<HopCells>(route.size()));

  for (std::int64_t offset = 0; static_cast<double>(offset) * slot < static_cast<double>(f.period_us) - kEps;
       ++offset) {
    // Cells are written as they are claimed so later instances see earlier
    // ones; everything is rolled back if this offset fails.
    std::vector<HopCells> claimed;
    bool ok = true;
    for (std::int64_t k = 0; k < instances && ok; ++k) {
      std::int64_t from = release_cell(k, f.period_us, slot) + offset;
      for (std::size_t hop = 0; hop < route.size(); ++hop) {
        const std::size_t link = route[hop];
        std::int64_t start;
        if (hop == 0)
          start = run_free(grid, link, from, len) ? from : -1;
        else
          start = earliest_run(grid, link, from, len);
        if (start < 0) {
          ok = false;
          break;
        }
        HopCells cells{link, start, len};
        mark(grid, cells, flow, static_cast<std::size_t>(k));
        claimed.push_back(cells);
        placement.instances[static_cast<std::size_t>(k)][hop] = cells;
        from = cells.end();
      }
    }
    if (ok) {
      placement.offset_slots = offset;
      placement.offset_us = static_cast<double>(offset) * slot;
      gcl.placements.emplace(flow, placement);
      return placement;
    }
    for (const auto& cells : claimed) clear(grid, cells);
  }
  return std::nullopt;
}

void unschedule_flow(GclSchedule& gcl, std::size_t flow) {
  auto it = gcl.placements.find(flow);
  if (it == gcl.placements.end()) return;
  for (const auto& inst : it->second.instances)
    for (const auto& hop : inst) clear(gcl.grid, hop);
  gcl.placements.erase(it);
}

double tt_wcd(const GclSchedule& gcl, const TestCase& tc, std::size_t flow) {
  auto it = gcl.placements.find(flow);
  if (it == gcl.placements.end()) throw NotScheduledError("flow " + tc.flow(flow).id + " is not scheduled");
  const double slot = gcl.grid.slot_us();
  const auto period = static_cast<double>(tc.flow(flow).period_us);
  double worst = 0;
  for (std::size_t k = 0; k < it->second.instances.size(); ++k) {
    const auto& hops = it->second.instances[k];
    if (hops.empty()) continue;
    const double end = static_cast<double>(hops.back().end()) * slot;
    worst = std::max(worst, end - static_cast<double>(k) * period);
  }
  return worst;
}

GclSchedule build_gcl(const TestCase& tc, Assignment& assignment) {
  if (assignment.size() != tc.flow_count()) throw ArgumentError("assignment does not cover the test case");
  GclSchedule gcl = empty_schedule(tc);
  for (std::size_t i : canonical_order(tc)) {
    if (assignment.types[i] != TrafficType::TT) {
      assignment.status[i] = FlowStatus::Scheduled;
      continue;
    }
    bool scheduled = false;
    if (schedule_flow_asap(gcl, tc, i)) {
      const double bound = tc.flow(i).is_hrt() ? static_cast<double>(tc.flow(i).deadline_us)
                                               : tc.buffer_deadline_us(i);
      scheduled = tt_wcd(gcl, tc, i) <= bound;
      if (!scheduled) unschedule_flow(gcl, i);
    }
    assignment.status[i] = scheduled ? FlowStatus::Scheduled : FlowStatus::Unscheduled;
  }
  return gcl;
}

std::size_t ConstraintReport::count(ViolationKind kind) const {
  return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                [&](const Violation& v) { return v.kind == kind; }));
}

ConstraintReport check_constraints(const TestCase& tc, const Assignment& assignment,
                                   const GclSchedule& gcl) {
  ConstraintReport report;
  const auto& links = tc.topology().links();
  const SlotGrid& grid = gcl.grid;

  // Slot conflicts, recounted from the placements rather than trusting the grid.
  std::vector<std::uint32_t> use(grid.link_count() * grid.cells_per_link(), 0);
  for (const auto& [flow, placement] : gcl.placements)
    for (const auto& inst : placement.instances)
      for (const auto& hop : inst)
        for (std::int64_t c = hop.start; c < hop.end(); ++c) {
          if (hop.link >= grid.link_count() || c < 0 ||
              c >= static_cast<std::int64_t>(grid.cells_per_link())) {
            report.violations.push_back({ViolationKind::SlotConflict, tc.flow(flow).id,
                                         "placement outside the hyperperiod"});
            continue;
          }
          if (++use[hop.link * grid.cells_per_link() + static_cast<std::size_t>(c)] == 2) {
            std::ostringstream msg;
            msg << "cell " << c << " holds more than one TT frame";
            report.violations.push_back({ViolationKind::SlotConflict, links[hop.link].id, msg.str()});
          }
        }

  // Link capacity over TT + AVB demand.
  std::vector<double> demand(links.size(), 0.0);
  for (std::size_t i = 0; i < tc.flow_count(); ++i) {
    const bool carried = assignment.types[i] == TrafficType::AVB ||
                         assignment.status[i] == FlowStatus::Scheduled;
    if (!carried) continue;
    const Flow& f = tc.flow(i);
    const double rate = 8.0 * static_cast<double>(f.payload_bytes) * 1e6 / static_cast<double>(f.period_us);
    for (auto l : tc.route_links(i)) demand[l] += rate;
  }
  for (std::size_t l = 0; l < links.size(); ++l)
    if (demand[l] > static_cast<double>(links[l].rate_bps)) {
      std::ostringstream msg;
      msg << "demand " << demand[l] << " bps exceeds capacity " << links[l].rate_bps << " bps";
      report.violations.push_back({ViolationKind::LinkCapacity, links[l].id, msg.str()});
    }

  for (const auto& [flow, placement] : gcl.placements) {
    const Flow& f = tc.flow(flow);
    if (placement.offset_us >= static_cast<double>(f.period_us))
      report.violations.push_back({ViolationKind::Offset, f.id, "offset not below period"});
    if (f.is_hrt()) {
      const double wcd = tt_wcd(gcl, tc, flow);
      if (wcd > static_cast<double>(f.deadline_us)) {
        std::ostringstream msg;
        msg << "TT delay " << wcd << " us exceeds deadline " << f.deadline_us << " us";
        report.violations.push_back({ViolationKind::Deadline, f.id, msg.str()});
      }
    }
  }
  return report;
}

}  // namespace tta
