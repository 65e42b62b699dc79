#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tta/model.hpp"

namespace tta {

struct Cell {
  std::int32_t flow = -1;  // flow index into the test case, -1 when empty
  std::int32_t instance = -1;

  bool empty() const { return flow < 0; }
  bool operator==(const Cell&) const = default;
};

/// Per-link occupancy of the hyperperiod, discretised into equal slots.
class SlotGrid {
 public:
  SlotGrid() = default;
  /// Throws ValidationError unless hyperperiod_us / slot_us is integral.
  SlotGrid(std::size_t links, std::int64_t hyperperiod_us, double slot_us);

  std::size_t link_count() const { return links_; }
  std::size_t cells_per_link() const { return cells_; }
  double slot_us() const { return slot_us_; }
  std::int64_t hyperperiod_us() const { return hyperperiod_us_; }

  const Cell& at(std::size_t link, std::size_t slot) const { return data_[link * cells_ + slot]; }
  Cell& at(std::size_t link, std::size_t slot) { return data_[link * cells_ + slot]; }
  bool is_free(std::size_t link, std::size_t slot) const { return at(link, slot).empty(); }

  std::size_t occupied(std::size_t link) const;

  /// Longest run of occupied cells on `link`, treating the grid as cyclic.
  std::size_t longest_occupied_run(std::size_t link) const;

  bool operator==(const SlotGrid&) const = default;

 private:
  std::size_t links_ = 0;
  std::size_t cells_ = 0;
  double slot_us_ = 0;
  std::int64_t hyperperiod_us_ = 0;
  std::vector<Cell> data_;
};

struct HopCells {
  std::size_t link = 0;
  std::int64_t start = 0;  // first cell index
  std::int64_t length = 0;

  std::int64_t end() const { return start + length; }
  bool operator==(const HopCells&) const = default;
};

/// Cells taken by one TT flow: hops[instance][hop]. Also the ScheduleDelta of
/// schedule_flow_asap.
struct FlowPlacement {
  std::size_t flow = 0;
  std::int64_t offset_slots = 0;
  double offset_us = 0;
  std::vector<std::vector<HopCells>> instances;

  bool operator==(const FlowPlacement&) const = default;
};

struct GateWindow {
  double open_us = 0;
  double close_us = 0;
  std::size_t flow = 0;

  bool operator==(const GateWindow&) const = default;
};

struct GclSchedule {
  SlotGrid grid;
  std::map<std::size_t, FlowPlacement> placements;  // keyed by flow index

  /// Gate-open windows per link, sorted; adjacent cells of one instance merge.
  std::vector<std::vector<GateWindow>> windows() const;

  bool operator==(const GclSchedule&) const = default;
};

/// Grid sized for the test case's hyperperiod (zero cells for a flowless case).
SlotGrid make_grid(const TestCase& tc);
GclSchedule empty_schedule(const TestCase& tc);

/// HRT first, then ascending deadline, ties by flow id.
std::vector<std::size_t> canonical_order(const TestCase& tc);

/// ASAP placement of one flow: the smallest offset (in slot steps) at which
/// every instance fits on every hop. On success the cells are committed to
/// `gcl` and the placement is returned; on failure `gcl` is unchanged.
std::optional<FlowPlacement> schedule_flow_asap(GclSchedule& gcl, const TestCase& tc,
                                                std::size_t flow);

/// Releases the cells of a placed flow. No-op if the flow is not placed.
void unschedule_flow(GclSchedule& gcl, std::size_t flow);

/// Worst-case TT delay in µs over all instances (end of last hop − release).
/// Throws NotScheduledError.
double tt_wcd(const GclSchedule& gcl, const TestCase& tc, std::size_t flow);

/// Schedules every TT flow of `assignment` in canonical order. Flows that are
/// infeasible, or whose TT delay breaks the deadline (HRT) or buffer deadline
/// (SRT), keep no cells and are marked Unscheduled.
GclSchedule build_gcl(const TestCase& tc, Assignment& assignment);

enum class ViolationKind { SlotConflict, LinkCapacity, Offset, Deadline };

struct Violation {
  ViolationKind kind;
  std::string subject;  // link or flow id
  std::string detail;
};

struct ConstraintReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::size_t count(ViolationKind kind) const;
};

ConstraintReport check_constraints(const TestCase& tc, const Assignment& assignment,
                                   const GclSchedule& gcl);

// Output file -----------------------------------------------------------------

struct OutputEntry {
  std::string flow;
  TrafficType type = TrafficType::AVB;
  FlowStatus status = FlowStatus::Scheduled;
  bool operator==(const OutputEntry&) const = default;
};

struct OutputWindow {
  double open_us = 0;
  double close_us = 0;
  std::string flow;
  bool operator==(const OutputWindow&) const = default;
};

struct OutputLink {
  std::string link;
  std::vector<OutputWindow> windows;
  bool operator==(const OutputLink&) const = default;
};

struct OutputOffset {
  std::string flow;
  double offset_us = 0;
  bool operator==(const OutputOffset&) const = default;
};

/// In-memory form of the assignment/GCL output file.
struct AssignmentFile {
  std::vector<OutputEntry> assignment;
  std::vector<OutputLink> gcl;
  std::vector<OutputOffset> offsets;
  bool operator==(const AssignmentFile&) const = default;
};

AssignmentFile make_assignment_file(const TestCase& tc, const Assignment& assignment,
                                    const GclSchedule& gcl);
std::string serialize_assignment_file(const AssignmentFile& file);
AssignmentFile parse_assignment_file(const std::string& text);

void save_assignment(const TestCase& tc, const Assignment& assignment, const GclSchedule& gcl,
                     const std::filesystem::path& path);
AssignmentFile load_assignment_file(const std::filesystem::path& path);

/// Rebuilds assignment + schedule from an output file, for checking it against a case.
std::pair<Assignment, GclSchedule> restore_assignment(const TestCase& tc, const AssignmentFile& file);

}  // namespace tta
