#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace tta {

enum class NodeKind { EndStation, Switch };

struct Node {
  std::string id;
  NodeKind kind = NodeKind::EndStation;

  bool operator==(const Node&) const = default;
};

/// Full-duplex physical link, modelled as one shared slot resource.
struct Link {
  std::string id;
  std::string a;
  std::string b;
  std::int64_t rate_bps = 0;

  bool operator==(const Link&) const = default;
};

class Topology {
 public:
  Topology() = default;
  Topology(std::vector<Node> nodes, std::vector<Link> links);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }

  std::optional<std::size_t> node_index(const std::string& id) const;
  std::optional<std::size_t> link_index(const std::string& id) const;

  /// Uniform link rate C in bits/s (0 for a link-less topology).
  std::int64_t rate_bps() const;

  /// Throws ValidationError naming the first violated invariant.
  void validate() const;

  std::size_t count(NodeKind kind) const;

  bool operator==(const Topology& other) const {
    return nodes_ == other.nodes_ && links_ == other.links_;
  }

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::unordered_map<std::string, std::size_t> node_lookup_;
  std::unordered_map<std::string, std::size_t> link_lookup_;
};

enum class Criticality { HRT, SRT };

struct Flow {
  std::string id;
  std::string src;
  std::string dst;
  std::int64_t period_us = 0;
  std::int64_t payload_bytes = 0;
  std::int64_t deadline_us = 0;
  Criticality criticality = Criticality::HRT;
  std::vector<std::string> route;  // link ids, src to dst

  bool is_hrt() const { return criticality == Criticality::HRT; }
  bool operator==(const Flow&) const = default;
};

struct CaseParams {
  double utility_cap = 6.0;
  double bd_factor = 1.5;
  double idle_slope = 0.75;
  double slot_us = 15.625;

  bool operator==(const CaseParams&) const = default;
};

class TestCase {
 public:
  TestCase() = default;
  TestCase(Topology topology, std::vector<Flow> flows, CaseParams params = {});

  const Topology& topology() const { return topology_; }
  const std::vector<Flow>& flows() const { return flows_; }
  const CaseParams& params() const { return params_; }
  const Flow& flow(std::size_t i) const { return flows_[i]; }
  std::size_t flow_count() const { return flows_.size(); }

  /// Route of flow i as link indices into topology().links().
  const std::vector<std::size_t>& route_links(std::size_t i) const { return routes_[i]; }

  std::optional<std::size_t> flow_index(const std::string& id) const;

  std::size_t hrt_count() const;
  std::size_t srt_count() const;

  /// Buffer deadline of flow i in µs (bd_factor × deadline).
  double buffer_deadline_us(std::size_t i) const;

  /// Throws ValidationError naming the first violated invariant.
  void validate() const;

  bool operator==(const TestCase& other) const {
    return topology_ == other.topology_ && flows_ == other.flows_ && params_ == other.params_;
  }

 private:
  Topology topology_;
  std::vector<Flow> flows_;
  CaseParams params_;
  std::vector<std::vector<std::size_t>> routes_;
  std::unordered_map<std::string, std::size_t> flow_lookup_;
};

enum class TrafficType { TT, AVB };
enum class FlowStatus { Scheduled, Unscheduled };

/// Traffic-type assignment, aligned with TestCase::flows() by position.
struct Assignment {
  std::vector<TrafficType> types;
  std::vector<FlowStatus> status;

  Assignment() = default;
  explicit Assignment(std::size_t n, TrafficType type = TrafficType::AVB)
      : types(n, type), status(n, FlowStatus::Scheduled) {}

  std::size_t size() const { return types.size(); }
  std::size_t tt_count() const;
  bool operator==(const Assignment&) const = default;
};

const char* to_string(NodeKind kind);
const char* to_string(Criticality crc);
const char* to_string(TrafficType type);
const char* to_string(FlowStatus status);

// Time arithmetic -----------------------------------------------------------

inline constexpr std::int64_t kMtuBytes = 1500;

/// LCM of all flow periods in µs. Throws OverflowError past int64 range and
/// ArgumentError on an empty list or non-positive period.
std::int64_t hyperperiod(const std::vector<Flow>& flows);

/// Number of MTU-sized slots needed by one frame of `flow`.
std::int64_t frame_slots(const Flow& flow, double slot_us, std::int64_t rate_bps);

// Routing ---------------------------------------------------------------------

/// Minimum-hop route as link ids. Ties go to the lexicographically smallest
/// node sequence. End stations never forward. Throws NoPathError.
std::vector<std::string> shortest_route(const Topology& topology, const std::string& src,
                                        const std::string& dst);

// Synthetic cases -----------------------------------------------------------

/// Ring of `n_sw` switches with `n_es` end stations attached round-robin, and
/// random unicast flows. Pure function of its arguments.
TestCase gen_ring_testcase(int n_es, int n_sw, int n_hrt, int n_srt, std::uint64_t seed);

// File I/O ------------------------------------------------------------------

TestCase parse_testcase(const std::string& text);
TestCase load_testcase(const std::filesystem::path& path);
std::string serialize_testcase(const TestCase& tc);
void save_testcase(const TestCase& tc, const std::filesystem::path& path);

/// Writes `contents` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace tta
