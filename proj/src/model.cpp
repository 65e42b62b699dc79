#include "tta/model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <set>

#include "tta/errors.hpp"

namespace tta {

Topology::Topology(std::vector<Node> nodes, std::vector<Link> links)
    : nodes_(std::move(nodes)), links_(std::move(links)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) node_lookup_.emplace(nodes_[i].id, i);
  for (std::size_t i = 0; i < links_.size(); ++i) link_lookup_.emplace(links_[i].id, i);
}

std::optional<std::size_t> Topology::node_index(const std::string& id) const {
  auto it = node_lookup_.find(id);
  if (it == node_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Topology::link_index(const std::string& id) const {
  auto it = link_lookup_.find(id);
  if (it == link_lookup_.end()) return std::nullopt;
  return it->second;
}

std::int64_t Topology::rate_bps() const { return links_.empty() ? 0 : links_.front().rate_bps; }

std::size_t Topology::count(NodeKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [&](const Node& n) { return n.kind == kind; }));
}

void Topology::validate() const {
  if (nodes_.empty()) throw ValidationError("topology has no nodes");
  if (node_lookup_.size() != nodes_.size()) {
    std::set<std::string> seen;
    for (const auto& n : nodes_)
      if (!seen.insert(n.id).second) throw ValidationError("duplicate node id " + n.id);
  }
  if (link_lookup_.size() != links_.size()) {
    std::set<std::string> seen;
    for (const auto& l : links_)
      if (!seen.insert(l.id).second) throw ValidationError("duplicate link id " + l.id);
  }
  for (const auto& l : links_) {
    if (!node_index(l.a)) throw ValidationError("link " + l.id + " references unknown node " + l.a);
    if (!node_index(l.b)) throw ValidationError("link " + l.id + " references unknown node " + l.b);
    if (l.a == l.b) throw ValidationError("link " + l.id + " is a self-loop");
    if (l.rate_bps <= 0) throw ValidationError("link " + l.id + " has non-positive rate");
    if (l.rate_bps != links_.front().rate_bps)
      throw ValidationError("link " + l.id + " rate differs from uniform link rate");
  }

  // connectivity
  std::vector<std::vector<std::size_t>> adj(nodes_.size());
  for (const auto& l : links_) {
    auto a = *node_index(l.a), b = *node_index(l.b);
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<bool> seen(nodes_.size(), false);
  std::deque<std::size_t> queue{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!queue.empty()) {
    auto u = queue.front();
    queue.pop_front();
    for (auto v : adj[u])
      if (!seen[v]) {
        seen[v] = true;
        ++reached;
        queue.push_back(v);
      }
  }
  if (reached != nodes_.size()) {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (!seen[i]) throw ValidationError("topology is not connected: " + nodes_[i].id + " unreachable");
  }
}

TestCase::TestCase(Topology topology, std::vector<Flow> flows, CaseParams params)
    : topology_(std::move(topology)), flows_(std::move(flows)), params_(params) {
  routes_.resize(flows_.size());
  for (std::size_t i = 0; i < flows_.size(); ++i) {
    flow_lookup_.emplace(flows_[i].id, i);
    for (const auto& link : flows_[i].route) {
      auto idx = topology_.link_index(link);
      // Unknown links are reported by validate(); keep the index list partial.
      if (idx) routes_[i].push_back(*idx);
    }
  }
}

std::optional<std::size_t> TestCase::flow_index(const std::string& id) const {
  auto it = flow_lookup_.find(id);
  if (it == flow_lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t TestCase::hrt_count() const {
  return static_cast<std::size_t>(
      std::count_if(flows_.begin(), flows_.end(), [](const Flow& f) { return f.is_hrt(); }));
}

std::size_t TestCase::srt_count() const { return flows_.size() - hrt_count(); }

double TestCase::buffer_deadline_us(std::size_t i) const {
  return params_.bd_factor * static_cast<double>(flows_[i].deadline_us);
}

void TestCase::validate() const {
  topology_.validate();

  if (!(params_.utility_cap > 0)) throw ValidationError("utility_cap must be > 0");
  if (!(params_.bd_factor > 1)) throw ValidationError("bd_factor must be > 1");
  if (!(params_.idle_slope > 0 && params_.idle_slope <= 1))
    throw ValidationError("idle_slope must lie in (0, 1]");
  if (!(params_.slot_us > 0)) throw ValidationError("slot_us must be > 0");
  const double slot_bits = params_.slot_us * 1e-6 * static_cast<double>(topology_.rate_bps());
  if (!topology_.links().empty() && slot_bits + 1e-9 < 8.0 * kMtuBytes)
    throw ValidationError("slot_us too short to carry one MTU at the link rate");

  std::set<std::string> ids;
  for (std::size_t i = 0; i < flows_.size(); ++i) {
    const Flow& f = flows_[i];
    if (!ids.insert(f.id).second) throw ValidationError("duplicate flow id " + f.id);
    if (!topology_.node_index(f.src)) throw ValidationError("flow " + f.id + " has unknown src " + f.src);
    if (!topology_.node_index(f.dst)) throw ValidationError("flow " + f.id + " has unknown dst " + f.dst);
    if (f.src == f.dst) throw ValidationError("flow " + f.id + " has src == dst");
    if (f.period_us <= 0) throw ValidationError("flow " + f.id + " period must be positive");
    if (f.payload_bytes < 1) throw ValidationError("flow " + f.id + " payload must be >= 1 byte");
    if (f.deadline_us <= 0) throw ValidationError("flow " + f.id + " deadline must be positive");
    if (f.route.empty()) throw ValidationError("flow " + f.id + " has an empty route");
    for (const auto& link : f.route)
      if (!topology_.link_index(link)) throw ValidationError(link);

    // Walk the route: simple path from src to dst.
    std::string at = f.src;
    std::set<std::string> visited{at};
    for (const auto& link_id : f.route) {
      const Link& l = topology_.links()[*topology_.link_index(link_id)];
      std::string next;
      if (l.a == at)
        next = l.b;
      else if (l.b == at)
        next = l.a;
      else
        throw ValidationError("flow " + f.id + " route link " + link_id + " does not touch " + at);
      if (!visited.insert(next).second)
        throw ValidationError("flow " + f.id + " route revisits node " + next);
      at = next;
    }
    if (at != f.dst) throw ValidationError("flow " + f.id + " route does not end at dst " + f.dst);
  }
}

std::size_t Assignment::tt_count() const {
  return static_cast<std::size_t>(std::count(types.begin(), types.end(), TrafficType::TT));
}

const char* to_string(NodeKind kind) { return kind == NodeKind::Switch ? "SW" : "ES"; }
const char* to_string(Criticality crc) { return crc == Criticality::HRT ? "HRT" : "SRT"; }
const char* to_string(TrafficType type) { return type == TrafficType::TT ? "TT" : "AVB"; }
const char* to_string(FlowStatus status) {
  return status == FlowStatus::Scheduled ? "scheduled" : "unscheduled";
}

std::int64_t hyperperiod(const std::vector<Flow>& flows) {
  if (flows.empty()) throw ArgumentError("hyperperiod of an empty flow set");
  std::int64_t h = 1;
  for (const auto& f : flows) {
    if (f.period_us <= 0) throw ArgumentError("flow " + f.id + " has non-positive period");
    const std::int64_t g = std::gcd(h, f.period_us);
    const std::int64_t scale = f.period_us / g;
    if (h > std::numeric_limits<std::int64_t>::max() / scale)
      throw OverflowError("hyperperiod exceeds int64 range");
    h *= scale;
  }
  return h;
}

std::int64_t frame_slots(const Flow& flow, double slot_us, std::int64_t rate_bps) {
  if (slot_us * 1e-6 * static_cast<double>(rate_bps) + 1e-9 < 8.0 * kMtuBytes)
    throw ArgumentError("slot cannot carry one MTU at the given rate");
  return (flow.payload_bytes + kMtuBytes - 1) / kMtuBytes;
}

std::vector<std::string> shortest_route(const Topology& topology, const std::string& src,
                                        const std::string& dst) {
  auto s = topology.node_index(src);
  auto d = topology.node_index(dst);
  if (!s) throw ArgumentError("unknown src " + src);
  if (!d) throw ArgumentError("unknown dst " + dst);
  if (*s == *d) throw ArgumentError("src equals dst");

  const auto& nodes = topology.nodes();
  const auto& links = topology.links();
  struct Edge {
    std::size_t to;
    std::size_t link;
  };
  std::vector<std::vector<Edge>> adj(nodes.size());
  for (std::size_t i = 0; i < links.size(); ++i) {
    auto a = *topology.node_index(links[i].a), b = *topology.node_index(links[i].b);
    adj[a].push_back({b, i});
    adj[b].push_back({a, i});
  }

  // Hop distance to dst; end stations other than the endpoints do not relay.
  constexpr auto kInf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(nodes.size(), kInf);
  std::deque<std::size_t> queue{*d};
  dist[*d] = 0;
  while (!queue.empty()) {
    auto u = queue.front();
    queue.pop_front();
    if (u != *d && nodes[u].kind == NodeKind::EndStation) continue;
    for (const auto& e : adj[u])
      if (dist[e.to] == kInf) {
        dist[e.to] = dist[u] + 1;
        queue.push_back(e.to);
      }
  }
  if (dist[*s] == kInf) throw NoPathError("no path from " + src + " to " + dst);

  std::vector<std::string> route;
  std::size_t at = *s;
  while (at != *d) {
    const Edge* best = nullptr;
    for (const auto& e : adj[at]) {
      if (dist[e.to] + 1 != dist[at]) continue;
      if (e.to != *d && nodes[e.to].kind == NodeKind::EndStation) continue;
      if (!best || nodes[e.to].id < nodes[best->to].id ||
          (e.to == best->to && links[e.link].id < links[best->link].id))
        best = &e;
    }
    route.push_back(links[best->link].id);
    at = best->to;
  }
  return route;
}

}  // namespace tta
