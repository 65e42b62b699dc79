#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "tta/model.hpp"
#include "tta/rng.hpp"

namespace tta::testing {

inline constexpr std::int64_t kGbps = 1'000'000'000;

inline Flow make_flow(std::string id, std::string src, std::string dst, std::int64_t period, std::int64_t payload,
                      std::int64_t deadline, Criticality crit, std::vector<std::string> route) {
  return {std::move(id), std::move(src), std::move(dst), period, payload, deadline, crit, std::move(route)};
}

/// Two end stations A and B joined by the single link L.
inline Topology single_link_topology() {
  return Topology({{"A", NodeKind::EndStation}, {"B", NodeKind::EndStation}}, {{"L", "A", "B", kGbps}});
}

/// ES1 – SW1 – ES2 (links e1, e2).
inline Topology line_topology() {
  return Topology({{"ES1", NodeKind::EndStation}, {"ES2", NodeKind::EndStation}, {"SW1", NodeKind::Switch}},
                  {{"e1", "ES1", "SW1", kGbps}, {"e2", "SW1", "ES2", kGbps}});
}

/// Flow over the single link L.
inline Flow link_flow(std::string id, std::int64_t period, std::int64_t payload, std::int64_t deadline,
                      Criticality crit = Criticality::SRT) {
  return make_flow(std::move(id), "A", "B", period, payload, deadline, crit, {"L"});
}

/// Random connected case with at most `max_nodes` nodes and `max_flows`
/// flows. Periods come from {250, 500, 1000} µs so every grid has at most 64
/// slots per link.
inline TestCase random_small_case(Rng& rng, int max_nodes = 8, int max_flows = 12) {
  const int n_sw = static_cast<int>(uniform_int(rng, 1, 3));
  const int n_es = static_cast<int>(uniform_int(rng, 2, max_nodes - n_sw));
  std::vector<Node> nodes;
  std::vector<Link> links;
  for (int s = 1; s <= n_sw; ++s) nodes.push_back({"SW" + std::to_string(s), NodeKind::Switch});
  for (int e = 1; e <= n_es; ++e) nodes.push_back({"ES" + std::to_string(e), NodeKind::EndStation});
  int next = 1;
  auto add = [&](const std::string& a, const std::string& b) {
    links.push_back({"e" + std::to_string(next++), a, b, kGbps});
  };
  for (int s = 1; s < n_sw; ++s) add("SW" + std::to_string(s), "SW" + std::to_string(s + 1));
  if (n_sw == 3 && uniform_int(rng, 0, 1) == 1) add("SW3", "SW1");
  for (int e = 1; e <= n_es; ++e) add("ES" + std::to_string(e), "SW" + std::to_string(uniform_int(rng, 1, n_sw)));
  Topology topo(nodes, links);

  const std::int64_t periods[] = {250, 500, 1000};
  const int n_flows = static_cast<int>(uniform_int(rng, 1, max_flows));
  std::vector<Flow> flows;
  for (int k = 1; k <= n_flows; ++k) {
    const auto src = uniform_int(rng, 1, n_es);
    auto dst = uniform_int(rng, 1, n_es - 1);
    if (dst >= src) ++dst;
    const std::int64_t period = periods[uniform_int(rng, 0, 2)];
    const std::int64_t payload = uniform_int(rng, 64, 1500);
    const std::int64_t deadline = uniform_int(rng, std::max<std::int64_t>(1, period / 8), period);
    const Criticality crit = uniform_int(rng, 0, 1) == 0 ? Criticality::HRT : Criticality::SRT;
    const std::string s = "ES" + std::to_string(src), d = "ES" + std::to_string(dst);
    flows.push_back(make_flow("f" + std::to_string(k), s, d, period, payload, deadline, crit,
                              shortest_route(topo, s, d)));
  }
  TestCase tc(topo, flows);
  tc.validate();
  return tc;
}

inline Assignment random_assignment(std::size_t n, Rng& rng) {
  Assignment a(n);
  for (auto& t : a.types) t = uniform_int(rng, 0, 1) == 0 ? TrafficType::TT : TrafficType::AVB;
  return a;
}

}  // namespace tta::testing
