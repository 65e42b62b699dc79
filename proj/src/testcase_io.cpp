#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tta/errors.hpp"
#include "tta/model.hpp"
#include "tta/scheduler.hpp"

namespace tta {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

NodeKind parse_kind(const std::string& s) {
  if (s == "ES" || s == "EndStation") return NodeKind::EndStation;
  if (s == "SW" || s == "Switch") return NodeKind::Switch;
  throw ParseError("unknown node kind '" + s + "'");
}

Criticality parse_criticality(const std::string& s) {
  if (s == "HRT") return Criticality::HRT;
  if (s == "SRT") return Criticality::SRT;
  throw ParseError("unknown criticality '" + s + "'");
}

TrafficType parse_type(const std::string& s) {
  if (s == "TT") return TrafficType::TT;
  if (s == "AVB") return TrafficType::AVB;
  throw ParseError("unknown traffic type '" + s + "'");
}

FlowStatus parse_status(const std::string& s) {
  if (s == "scheduled") return FlowStatus::Scheduled;
  if (s == "unscheduled") return FlowStatus::Unscheduled;
  throw ParseError("unknown flow status '" + s + "'");
}

template <typename Fn>
auto with_parse_errors(Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  }
}

}  // namespace

TestCase parse_testcase(const std::string& text) {
  TestCase tc = with_parse_errors([&] {
    const json doc = json::parse(text);
    const json& topo = doc.at("topology");

    std::vector<Node> nodes;
    for (const auto& n : topo.at("nodes"))
      nodes.push_back({n.at("id").get<std::string>(), parse_kind(n.at("kind").get<std::string>())});
    std::vector<Link> links;
    for (const auto& l : topo.at("links"))
      links.push_back({l.at("id").get<std::string>(), l.at("a").get<std::string>(),
                       l.at("b").get<std::string>(), l.at("rate_bps").get<std::int64_t>()});

    std::vector<Flow> flows;
    for (const auto& f : doc.at("flows")) {
      Flow flow;
      flow.id = f.at("id").get<std::string>();
      flow.src = f.at("src").get<std::string>();
      flow.dst = f.at("dst").get<std::string>();
      flow.period_us = f.at("period_us").get<std::int64_t>();
      flow.payload_bytes = f.at("payload_bytes").get<std::int64_t>();
      flow.deadline_us = f.at("deadline_us").get<std::int64_t>();
      flow.criticality = parse_criticality(f.at("criticality").get<std::string>());
      flow.route = f.at("route").get<std::vector<std::string>>();
      flows.push_back(std::move(flow));
    }

    const json& p = doc.at("params");
    CaseParams params;
    params.utility_cap = p.at("utility_cap").get<double>();
    params.bd_factor = p.at("bd_factor").get<double>();
    params.idle_slope = p.at("idle_slope").get<double>();
    params.slot_us = p.at("slot_us").get<double>();

    return TestCase(Topology(std::move(nodes), std::move(links)), std::move(flows), params);
  });
  tc.validate();
  return tc;
}

std::string serialize_testcase(const TestCase& tc) {
  ordered_json doc;
  ordered_json nodes = ordered_json::array();
  for (const auto& n : tc.topology().nodes()) nodes.push_back({{"id", n.id}, {"kind", to_string(n.kind)}});
  ordered_json links = ordered_json::array();
  for (const auto& l : tc.topology().links())
    links.push_back({{"id", l.id}, {"a", l.a}, {"b", l.b}, {"rate_bps", l.rate_bps}});
  doc["topology"] = {{"nodes", nodes}, {"links", links}};

  ordered_json flows = ordered_json::array();
  for (const auto& f : tc.flows())
    flows.push_back({{"id", f.id},
                     {"src", f.src},
                     {"dst", f.dst},
                     {"period_us", f.period_us},
                     {"payload_bytes", f.payload_bytes},
                     {"deadline_us", f.deadline_us},
                     {"criticality", to_string(f.criticality)},
                     {"route", f.route}});
  doc["flows"] = flows;

  const auto& p = tc.params();
  doc["params"] = {{"utility_cap", p.utility_cap},
                   {"bd_factor", p.bd_factor},
                   {"idle_slope", p.idle_slope},
                   {"slot_us", p.slot_us}};
  return doc.dump(2) + "\n";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

TestCase load_testcase(const std::filesystem::path& path) { return parse_testcase(read_file(path)); }

void save_testcase(const TestCase& tc, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_testcase(tc));
}

// Assignment output -----------------------------------------------------------

AssignmentFile make_assignment_file(const TestCase& tc, const Assignment& assignment,
                                    const GclSchedule& gcl) {
  AssignmentFile file;
  for (std::size_t i = 0; i < tc.flow_count(); ++i)
    file.assignment.push_back({tc.flow(i).id, assignment.types[i], assignment.status[i]});

  const auto windows = gcl.windows();
  for (std::size_t l = 0; l < windows.size(); ++l) {
    if (windows[l].empty()) continue;
    OutputLink link{tc.topology().links()[l].id, {}};
    for (const auto& w : windows[l]) link.windows.push_back({w.open_us, w.close_us, tc.flow(w.flow).id});
    file.gcl.push_back(std::move(link));
  }
  for (const auto& [flow, placement] : gcl.placements)
    file.offsets.push_back({tc.flow(flow).id, placement.offset_us});
  return file;
}

std::string serialize_assignment_file(const AssignmentFile& file) {
  ordered_json doc;
  ordered_json entries = ordered_json::array();
  for (const auto& e : file.assignment)
    entries.push_back({{"flow", e.flow}, {"type", to_string(e.type)}, {"status", to_string(e.status)}});
  ordered_json gcl = ordered_json::array();
  for (const auto& link : file.gcl) {
    ordered_json windows = ordered_json::array();
    for (const auto& w : link.windows)
      windows.push_back({{"open_us", w.open_us}, {"close_us", w.close_us}, {"flow", w.flow}});
    gcl.push_back({{"link", link.link}, {"windows", windows}});
  }
  ordered_json offsets = ordered_json::array();
  for (const auto& o : file.offsets) offsets.push_back({{"flow", o.flow}, {"offset_us", o.offset_us}});
  doc["assignment"] = entries;
  doc["gcl"] = gcl;
  doc["offsets"] = offsets;
  return doc.dump(2) + "\n";
}

AssignmentFile parse_assignment_file(const std::string& text) {
  return with_parse_errors([&] {
    const json doc = json::parse(text);
    AssignmentFile file;
    for (const auto& e : doc.at("assignment"))
      file.assignment.push_back({e.at("flow").get<std::string>(), parse_type(e.at("type").get<std::string>()),
                                 parse_status(e.at("status").get<std::string>())});
    for (const auto& l : doc.at("gcl")) {
      OutputLink link{l.at("link").get<std::string>(), {}};
      for (const auto& w : l.at("windows"))
        link.windows.push_back({w.at("open_us").get<double>(), w.at("close_us").get<double>(),
                                w.at("flow").get<std::string>()});
      file.gcl.push_back(std::move(link));
    }
    for (const auto& o : doc.at("offsets"))
      file.offsets.push_back({o.at("flow").get<std::string>(), o.at("offset_us").get<double>()});
    return file;
  });
}

void save_assignment(const TestCase& tc, const Assignment& assignment, const GclSchedule& gcl,
                     const std::filesystem::path& path) {
  if (assignment.size() != tc.flow_count()) throw ArgumentError("assignment does not cover the test case");
  write_file_atomic(path, serialize_assignment_file(make_assignment_file(tc, assignment, gcl)));
}

AssignmentFile load_assignment_file(const std::filesystem::path& path) {
  return parse_assignment_file(read_file(path));
}

std::pair<Assignment, GclSchedule> restore_assignment(const TestCase& tc, const AssignmentFile& file) {
  Assignment assignment(tc.flow_count());
  std::vector<bool> seen(tc.flow_count(), false);
  for (const auto& e : file.assignment) {
    auto i = tc.flow_index(e.flow);
    if (!i) throw ValidationError("assignment names unknown flow " + e.flow);
    assignment.types[*i] = e.type;
    assignment.status[*i] = e.status;
    seen[*i] = true;
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) throw ValidationError("assignment misses flow " + tc.flow(i).id);

  GclSchedule gcl = empty_schedule(tc);
  const double slot = gcl.grid.slot_us();
  auto to_cell = [&](double us) { return static_cast<std::int64_t>(std::llround(us / slot)); };

  // Windows of one flow on one link are its instances in time order.
  std::map<std::size_t, std::map<std::size_t, std::vector<HopCells>>> per_flow_link;
  for (const auto& link : file.gcl) {
    auto l = tc.topology().link_index(link.link);
    if (!l) throw ValidationError(link.link);
    for (const auto& w : link.windows) {
      auto f = tc.flow_index(w.flow);
      if (!f) throw ValidationError("gcl names unknown flow " + w.flow);
      const auto start = to_cell(w.open_us);
      per_flow_link[*f][*l].push_back({*l, start, to_cell(w.close_us) - start});
    }
  }
  for (const auto& o : file.offsets) {
    auto f = tc.flow_index(o.flow);
    if (!f) throw ValidationError("offset names unknown flow " + o.flow);
    FlowPlacement placement;
    placement.flow = *f;
    placement.offset_us = o.offset_us;
    placement.offset_slots = to_cell(o.offset_us);
    const auto& route = tc.route_links(*f);
    const auto& by_link = per_flow_link[*f];
    std::size_t instances = 0;
    if (!route.empty() && by_link.count(route.front())) instances = by_link.at(route.front()).size();
    placement.instances.assign(instances, std::vector<HopCells>(route.size()));
    for (std::size_t hop = 0; hop < route.size(); ++hop) {
      auto it = by_link.find(route[hop]);
      if (it == by_link.end() || it->second.size() != instances)
        throw ValidationError("gcl windows of flow " + o.flow + " do not match its route");
      for (std::size_t k = 0; k < instances; ++k) placement.instances[k][hop] = it->second[k];
    }
    for (std::size_t k = 0; k < instances; ++k)
      for (const auto& hop : placement.instances[k])
        for (std::int64_t c = hop.start; c < hop.end(); ++c) {
          if (c < 0 || c >= static_cast<std::int64_t>(gcl.grid.cells_per_link()))
            throw ValidationError("gcl window of flow " + o.flow + " lies outside the hyperperiod");
          gcl.grid.at(hop.link, static_cast<std::size_t>(c)) = {static_cast<std::int32_t>(*f),
                                                               static_cast<std::int32_t>(k)};
        }
    gcl.placements.emplace(*f, std::move(placement));
  }
  return {assignment, gcl};
}

}  // namespace tta
