#include <array>
#include <cmath>

#include "tta/errors.hpp"
#include "tta/model.hpp"
#include "tta/rng.hpp"

namespace tta {

namespace {

constexpr std::array<std::int64_t, 4> kPeriodsUs{1000, 2000, 4000, 8000};
constexpr std::int64_t kMinPayload = 100;
constexpr std::int64_t kMaxPayload = 1500;
constexpr std::int64_t kLinkRate = 1'000'000'000;

std::int64_t draw_deadline(Rng& rng, std::int64_t period, double low_fraction) {
  const auto lo = static_cast<std::int64_t>(std::ceil(low_fraction * static_cast<double>(period)));
  return uniform_int(rng, lo, period);
}

}  // namespace

TestCase gen_ring_testcase(int n_es, int n_sw, int n_hrt, int n_srt, std::uint64_t seed) {
  if (n_sw < 3) throw ArgumentError("ring needs at least 3 switches");
  if (n_es < 2) throw ArgumentError("need at least 2 end stations");
  if (n_hrt < 0 || n_srt < 0) throw ArgumentError("flow counts must be non-negative");

  std::vector<Node> nodes;
  std::vector<Link> links;
  for (int i = 1; i <= n_sw; ++i) nodes.push_back({"SW" + std::to_string(i), NodeKind::Switch});
  for (int i = 1; i <= n_es; ++i) nodes.push_back({"ES" + std::to_string(i), NodeKind::EndStation});

  int next_link = 1;
  auto add_link = [&](const std::string& a, const std::string& b) {
    links.push_back({"e" + std::to_string(next_link++), a, b, kLinkRate});
  };
  for (int i = 1; i <= n_sw; ++i) add_link("SW" + std::to_string(i), "SW" + std::to_string(i % n_sw + 1));
  for (int i = 1; i <= n_es; ++i)
    add_link("ES" + std::to_string(i), "SW" + std::to_string((i - 1) % n_sw + 1));

  Topology topology(std::move(nodes), std::move(links));

  Rng rng(seed);
  std::vector<Flow> flows;
  const int total = n_hrt + n_srt;
  flows.reserve(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i) {
    Flow f;
    f.id = "f" + std::to_string(i + 1);
    f.criticality = i < n_hrt ? Criticality::HRT : Criticality::SRT;
    const auto src = uniform_int(rng, 1, n_es);
    auto dst = uniform_int(rng, 1, n_es - 1);
    if (dst >= src) ++dst;
    f.src = "ES" + std::to_string(src);
    f.dst = "ES" + std::to_string(dst);
    f.period_us = kPeriodsUs[static_cast<std::size_t>(uniform_int(rng, 0, kPeriodsUs.size() - 1))];
    f.payload_bytes = uniform_int(rng, kMinPayload, kMaxPayload);
    f.deadline_us = draw_deadline(rng, f.period_us, f.is_hrt() ? 0.5 : 0.25);
    f.route = shortest_route(topology, f.src, f.dst);
    flows.push_back(std::move(f));
  }

  return TestCase(std::move(topology), std::move(flows));
}

}  // namespace tta
