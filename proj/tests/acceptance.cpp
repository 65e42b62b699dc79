// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run criteria 1-9
//   acceptance 2 5        run the listed criteria
//
// TTA_ACCEPT_EPISODES overrides the per-case training budget of criterion 6.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "link_config.hpp"
#include "scheduler_oracle.hpp"
#include "support.hpp"
#include "tta/agent.hpp"
#include "tta/avb_analysis.hpp"
#include "tta/baselines.hpp"
#include "tta/cli.hpp"
#include "tta/objective.hpp"

using namespace tta;
using namespace tta::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Verdict {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

char buf[512];

template <class... A>
std::string fmt(const char* f, A... a) {
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

// 1 ---------------------------------------------------------------------------

Verdict utility_exactness() {
  Verdict v;
  const auto t0 = Clock::now();
  const UtilityParams p;
  const double ws[] = {0, 0.8, 1.0, 1.25, 1.5, 2.0};
  const double expected[] = {6, 6, 6, 3, 0, 0};
  for (double d : {100.0, 1000.0, 7777.0})
    for (int k = 0; k < 6; ++k) {
      const double u = utility(ws[k] * d, d, p);
      if (std::abs(u - expected[k]) > 1e-9) v.fail(fmt("utility(%g, %g) = %.12g, expected %g", ws[k] * d, d, u, expected[k]));
    }
  const double s = seconds_since(t0);
  if (s >= 1.0) v.fail(fmt("runtime %.3f s", s));
  if (v.pass) v.detail = fmt("18 points within 1e-9, %.4f s", s);
  return v;
}

// 2 ---------------------------------------------------------------------------

Verdict scheduler_soundness() {
  Verdict v;
  const auto t0 = Clock::now();
  std::size_t offsets_checked = 0;
  for (std::uint64_t seed = 0; seed < 1000 && v.pass; ++seed) {
    Rng rng(seed);
    const TestCase tc = random_small_case(rng);
    Assignment a = random_assignment(tc.flow_count(), rng);
    const GclSchedule built = build_gcl(tc, a);
    const ConstraintReport report = check_constraints(tc, a, built);
    if (!report.ok()) {
      v.fail(fmt("seed %llu: %zu constraint violations", static_cast<unsigned long long>(seed), report.violations.size()));
      break;
    }

    // Minimality: replay the ASAP placements and compare with brute force.
    GclSchedule gcl = empty_schedule(tc);
    const double slot = tc.params().slot_us;
    if (gcl.grid.cells_per_link() > 64) continue;
    for (std::size_t i : canonical_order(tc)) {
      const Flow& f = tc.flow(i);
      const Occupancy before = occupancy_of(gcl.grid);
      const std::int64_t instances = gcl.grid.hyperperiod_us() / f.period_us;
      const std::int64_t len = frame_slots(f, slot, kGbps);
      const auto placed = schedule_flow_asap(gcl, tc, i);
      const auto limit = placed ? placed->offset_slots : static_cast<std::int64_t>(std::ceil(f.period_us / slot - 1e-9));
      for (std::int64_t o = 0; o < limit; ++o)
        if (greedy_fits(before, tc.route_links(i), instances, f.period_us, slot, len, o) ||
            (instances == 1 && any_chain_fits(before, tc.route_links(i), 0, o, len, true)))
          v.fail(fmt("seed %llu flow %s: offset %lld fits below the chosen one",
                     static_cast<unsigned long long>(seed), f.id.c_str(), static_cast<long long>(o)));
      ++offsets_checked;
    }
  }
  const double s = seconds_since(t0);
  if (s >= 120) v.fail(fmt("runtime %.1f s", s));
  if (v.pass) v.detail = fmt("1000 cases valid, %zu offsets minimal, %.1f s", offsets_checked, s);
  return v;
}

// 3 ---------------------------------------------------------------------------

Verdict nc_bound_properties() {
  Verdict v;
  const auto t0 = Clock::now();
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    LinkConfig c = random_link_config(rng);
    const auto tag = fmt("config %llu", static_cast<unsigned long long>(seed));

    Assignment partial = c.a;
    for (std::size_t i = 1; i < partial.size(); ++i) partial.types[i] = TrafficType::TT;
    Delay prev = hop_delay_bound(0, 0, c.gcl, c.tc, partial);
    for (std::size_t i = 1; i < partial.size(); ++i) {
      partial.types[i] = TrafficType::AVB;
      const Delay next = hop_delay_bound(0, 0, c.gcl, c.tc, partial);
      if (!delay_ge(next, prev)) v.fail(tag + ": bound fell after adding an AVB flow");
      prev = next;
    }

    const Delay d = hop_delay_bound(0, 0, c.gcl, c.tc, c.a);
    const double R = 0.75 * 1e9 * (1.0 - static_cast<double>(c.gcl.grid.occupied(0)) / 64.0);
    if (!d.is_finite() != (rate_sum(c) > R)) v.fail(tag + ": Unstable flag disagrees with Σr > R");
    if (d.is_finite() && d.us < transmission_us(c.tc, 0)) v.fail(tag + ": bound below transmission time");

    prev = d;
    for (int k = 0; k < 10; ++k) {
      occupy(c.gcl, {static_cast<std::size_t>(uniform_int(rng, 0, 63))});
      const Delay next = hop_delay_bound(0, 0, c.gcl, c.tc, c.a);
      if (!delay_ge(next, prev)) v.fail(tag + ": bound fell after adding a TT slot");
      prev = next;
    }
  }

  TestCase one(single_link_topology(), {link_flow("f", 1000, 1500, 1000)});
  const Delay single = hop_delay_bound(0, 0, empty_schedule(one), one, Assignment(1, TrafficType::AVB));
  TestCase two(single_link_topology(), {link_flow("f1", 1000, 1500, 1000), link_flow("f2", 1000, 1500, 1000)});
  const Delay pair = hop_delay_bound(0, 0, empty_schedule(two), two, Assignment(2, TrafficType::AVB));
  if (!(single.is_finite() && single.us == 28.0)) v.fail(fmt("single flow bound %.12g, expected 28", single.us));
  if (!(pair.is_finite() && pair.us == 44.0)) v.fail(fmt("two-flow bound %.12g, expected 44", pair.us));

  const double s = seconds_since(t0);
  if (s >= 60) v.fail(fmt("runtime %.1f s", s));
  if (v.pass) v.detail = fmt("200 configurations, spot values 28/44 exact, %.2f s", s);
  return v;
}

// 4 ---------------------------------------------------------------------------

/// Hand enumeration for two flows: best of the four assignments under
/// (δ_HRT, δ_SRT), ties to fewer TT flows, then AVB on the first flow.
Assignment two_flow_best(const TestCase& tc, Objectives& best) {
  const std::uint64_t order[] = {0b00, 0b10, 0b01, 0b11};  // preference order among ties
  Assignment chosen;
  bool first = true;
  for (std::uint64_t m : order) {
    const Objectives o = evaluate_assignment(tc, assignment_from_mask(2, m)).objective();
    if (first || o.delta_hrt > best.delta_hrt || (o.delta_hrt == best.delta_hrt && o.delta_srt > best.delta_srt)) {
      best = o;
      chosen = assignment_from_mask(2, m);
      first = false;
    }
  }
  return chosen;
}

Verdict oracle_consistency() {
  Verdict v;
  const auto t0 = Clock::now();
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const TestCase tc = random_small_case(rng);
    const Assignment in = random_assignment(tc.flow_count(), rng);
    const EvalReport r = evaluate_assignment(tc, in);
    const auto params = UtilityParams::from(tc.params());
    int hrt = 0;
    double srt = 0;
    for (std::size_t i = 0; i < tc.flow_count(); ++i) {
      const Flow& f = tc.flow(i);
      Delay d = Delay::unscheduled();
      if (in.types[i] == TrafficType::AVB)
        d = avb_wcd(i, r.gcl, tc, r.assignment);
      else if (r.gcl.placements.count(i))
        d = Delay::finite(tt_wcd(r.gcl, tc, i));
      const double limit = (f.is_hrt() ? 1.0 : params.bd_factor) * static_cast<double>(f.deadline_us);
      const bool ok = d.is_finite() && d.us <= limit;
      if (f.is_hrt()) hrt += ok;
      else if (ok) srt += utility(d.us, static_cast<double>(f.deadline_us), params);
    }
    if (r.delta_hrt != hrt || std::abs(r.delta_srt - srt) > 1e-9)
      v.fail(fmt("case %llu: report (%d, %.9g) vs recomputed (%d, %.9g)", static_cast<unsigned long long>(seed),
                 r.delta_hrt, r.delta_srt, hrt, srt));
  }

  // Every 2-flow case of a parameter grid on one link.
  std::size_t cases = 0;
  const Criticality crits[] = {Criticality::HRT, Criticality::SRT};
  for (Criticality c1 : crits)
    for (Criticality c2 : crits)
      for (std::int64_t period : {125, 1000})
        for (std::int64_t payload : {200, 1500})
          for (std::int64_t d1 : {15, 20, 30, 45, 120})
            for (std::int64_t d2 : {15, 20, 30, 45, 120}) {
              if (d1 > period || d2 > period) continue;
              TestCase tc(single_link_topology(),
                          {link_flow("a", period, payload, d1, c1), link_flow("b", 1000, 1500, d2, c2)});
              Objectives best;
              const Assignment hand = two_flow_best(tc, best);
              const OracleResult r = exhaustive_oracle(tc);
              if (r.best_objective != best || r.best_assignment.types != hand.types || r.evaluations != 4)
                v.fail(fmt("2-flow case %zu: oracle disagrees with hand enumeration", cases));
              ++cases;
            }

  const double s = seconds_since(t0);
  if (s >= 120) v.fail(fmt("runtime %.1f s", s));
  if (v.pass) v.detail = fmt("100 reports recomputed, %zu two-flow cases enumerated, %.2f s", cases, s);
  return v;
}

// 5 ---------------------------------------------------------------------------

Verdict learning_efficacy() {
  Verdict v;
  const auto t0 = Clock::now();
  int match_oracle = 0, beat_avb = 0;
  std::string table;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    // 3 ES + 3 SW ring, 10 flows.
    const TestCase tc = gen_ring_testcase(3, 3, 5, 5, seed);
    Hyperparams hp;
    hp.seed = seed;
    const TrainResult trained = train({tc}, hp);
    const int tta = evaluate_assignment(tc, infer(trained.best, tc)).delta_hrt;
    const int oracle = exhaustive_oracle(tc).best_objective.delta_hrt;
    const int avb = evaluate_assignment(tc, avb_only(tc)).delta_hrt;
    match_oracle += tta == oracle;
    beat_avb += tta >= avb;
    table += fmt(" s%llu:%d/%d/%d", static_cast<unsigned long long>(seed), tta, oracle, avb);
  }
  const double s = seconds_since(t0);
  if (match_oracle < 4) v.fail(fmt("oracle δ_HRT matched on %d/5 seeds", match_oracle));
  if (beat_avb < 5) v.fail(fmt("avb-only δ_HRT not reached on %d seed(s)", 5 - beat_avb));
  if (s > 1800) v.fail(fmt("runtime %.0f s", s));
  v.detail = (v.pass ? "" : v.detail + "; ") +
             fmt("oracle match %d/5, ≥ avb-only %d/5, δ_HRT tta/oracle/avb", match_oracle, beat_avb) + table +
             fmt(", %.0f s", s);
  return v;
}

// 6 ---------------------------------------------------------------------------

int trend_episodes() {
  if (const char* e = std::getenv("TTA_ACCEPT_EPISODES")) return std::max(1, std::atoi(e));
  return 60;
}

Verdict trend_reproduction() {
  Verdict v;
  const auto t0 = Clock::now();
  struct Size {
    int es, sw, hrt, srt;
  };
  // First row of each synthetic test case group.
  const Size sizes[] = {{25, 6, 59, 174}, {35, 9, 87, 172}, {52, 13, 76, 151}, {77, 18, 100, 200}, {104, 24, 86, 171}};
  const int episodes = trend_episodes();
  std::string table;
  int k = 0;
  for (const Size& z : sizes) {
    ++k;
    const TestCase tc = gen_ring_testcase(z.es, z.sw, z.hrt, z.srt, 1);
    Hyperparams hp;
    hp.episodes = episodes;
    hp.seed = 1;
    const TrainResult trained = train({tc}, hp);
    const EvalReport tta = evaluate_assignment(tc, infer(trained.best, tc));
    const EvalReport avb = evaluate_assignment(tc, avb_only(tc));
    table += fmt(" TC%d %.2f%%/%.2f%%", k, tta.hrt_scheduled_pct, avb.hrt_scheduled_pct);
    if (tta.hrt_scheduled_pct < avb.hrt_scheduled_pct) v.fail(fmt("TC%d below avb-only", k));
    std::fprintf(stderr, "  TC%d done after %.0f s\n", k, seconds_since(t0));
  }
  const double s = seconds_since(t0);
  if (s > 7200) v.fail(fmt("runtime %.0f s", s));
  v.detail = (v.pass ? "" : v.detail + "; ") + fmt("%d episodes per case, HRT scheduled tta/avb-only", episodes) +
             table + fmt(", %.0f s", s);
  return v;
}

// 7 ---------------------------------------------------------------------------

Verdict inference_latency() {
  Verdict v;
  const TestCase tc = gen_ring_testcase(31, 15, 99, 87, 1);
  Environment env;
  env.reset(tc);
  Rng rng(1);
  const PolicyModel model = init_policy(env.state_size(), 128, topology_signature(tc), rng);
  const auto t0 = Clock::now();
  const EvalReport r = evaluate_assignment(tc, infer(model, tc));
  const double s = seconds_since(t0);
  if (tc.flow_count() != 186) v.fail(fmt("case has %zu flows", tc.flow_count()));
  if (s > 10) v.fail(fmt("infer + evaluate took %.2f s", s));
  if (v.pass) v.detail = fmt("186 flows, state size %zu, infer + evaluate %.2f s (HRT %.1f%%)", env.state_size(), s,
                             r.hrt_scheduled_pct);
  return v;
}

// 8 ---------------------------------------------------------------------------

Verdict ppo_math() {
  Verdict v;
  const auto t0 = Clock::now();
  const double eps = 0.2;
  for (int k = 80; k <= 120; ++k)
    for (double adv : {-3.0, -0.5, 0.0, 0.7, 2.0})
      if (const double rho = k / 100.0; clipped_surrogate(rho, adv, eps) != rho * adv)
        v.fail(fmt("clip identity fails at ρ=%g Â=%g", rho, adv));

  Rng rng(3);
  PolicyModel m = init_policy(3, 4, 0, rng);
  PpoBatch b;
  b.state_size = 3;
  b.states = {0.1, -0.2, 0.3};
  b.actions = {0};
  b.advantages = {0.0};
  b.returns = {1.0};
  PolicyModel zero = m;
  std::fill(zero.critic.begin(), zero.critic.end(), 0.0);
  std::fill(zero.actor.begin(), zero.actor.end(), 0.0);
  b.old_log_probs = {std::log(0.5)};
  const LossParts l = ppo_loss(zero, b, Hyperparams{});
  if (l.value != 0.5) v.fail(fmt("L^V(G=1, V=0) = %.17g", l.value));
  if (std::abs(l.entropy - std::numbers::ln2) > 1e-9) v.fail(fmt("uniform entropy %.17g", l.entropy));

  // Gradient check on a fixed tiny net.
  PpoBatch g;
  g.state_size = 3;
  for (int t = 0; t < 6; ++t) {
    for (int k = 0; k < 3; ++k) g.states.push_back(uniform_real(rng, -1, 1));
    const int a = t % 2;
    const PolicyOutput out = policy_forward(m, std::span<const double>(g.states).subspan(3 * t, 3));
    g.actions.push_back(a);
    g.old_log_probs.push_back(std::log(out.probs[a]) - uniform_real(rng, -0.1, 0.1));
    g.advantages.push_back(uniform_real(rng, -2, 2));
    g.returns.push_back(uniform_real(rng, -3, 3));
  }
  Hyperparams hp;
  hp.entropy_coef = 0.1;
  PolicyGrad grad;
  ppo_loss(m, g, hp, &grad);
  double worst = 0;
  auto check = [&](std::vector<double> PolicyModel::*field, const std::vector<double>& analytic) {
    for (std::size_t k = 0; k < analytic.size(); ++k) {
      PolicyModel p = m, q = m;
      (p.*field)[k] += 1e-6;
      (q.*field)[k] -= 1e-6;
      const double fd = (ppo_loss(p, g, hp).total - ppo_loss(q, g, hp).total) / 2e-6;
      const double rel = std::abs(analytic[k] - fd) / std::max(std::abs(fd), 1e-6);
      worst = std::max(worst, rel);
    }
  };
  check(&PolicyModel::actor, grad.actor);
  check(&PolicyModel::critic, grad.critic);
  if (worst > 1e-4) v.fail(fmt("worst relative gradient error %.3g", worst));

  const double s = seconds_since(t0);
  if (s >= 60) v.fail(fmt("runtime %.1f s", s));
  if (v.pass) v.detail = fmt("worst relative gradient error %.2e, %.3f s", worst, s);
  return v;
}

// 9 ---------------------------------------------------------------------------

Verdict determinism() {
  Verdict v;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "tta_acceptance_9";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto run = [&](std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    if (code != 0) v.fail("tta " + args[0] + " exited " + std::to_string(code) + ": " + err.str());
  };
  const auto p = [&](const char* name) { return (dir / name).string(); };
  run({"gen", "--es", "4", "--sw", "3", "--hrt", "4", "--srt", "6", "--seed", "9", "-o", p("a.json")});
  run({"gen", "--es", "4", "--sw", "3", "--hrt", "4", "--srt", "6", "--seed", "9", "-o", p("b.json")});
  run({"train", p("a.json"), "--episodes", "8", "--seed", "3", "-o", p("a.ckpt")});
  run({"train", p("a.json"), "--episodes", "8", "--seed", "3", "-o", p("b.ckpt")});
  if (v.pass) {
    if (read_file(p("a.json")) != read_file(p("b.json"))) v.fail("gen outputs differ");
    if (read_file(p("a.ckpt")) != read_file(p("b.ckpt"))) v.fail("train checkpoints differ");
    if (read_file(p("a.ckpt.log.csv")) != read_file(p("b.ckpt.log.csv"))) v.fail("training logs differ");
  }
  if (v.pass) v.detail = "gen and train outputs byte-identical (checkpoint fnv1a " + fnv1a_hex(read_file(p("a.ckpt"))) + ")";
  fs::remove_all(dir);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Verdict()>> criteria{utility_exactness,  scheduler_soundness, nc_bound_properties,
                                                        oracle_consistency, learning_efficacy,   trend_reproduction,
                                                        inference_latency,  ppo_math,            determinism};
  std::vector<int> chosen;
  for (int k = 1; k < argc; ++k) chosen.push_back(std::atoi(argv[k]));
  if (chosen.empty())
    for (int k = 1; k <= 9; ++k) chosen.push_back(k);

  int failures = 0;
  for (int c : chosen) {
    if (c < 1 || c > 9) {
      std::fprintf(stderr, "unknown criterion %d\n", c);
      return 2;
    }
    Verdict v;
    try {
      v = criteria[static_cast<std::size_t>(c - 1)]();
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    std::printf("criterion %d: %s (%s)\n", c, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
    failures += !v.pass;
  }
  return failures == 0 ? 0 : 1;
}
