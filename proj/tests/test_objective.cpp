#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "tta/avb_analysis.hpp"
#include "tta/errors.hpp"
#include "tta/objective.hpp"

using namespace tta;
using namespace tta::testing;

TEST(Objective, UtilityBranches) {
  const UtilityParams p;
  EXPECT_DOUBLE_EQ(utility(800, 1000, p), 6.0);
  EXPECT_DOUBLE_EQ(utility(1250, 1000, p), 3.0);
  EXPECT_DOUBLE_EQ(utility(1600, 1000, p), 0.0);
  EXPECT_DOUBLE_EQ(utility(1000, 1000, p), 6.0);
  EXPECT_DOUBLE_EQ(utility(1500, 1000, p), 0.0);
}

TEST(Objective, UtilityKeepsFixedSlopeForOtherCaps) {
  // The decay segment does not scale with the cap.
  const UtilityParams p{10.0, 1.5};
  EXPECT_DOUBLE_EQ(utility(1000, 1000, p), 10.0);
  EXPECT_DOUBLE_EQ(utility(1000.0 + 1e-9, 1000, p), -(12.0 / 1000) * 1e-9 + 6.0);
}

TEST(Objective, Schedulable) {
  const UtilityParams p;
  const Flow hrt = link_flow("h", 1000, 100, 500, Criticality::HRT);
  const Flow srt = link_flow("s", 1000, 100, 500, Criticality::SRT);
  EXPECT_TRUE(schedulable(hrt, Delay::finite(500), p));
  EXPECT_FALSE(schedulable(hrt, Delay::finite(500.001), p));
  EXPECT_FALSE(schedulable(hrt, Delay::unstable(), p));
  EXPECT_TRUE(schedulable(srt, Delay::finite(700), p));
  EXPECT_FALSE(schedulable(srt, Delay::finite(751), p));
  EXPECT_FALSE(schedulable(srt, Delay::unscheduled(), p));
}

TEST(Objective, MaximaWhenEverythingMeetsDeadlines) {
  TestCase tc(single_link_topology(), {link_flow("h", 1000, 100, 500, Criticality::HRT),
                                       link_flow("s1", 1000, 100, 500), link_flow("s2", 1000, 100, 500)});
  Assignment a(3);
  const Objectives o = objectives(tc, {Delay::finite(10), Delay::finite(10), Delay::finite(500)}, a);
  EXPECT_EQ(o.delta_hrt, 1);
  EXPECT_DOUBLE_EQ(o.delta_srt, 12.0);
}

TEST(Objective, EmptyCase) {
  TestCase tc(single_link_topology(), {});
  const Objectives o = objectives(tc, {}, Assignment{});
  EXPECT_EQ(o.delta_hrt, 0);
  EXPECT_DOUBLE_EQ(o.delta_srt, 0.0);
  const EvalReport r = evaluate_assignment(tc, Assignment{});
  EXPECT_DOUBLE_EQ(r.hrt_scheduled_pct, 100.0);
  EXPECT_DOUBLE_EQ(r.srt_utility_pct, 100.0);
}

TEST(Objective, MissingDelayThrows) {
  TestCase tc(single_link_topology(), {link_flow("s", 1000, 100, 500)});
  EXPECT_THROW(objectives(tc, {std::nullopt}, Assignment(1)), MissingWcdError);
  EXPECT_THROW(objectives(tc, {}, Assignment(1)), MissingWcdError);
}

TEST(Objective, MixedFourFlowCaseMatchesSummation) {
  TestCase tc(single_link_topology(),
              {link_flow("h1", 1000, 100, 500, Criticality::HRT), link_flow("h2", 1000, 100, 500, Criticality::HRT),
               link_flow("s1", 1000, 100, 1000), link_flow("s2", 1000, 100, 400)});
  Assignment a(4);
  const std::vector<std::optional<Delay>> w{Delay::finite(400), Delay::unstable(), Delay::finite(1100),
                                            Delay::finite(900)};
  const Objectives o = objectives(tc, w, a);
  EXPECT_EQ(o.delta_hrt, 1);
  // s1: 1100 in (1000, 1500] → −0.012·100 + 6 = 4.8; s2: 900 > 600 → 0.
  EXPECT_NEAR(o.delta_srt, 4.8, 1e-12);
}

TEST(Objective, AllTtTinyCaseIsFullyScheduled) {
  TestCase tc(line_topology(), {make_flow("h", "ES1", "ES2", 1000, 1500, 500, Criticality::HRT, {"e1", "e2"}),
                                make_flow("s", "ES2", "ES1", 1000, 1500, 500, Criticality::SRT, {"e2", "e1"})});
  const EvalReport r = evaluate_assignment(tc, Assignment(2, TrafficType::TT));
  EXPECT_DOUBLE_EQ(r.hrt_scheduled_pct, 100.0);
  EXPECT_DOUBLE_EQ(r.srt_utility_pct, 100.0);
}

TEST(Objective, CsvLayout) {
  EXPECT_EQ(csv_header(), "id,hrt_count,srt_count,es,sw,strategy,hrt_scheduled_pct,srt_utility_pct,runtime_s");
  ReportRow row{"tc1", "avb-only", 59, 174, 25, 6, 76.271, 74.97, 0.5};
  EXPECT_EQ(csv_line(row), "tc1,59,174,25,6,avb-only,76.27,74.97,0.500000");
}

// Properties ------------------------------------------------------------------

TEST(ObjectiveProperty, UtilityShape) {
  const UtilityParams p;
  for (double d : {100.0, 1000.0, 7777.0}) {
    double prev = utility(0, d, p);
    for (double w = 0; w <= 2.5 * d; w += d / 97) {
      const double u = utility(w, d, p);
      EXPECT_LE(u, prev + 1e-12);
      if (w > d) {
        EXPECT_EQ(u == 0.0, w >= 1.5 * d - 1e-9) << w;
      }
      prev = u;
    }
    EXPECT_NEAR(utility(d * (1 + 1e-12), d, p), 6.0, 1e-6);
    EXPECT_NEAR(utility(1.5 * d * (1 - 1e-12), d, p), 0.0, 1e-6);
  }
}

TEST(ObjectiveProperty, ReportMatchesPerFlowRecomputation) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const TestCase tc = random_small_case(rng);
    const Assignment in = random_assignment(tc.flow_count(), rng);
    const EvalReport r = evaluate_assignment(tc, in);

    // Independent recomputation from the report's own schedule.
    const auto params = UtilityParams::from(tc.params());
    int hrt = 0;
    double srt = 0;
    for (std::size_t i = 0; i < tc.flow_count(); ++i) {
      const Flow& f = tc.flow(i);
      Delay d;
      if (in.types[i] == TrafficType::AVB)
        d = avb_wcd(i, r.gcl, tc, r.assignment);
      else if (r.gcl.placements.count(i))
        d = Delay::finite(tt_wcd(r.gcl, tc, i));
      else
        d = Delay::unscheduled();
      EXPECT_EQ(r.flows[i].wcd, d);
      const bool ok = d.is_finite() && d.us <= (f.is_hrt() ? 1.0 : 1.5) * static_cast<double>(f.deadline_us);
      if (f.is_hrt()) hrt += ok;
      else if (ok) srt += utility(d.us, static_cast<double>(f.deadline_us), params);
      EXPECT_EQ(r.assignment.status[i] == FlowStatus::Scheduled, ok);
    }
    EXPECT_EQ(r.delta_hrt, hrt);
    EXPECT_NEAR(r.delta_srt, srt, 1e-9);
    EXPECT_LE(r.delta_srt, static_cast<double>(tc.srt_count()) * 6.0 + 1e-9);
    // Aggregates from rows.
    double row_u = 0;
    int row_h = 0;
    for (const auto& fr : r.flows) {
      row_u += fr.utility;
      row_h += fr.criticality == Criticality::HRT && fr.scheduled;
    }
    EXPECT_NEAR(row_u, r.delta_srt, 1e-9);
    EXPECT_EQ(row_h, r.delta_hrt);
  }
}

TEST(ObjectiveProperty, EvaluationIsPure) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    const TestCase tc = random_small_case(rng);
    const Assignment in = random_assignment(tc.flow_count(), rng);
    const EvalReport a = evaluate_assignment(tc, in), b = evaluate_assignment(tc, in);
    EXPECT_EQ(a.objective(), b.objective());
    EXPECT_EQ(a.assignment, b.assignment);
    EXPECT_EQ(a.gcl, b.gcl);
  }
}

TEST(ObjectiveProperty, UnschedulingNeverRaisesHrtCount) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const TestCase tc = random_small_case(rng);
    Assignment a(tc.flow_count());
    std::vector<std::optional<Delay>> w(tc.flow_count());
    for (auto& d : w) d = Delay::finite(uniform_real(rng, 0, 1200));
    const int base = objectives(tc, w, a).delta_hrt;
    for (std::size_t i = 0; i < a.size(); ++i) {
      Assignment b = a;
      b.status[i] = FlowStatus::Unscheduled;
      EXPECT_LE(objectives(tc, w, b).delta_hrt, base);
    }
  }
}
