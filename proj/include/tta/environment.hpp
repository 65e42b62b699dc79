#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tta/model.hpp"
#include "tta/scheduler.hpp"

namespace tta {

/// Reward table: one value per {HRT, SRT} × {TT, AVB} × {success, fail} cell.
struct RewardConfig {
  double r_hrt_succ = 10.0;
  double r_hrt_fail = -10.0;
  double r_srt_succ_base = 0.0;
  double r_srt_fail = -5.0;
  double alpha_bonus = 5.0;  // HRT carried by AVB
  double beta_bonus = 2.0;   // SRT carried by TT
  double srt_utility_scale = 1.0;

  void validate() const;
};

/// Observation: features of the flow at the head of the queue followed by
/// the per-link slot availability (1 free, 0 taken by TT).
struct EnvState {
  static constexpr std::size_t kFlowFeatures = 6;

  std::vector<double> flow_features;
  std::size_t links = 0;
  std::size_t slots = 0;
  std::vector<double> link_matrix;  // row-major, links × slots

  std::size_t size() const { return kFlowFeatures + links * slots; }
  double capacity(std::size_t link, std::size_t slot) const { return link_matrix[link * slots + slot]; }
  void flatten_into(std::span<double> out) const;
  std::vector<double> flatten() const;
};

enum class StepTag {
  HrtTtSuccess,
  HrtTtFail,
  HrtAvbSuccess,
  HrtAvbFail,
  SrtTtSuccess,
  SrtTtFail,
  SrtAvbSuccess,
  SrtAvbFail,
  AvbDeferred,
};

const char* to_string(StepTag tag);

struct Settlement {
  std::size_t flow = 0;
  StepTag tag = StepTag::AvbDeferred;
  double reward = 0;
};

struct StepOutcome {
  double reward = 0;
  EnvState next_state;
  bool done = false;
  bool stopped = false;
  StepTag info = StepTag::AvbDeferred;
  std::vector<Settlement> settlement;  // non-empty only on the final step
};

struct TraceRecord {
  std::size_t step = 0;
  std::string flow;
  int action = 0;
  StepTag outcome = StepTag::AvbDeferred;
  double reward = 0;
};

/// Sequential traffic-type decisions over one test case. Actions: 0 = TT, 1 = AVB.
/// TT choices are scheduled immediately; AVB choices are settled once, after
/// the last flow (or a STOP), against the final gate schedule.
class Environment {
 public:
  /// With `avb_fallback`, an HRT flow that cannot go TT is carried as AVB
  /// instead of stopping the episode (used for inference).
  explicit Environment(RewardConfig config = {}, bool avb_fallback = false);

  /// Throws EmptyCaseError for a flowless case. The case must outlive the episode.
  EnvState reset(const TestCase& tc);

  /// Throws EpisodeDoneError after the episode ended.
  StepOutcome step(int action);

  /// AVB rewards against the current schedule. Idempotent.
  std::vector<Settlement> settle_terminal();

  EnvState encode_state() const;
  std::size_t state_size() const;

  bool done() const { return done_; }
  bool stopped() const { return stopped_; }
  std::size_t steps() const { return position_; }
  const std::vector<std::size_t>& queue() const { return queue_; }
  std::optional<std::size_t> current_flow() const;

  /// Decisions so far. Flows never reached are TT + Unscheduled (carried nowhere).
  Assignment assignment() const;
  const GclSchedule& schedule() const { return gcl_; }
  const std::vector<TraceRecord>& trace() const { return trace_; }
  std::string trace_jsonl() const;

 private:
  void encode_features(std::size_t flow, std::vector<double>& out) const;

  RewardConfig config_;
  bool avb_fallback_ = false;
  const TestCase* tc_ = nullptr;
  GclSchedule gcl_;
  std::vector<std::size_t> queue_;
  std::vector<std::optional<TrafficType>> decided_;
  std::vector<FlowStatus> status_;
  std::size_t position_ = 0;
  bool done_ = true;
  bool stopped_ = false;
  std::optional<std::vector<Settlement>> settlement_;
  std::vector<TraceRecord> trace_;

  struct Range {
    double lo = 0, hi = 0;
    double scale(double v) const { return hi > lo ? (v - lo) / (hi - lo) : 1.0; }
  };
  Range period_, payload_, deadline_, hops_;
};

}  // namespace tta
