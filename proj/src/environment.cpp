#include "tta/environment.hpp"

#include <algorithm>

#include "json.hpp"
#include "tta/avb_analysis.hpp"
#include "tta/errors.hpp"
#include "tta/objective.hpp"

namespace tta {

void RewardConfig::validate() const {
  if (!(r_hrt_succ > 0 && r_hrt_fail < 0)) throw ArgumentError("reward config needs r_hrt_succ > 0 > r_hrt_fail");
  if (alpha_bonus < 0 || beta_bonus < 0) throw ArgumentError("reward bonuses must be non-negative");
}

void EnvState::flatten_into(std::span<double> out) const {
  if (out.size() != size()) throw ShapeMismatchError("state buffer has the wrong length");
  std::copy(flow_features.begin(), flow_features.end(), out.begin());
  std::copy(link_matrix.begin(), link_matrix.end(), out.begin() + static_cast<std::ptrdiff_t>(kFlowFeatures));
}

std::vector<double> EnvState::flatten() const {
  std::vector<double> out(size());
  flatten_into(out);
  return out;
}

const char* to_string(StepTag tag) {
  switch (tag) {
    case StepTag::HrtTtSuccess: return "hrt_tt_success";
    case StepTag::HrtTtFail: return "hrt_tt_fail";
    case StepTag::HrtAvbSuccess: return "hrt_avb_success";
    case StepTag::HrtAvbFail: return "hrt_avb_fail";
    case StepTag::SrtTtSuccess: return "srt_tt_success";
    case StepTag::SrtTtFail: return "srt_tt_fail";
    case StepTag::SrtAvbSuccess: return "srt_avb_success";
    case StepTag::SrtAvbFail: return "srt_avb_fail";
    case StepTag::AvbDeferred: return "avb_deferred";
  }
  return "unknown";
}

Environment::Environment(RewardConfig config, bool avb_fallback)
    : config_(config), avb_fallback_(avb_fallback) {
  config_.validate();
}

EnvState Environment::reset(const TestCase& tc) {
  if (tc.flow_count() == 0) throw EmptyCaseError("test case has no flows");
  tc_ = &tc;
  gcl_ = empty_schedule(tc);
  queue_ = canonical_order(tc);
  decided_.assign(tc.flow_count(), std::nullopt);
  status_.assign(tc.flow_count(), FlowStatus::Unscheduled);
  position_ = 0;
  done_ = false;
  stopped_ = false;
  settlement_.reset();
  trace_.clear();

  auto range_of = [&](auto&& value) {
    Range r{value(0), value(0)};
    for (std::size_t i = 1; i < tc.flow_count(); ++i) {
      r.lo = std::min(r.lo, value(i));
      r.hi = std::max(r.hi, value(i));
    }
    return r;
  };
  period_ = range_of([&](std::size_t i) { return static_cast<double>(tc.flow(i).period_us); });
  payload_ = range_of([&](std::size_t i) { return static_cast<double>(tc.flow(i).payload_bytes); });
  deadline_ = range_of([&](std::size_t i) { return static_cast<double>(tc.flow(i).deadline_us); });
  hops_ = range_of([&](std::size_t i) { return static_cast<double>(tc.route_links(i).size()); });
  return encode_state();
}

std::optional<std::size_t> Environment::current_flow() const {
  if (done_ || position_ >= queue_.size()) return std::nullopt;
  return queue_[position_];
}

void Environment::encode_features(std::size_t flow, std::vector<double>& out) const {
  const Flow& f = tc_->flow(flow);
  out = {period_.scale(static_cast<double>(f.period_us)),
         payload_.scale(static_cast<double>(f.payload_bytes)),
         deadline_.scale(static_cast<double>(f.deadline_us)),
         hops_.scale(static_cast<double>(tc_->route_links(flow).size())),
         f.is_hrt() ? 1.0 : 0.0,
         static_cast<double>(position_) / static_cast<double>(queue_.size())};
}

EnvState Environment::encode_state() const {
  if (!tc_) throw ArgumentError("environment was never reset");
  EnvState s;
  s.links = gcl_.grid.link_count();
  s.slots = gcl_.grid.cells_per_link();
  if (auto flow = current_flow())
    encode_features(*flow, s.flow_features);
  else
    s.flow_features = {0, 0, 0, 0, 0, static_cast<double>(position_) / static_cast<double>(queue_.size())};
  s.link_matrix.resize(s.links * s.slots);
  for (std::size_t l = 0; l < s.links; ++l)
    for (std::size_t c = 0; c < s.slots; ++c) s.link_matrix[l * s.slots + c] = gcl_.grid.is_free(l, c) ? 1.0 : 0.0;
  return s;
}

std::size_t Environment::state_size() const {
  return EnvState::kFlowFeatures + gcl_.grid.link_count() * gcl_.grid.cells_per_link();
}

Assignment Environment::assignment() const {
  Assignment a(decided_.size());
  for (std::size_t i = 0; i < decided_.size(); ++i) {
    a.types[i] = decided_[i].value_or(TrafficType::TT);
    a.status[i] = decided_[i] ? status_[i] : FlowStatus::Unscheduled;
  }
  return a;
}

StepOutcome Environment::step(int action) {
  if (done_) throw EpisodeDoneError("step after the episode ended");
  if (action != 0 && action != 1) throw ArgumentError("action must be 0 (TT) or 1 (AVB)");

  const std::size_t i = queue_[position_];
  const Flow& f = tc_->flow(i);
  const auto params = UtilityParams::from(tc_->params());
  StepOutcome out;

  if (action == 0) {
    bool ok = false;
    double wcd = 0;
    if (schedule_flow_asap(gcl_, *tc_, i)) {
      wcd = tt_wcd(gcl_, *tc_, i);
      ok = f.is_hrt() ? wcd <= static_cast<double>(f.deadline_us) : wcd <= tc_->buffer_deadline_us(i);
      if (!ok) unschedule_flow(gcl_, i);
    }
    decided_[i] = TrafficType::TT;
    status_[i] = ok ? FlowStatus::Scheduled : FlowStatus::Unscheduled;
    if (f.is_hrt()) {
      out.info = ok ? StepTag::HrtTtSuccess : StepTag::HrtTtFail;
      out.reward = ok ? config_.r_hrt_succ : config_.r_hrt_fail;
      if (!ok && avb_fallback_) {
        decided_[i] = TrafficType::AVB;
        status_[i] = FlowStatus::Scheduled;
      } else if (!ok) {
        out.stopped = true;
      }
    } else {
      out.info = ok ? StepTag::SrtTtSuccess : StepTag::SrtTtFail;
      out.reward = ok ? config_.r_srt_succ_base +
                            utility(wcd, static_cast<double>(f.deadline_us), params) * config_.srt_utility_scale +
                            config_.beta_bonus
                      : config_.r_srt_fail;
    }
  } else {
    decided_[i] = TrafficType::AVB;
    status_[i] = FlowStatus::Scheduled;
    out.info = StepTag::AvbDeferred;
  }

  trace_.push_back({position_, f.id, action, out.info, out.reward});
  ++position_;
  stopped_ = out.stopped;
  done_ = out.stopped || position_ == queue_.size();
  out.done = done_;

  if (done_) {
    out.settlement = settle_terminal();
    for (const auto& s : out.settlement) out.reward += s.reward;
    trace_.back().reward = out.reward;
  }
  out.next_state = encode_state();
  return out;
}

std::vector<Settlement> Environment::settle_terminal() {
  if (settlement_) return *settlement_;
  if (!tc_) throw ArgumentError("environment was never reset");
  if (!done_) throw ArgumentError("settlement before every flow is assigned");
  const auto params = UtilityParams::from(tc_->params());
  const Assignment current = assignment();
  const auto wcds = all_avb_wcds(*tc_, current, gcl_);

  std::vector<Settlement> out;
  for (std::size_t i : queue_) {
    auto it = wcds.find(i);
    if (it == wcds.end()) continue;
    const Flow& f = tc_->flow(i);
    const bool ok = schedulable(f, it->second, params);
    Settlement s{i, StepTag::AvbDeferred, 0};
    if (f.is_hrt()) {
      s.tag = ok ? StepTag::HrtAvbSuccess : StepTag::HrtAvbFail;
      s.reward = ok ? config_.r_hrt_succ + config_.alpha_bonus : config_.r_hrt_fail;
    } else {
      s.tag = ok ? StepTag::SrtAvbSuccess : StepTag::SrtAvbFail;
      s.reward = ok ? config_.r_srt_succ_base +
                          utility(it->second.us, static_cast<double>(f.deadline_us), params) *
                              config_.srt_utility_scale
                    : config_.r_srt_fail;
    }
    if (!ok) status_[i] = FlowStatus::Unscheduled;
    out.push_back(s);
  }
  settlement_ = out;
  return out;
}

std::string Environment::trace_jsonl() const {
  std::string out;
  for (const auto& r : trace_) {
    nlohmann::ordered_json line{{"step", r.step},
                                {"flow", r.flow},
                                {"action", r.action},
                                {"outcome", to_string(r.outcome)},
                                {"reward", r.reward}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

}  // namespace tta
