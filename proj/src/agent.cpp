#include "tta/agent.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "tta/errors.hpp"
#include "tta/kernels.hpp"
#include "tta/scheduler.hpp"

namespace tta {

void Hyperparams::validate() const {
  if (!(learning_rate > 0)) throw ArgumentError("learning rate must be positive");
  if (!(gamma >= 0 && gamma <= 1)) throw ArgumentError("gamma must lie in [0, 1]");
  if (!(clip > 0 && clip < 1)) throw ArgumentError("clip must lie in (0, 1)");
  if (!(value_coef >= 0) || !(entropy_coef >= 0)) throw ArgumentError("loss coefficients must be non-negative");
  if (eval_ratio < 1 || episodes < 1 || max_steps < 1 || epochs < 1 || hidden < 1)
    throw ArgumentError("episode, step, epoch and layer counts must be positive");
}

// Network ---------------------------------------------------------------------

namespace {

struct Offsets {
  std::size_t w1, b1, w2, b2, w3, b3;
};

Offsets offsets(const MlpShape& s) {
  Offsets o{};
  o.w1 = 0;
  o.b1 = o.w1 + s.in * s.hidden;
  o.w2 = o.b1 + s.hidden;
  o.b2 = o.w2 + s.hidden * s.hidden;
  o.w3 = o.b2 + s.hidden;
  o.b3 = o.w3 + s.hidden * s.out;
  return o;
}

template <class T>
auto sub(std::span<T> v, std::size_t off, std::size_t len) {
  return v.subspan(off, len);
}

void tanh_inplace(std::vector<double>& v) {
  for (double& x : v) x = std::tanh(x);
}

}  // namespace

void mlp_forward(const MlpShape& s, std::span<const double> p, std::span<const double> x, std::size_t batch,
                 MlpCache& cache) {
  if (p.size() != s.count()) throw ShapeMismatchError("parameter array does not match the network shape");
  if (x.size() != batch * s.in) throw ShapeMismatchError("input batch does not match the network input");
  const Offsets o = offsets(s);
  cache.batch = batch;
  cache.h1.resize(batch * s.hidden);
  cache.h2.resize(batch * s.hidden);
  cache.out.resize(batch * s.out);
  kernels::dense_forward({batch, s.in, s.hidden}, sub(p, o.w1, s.in * s.hidden), sub(p, o.b1, s.hidden), x,
                         cache.h1);
  tanh_inplace(cache.h1);
  kernels::dense_forward({batch, s.hidden, s.hidden}, sub(p, o.w2, s.hidden * s.hidden), sub(p, o.b2, s.hidden),
                         cache.h1, cache.h2);
  tanh_inplace(cache.h2);
  kernels::dense_forward({batch, s.hidden, s.out}, sub(p, o.w3, s.hidden * s.out), sub(p, o.b3, s.out), cache.h2,
                         cache.out);
}

void mlp_backward(const MlpShape& s, std::span<const double> p, std::span<const double> x, const MlpCache& cache,
                  std::span<const double> dout, std::span<double> grad) {
  const std::size_t b = cache.batch;
  if (grad.size() != s.count() || dout.size() != b * s.out)
    throw ShapeMismatchError("gradient buffers do not match the network shape");
  const Offsets o = offsets(s);

  kernels::dense_backward_params({b, s.hidden, s.out}, cache.h2, dout, sub(grad, o.w3, s.hidden * s.out),
                                 sub(grad, o.b3, s.out));
  std::vector<double> dh2(b * s.hidden);
  kernels::dense_backward_input({b, s.hidden, s.out}, sub(p, o.w3, s.hidden * s.out), dout, dh2);
  for (std::size_t k = 0; k < dh2.size(); ++k) dh2[k] *= 1.0 - cache.h2[k] * cache.h2[k];

  kernels::dense_backward_params({b, s.hidden, s.hidden}, cache.h1, dh2, sub(grad, o.w2, s.hidden * s.hidden),
                                 sub(grad, o.b2, s.hidden));
  std::vector<double> dh1(b * s.hidden);
  kernels::dense_backward_input({b, s.hidden, s.hidden}, sub(p, o.w2, s.hidden * s.hidden), dh2, dh1);
  for (std::size_t k = 0; k < dh1.size(); ++k) dh1[k] *= 1.0 - cache.h1[k] * cache.h1[k];

  kernels::dense_backward_params({b, s.in, s.hidden}, x, dh1, sub(grad, o.w1, s.in * s.hidden),
                                 sub(grad, o.b1, s.hidden));
}

PolicyModel init_policy(std::size_t input_size, std::size_t hidden, std::uint64_t signature, Rng& rng) {
  if (input_size == 0 || hidden == 0) throw ArgumentError("network sizes must be positive");
  PolicyModel m;
  m.actor_shape = {input_size, hidden, 2};
  m.critic_shape = {input_size, hidden, 1};
  m.signature = signature;
  m.actor.resize(m.actor_shape.count());
  m.critic.resize(m.critic_shape.count());
  for (double& w : m.actor) w = uniform_real(rng, -0.1, 0.1);
  for (double& w : m.critic) w = uniform_real(rng, -0.1, 0.1);
  return m;
}

std::uint64_t topology_signature(const TestCase& tc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  };
  for (const Node& n : tc.topology().nodes()) {
    mix(n.id);
    mix(to_string(n.kind));
  }
  for (const Link& l : tc.topology().links()) {
    mix(l.id);
    mix(l.a);
    mix(l.b);
    mix(std::to_string(l.rate_bps));
  }
  mix(std::to_string(make_grid(tc).cells_per_link()));
  return h;
}

std::array<double, 2> log_softmax2(double z0, double z1) {
  const double m = std::max(z0, z1);
  const double lse = m + std::log(std::exp(z0 - m) + std::exp(z1 - m));
  return {z0 - lse, z1 - lse};
}

double entropy(std::span<const double> probs) {
  double h = 0;
  for (double p : probs)
    if (p > 0) h -= p * std::log(p);
  return h;
}

PolicyOutput policy_forward(const PolicyModel& model, std::span<const double> state) {
  if (state.size() != model.input_size()) throw ShapeMismatchError("state length does not match the model input");
  MlpCache a, c;
  mlp_forward(model.actor_shape, model.actor, state, 1, a);
  mlp_forward(model.critic_shape, model.critic, state, 1, c);
  const auto lp = log_softmax2(a.out[0], a.out[1]);
  return {{std::exp(lp[0]), std::exp(lp[1])}, c.out[0]};
}

// Returns and loss --------------------------------------------------------------

double Trajectory::total_reward() const {
  double r = 0;
  for (const auto& s : steps) r += s.reward;
  return r;
}

std::vector<double> discounted_returns(std::span<const double> rewards, double gamma) {
  std::vector<double> g(rewards.size());
  double next = 0;
  for (std::size_t t = rewards.size(); t-- > 0;) {
    next = rewards[t] + gamma * next;
    g[t] = next;
  }
  return g;
}

namespace {

void normalise(std::vector<double>& v) {
  if (v.size() <= 1) return;
  double mean = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(v.size());
  const double sd = std::sqrt(var);
  for (double& x : v) x = sd > 1e-12 ? (x - mean) / sd : x - mean;
}

}  // namespace

ReturnsAdvantages returns_and_advantages(std::span<const double> rewards, std::span<const double> values,
                                         double gamma) {
  if (values.size() != rewards.size()) throw ShapeMismatchError("one value per reward is required");
  ReturnsAdvantages out;
  out.returns = discounted_returns(rewards, gamma);
  out.advantages.resize(rewards.size());
  for (std::size_t t = 0; t < rewards.size(); ++t) out.advantages[t] = out.returns[t] - values[t];
  normalise(out.advantages);
  return out;
}

double clipped_surrogate(double ratio, double advantage, double clip) {
  const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
  return std::min(ratio * advantage, clipped * advantage);
}

LossParts ppo_loss(const PolicyModel& model, const PpoBatch& batch, const Hyperparams& hp, PolicyGrad* grad) {
  const std::size_t n = batch.size();
  if (n == 0) throw ArgumentError("empty update batch");
  if (batch.state_size != model.input_size() || batch.states.size() != n * batch.state_size ||
      batch.old_log_probs.size() != n || batch.advantages.size() != n || batch.returns.size() != n)
    throw ShapeMismatchError("update batch does not match the model");

  MlpCache ac, cc;
  mlp_forward(model.actor_shape, model.actor, batch.states, n, ac);
  mlp_forward(model.critic_shape, model.critic, batch.states, n, cc);

  const double inv = 1.0 / static_cast<double>(n);
  std::vector<double> dz(grad ? 2 * n : 0), dv(grad ? n : 0);
  LossParts loss;
  for (std::size_t t = 0; t < n; ++t) {
    const auto lp = log_softmax2(ac.out[2 * t], ac.out[2 * t + 1]);
    const std::array<double, 2> p{std::exp(lp[0]), std::exp(lp[1])};
    const double h = -(p[0] * lp[0] + p[1] * lp[1]);
    const int a = batch.actions[t];
    const double ratio = std::exp(lp[a] - batch.old_log_probs[t]);
    const double adv = batch.advantages[t];
    const double v = cc.out[t];
    const double err = batch.returns[t] - v;

    loss.policy += clipped_surrogate(ratio, adv, hp.clip);
    loss.entropy += h;
    loss.value += 0.5 * err * err;

    if (grad) {
      const double clipped = std::clamp(ratio, 1.0 - hp.clip, 1.0 + hp.clip);
      const double g_lp = ratio * adv <= clipped * adv ? -adv * ratio * inv : 0.0;
      for (int k = 0; k < 2; ++k)
        dz[2 * t + k] = g_lp * ((k == a ? 1.0 : 0.0) - p[k]) + hp.entropy_coef * inv * p[k] * (lp[k] + h);
      dv[t] = -hp.value_coef * err * inv;
    }
  }
  loss.policy *= inv;
  loss.entropy *= inv;
  loss.value *= inv;
  loss.total = -loss.policy + hp.value_coef * loss.value - hp.entropy_coef * loss.entropy;

  if (grad) {
    grad->actor.assign(model.actor.size(), 0.0);
    grad->critic.assign(model.critic.size(), 0.0);
    mlp_backward(model.actor_shape, model.actor, batch.states, ac, dz, grad->actor);
    mlp_backward(model.critic_shape, model.critic, batch.states, cc, dv, grad->critic);
  }
  return loss;
}

Adam::Adam(std::size_t n, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size())
    throw ShapeMismatchError("optimizer state does not match the parameters");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    m_[k] = beta1_ * m_[k] + (1.0 - beta1_) * grad[k];
    v_[k] = beta2_ * v_[k] + (1.0 - beta2_) * grad[k] * grad[k];
    params[k] -= lr_ * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + eps_);
  }
}

PpoOptimizer::PpoOptimizer(const PolicyModel& model, double lr)
    : actor(model.actor.size(), lr), critic(model.critic.size(), lr) {}

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

TrainStats ppo_update(PolicyModel& model, PpoOptimizer& opt, const std::vector<Trajectory>& trajectories,
                      const Hyperparams& hp) {
  PpoBatch batch;
  batch.state_size = model.input_size();
  for (const Trajectory& tr : trajectories) {
    if (tr.state_size != batch.state_size) throw ShapeMismatchError("trajectory does not match the model");
    std::vector<double> rewards;
    for (const Transition& s : tr.steps) {
      batch.actions.push_back(s.action);
      batch.old_log_probs.push_back(s.log_prob);
      rewards.push_back(s.reward);
    }
    const auto g = discounted_returns(rewards, hp.gamma);
    batch.returns.insert(batch.returns.end(), g.begin(), g.end());
    batch.states.insert(batch.states.end(), tr.states.begin(),
                        tr.states.begin() + static_cast<std::ptrdiff_t>(tr.steps.size() * tr.state_size));
  }
  if (batch.size() == 0) throw ArgumentError("no transitions to learn from");

  MlpCache cc;
  mlp_forward(model.critic_shape, model.critic, batch.states, batch.size(), cc);
  batch.advantages.resize(batch.size());
  for (std::size_t t = 0; t < batch.size(); ++t) batch.advantages[t] = batch.returns[t] - cc.out[t];
  normalise(batch.advantages);

  TrainStats stats;
  PolicyGrad grad;
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    const LossParts loss = ppo_loss(model, batch, hp, &grad);
    if (!std::isfinite(loss.total) || !all_finite(grad.actor) || !all_finite(grad.critic)) {
      char msg[160];
      std::snprintf(msg, sizeof msg, "non-finite loss in epoch %d (policy %g, value %g, entropy %g)", epoch,
                    loss.policy, loss.value, loss.entropy);
      throw NaNError(msg);
    }
    opt.actor.step(model.actor, grad.actor);
    opt.critic.step(model.critic, grad.critic);
    stats = {loss.policy, loss.value, loss.entropy, loss.total};
  }
  return stats;
}

// Episodes ----------------------------------------------------------------------

namespace {

/// Action and its log-probability from the actor alone.
std::pair<int, double> act(const PolicyModel& model, std::span<const double> state, Rng* rng, MlpCache& cache) {
  mlp_forward(model.actor_shape, model.actor, state, 1, cache);
  const auto lp = log_softmax2(cache.out[0], cache.out[1]);
  int a;
  if (rng)
    a = uniform01(*rng) < std::exp(lp[0]) ? 0 : 1;
  else
    a = lp[0] >= lp[1] ? 0 : 1;
  return {a, lp[a]};
}

}  // namespace

Trajectory rollout(const PolicyModel& model, Environment& env, const TestCase& tc, int max_steps, Rng* rng) {
  const EnvState first = env.reset(tc);
  if (first.size() != model.input_size()) throw ShapeMismatchError("test case encoding does not match the model");
  Trajectory tr;
  tr.state_size = first.size();
  tr.states.resize(tr.state_size);
  first.flatten_into(tr.states);
  MlpCache cache;
  while (!env.done() && static_cast<int>(tr.steps.size()) < max_steps) {
    const auto [a, lp] = act(model, tr.state(tr.steps.size()), rng, cache);
    StepOutcome out = env.step(a);
    const std::size_t row = tr.states.size();
    tr.states.resize(row + tr.state_size);
    out.next_state.flatten_into(std::span<double>(tr.states).subspan(row, tr.state_size));
    tr.steps.push_back({a, out.reward, out.done, lp});
  }
  return tr;
}

TrainResult train(const std::vector<TestCase>& cases, const Hyperparams& hp, const RewardConfig& rewards,
                  const std::function<void(const EpisodeLog&)>& on_episode) {
  hp.validate();
  if (cases.empty()) throw ArgumentError("training needs at least one test case");
  const std::uint64_t sig = topology_signature(cases[0]);
  for (const TestCase& tc : cases)
    if (topology_signature(tc) != sig) throw TopologyMismatchError("training cases do not share one topology encoding");

  Environment env(rewards);
  env.reset(cases[0]);
  Rng rng(hp.seed);
  PolicyModel model = init_policy(env.state_size(), static_cast<std::size_t>(hp.hidden), sig, rng);
  PpoOptimizer opt(model, hp.learning_rate);

  TrainResult result;
  bool have_best = false;
  for (int ep = 0; ep < hp.episodes; ++ep) {
    EpisodeLog row;
    row.episode = ep + 1;
    row.testcase = static_cast<std::size_t>(ep) % cases.size();
    Trajectory tr = rollout(model, env, cases[row.testcase], hp.max_steps, &rng);
    row.steps = tr.steps.size();
    row.reward = tr.total_reward();
    row.stats = ppo_update(model, opt, {tr}, hp);

    if ((ep + 1) % hp.eval_ratio == 0 || ep + 1 == hp.episodes) {
      double total = 0;
      for (const TestCase& tc : cases) total += rollout(model, env, tc, hp.max_steps, nullptr).total_reward();
      row.evaluated = true;
      row.eval_reward = total;
      if (!have_best || total > result.best_eval_reward) {
        result.best = model;
        result.best_eval_reward = total;
        have_best = true;
      }
    }
    if (on_episode) on_episode(row);
    result.log.push_back(row);
  }
  std::ostringstream state;
  state << rng;
  result.rng_state = state.str();
  return result;
}

std::string training_log_csv(const std::vector<EpisodeLog>& log) {
  std::string out = "episode,testcase,steps,cumulative_reward,policy_loss,value_loss,entropy,eval_reward\n";
  char buf[256];
  for (const EpisodeLog& r : log) {
    std::snprintf(buf, sizeof buf, "%d,%zu,%zu,%.10g,%.10g,%.10g,%.10g,", r.episode, r.testcase, r.steps, r.reward,
                  r.stats.policy_loss, r.stats.value_loss, r.stats.entropy);
    out += buf;
    if (r.evaluated) {
      std::snprintf(buf, sizeof buf, "%.10g", r.eval_reward);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

Assignment infer(const PolicyModel& model, const TestCase& tc) {
  Environment env(RewardConfig{}, true);
  EnvState s = env.reset(tc);
  if (s.size() != model.input_size()) throw ShapeMismatchError("test case encoding does not match the model");
  std::vector<double> x(s.size());
  MlpCache cache;
  while (!env.done()) {
    s.flatten_into(x);
    s = env.step(act(model, x, nullptr, cache).first).next_state;
  }
  return env.assignment();
}

void require_signature(const PolicyModel& model, const TestCase& tc) {
  if (model.signature != topology_signature(tc))
    throw SignatureMismatchError("checkpoint was trained on a different topology encoding");
}

}  // namespace tta
