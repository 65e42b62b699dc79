#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tta/environment.hpp"
#include "tta/model.hpp"
#include "tta/rng.hpp"

namespace tta {

struct Hyperparams {
  double learning_rate = 3e-4;
  double gamma = 1e-4;
  double clip = 0.2;
  double value_coef = 0.5;
  double entropy_coef = 0.02;
  int eval_ratio = 4;
  int episodes = 1000;
  int max_steps = 900;
  int epochs = 4;
  int hidden = 128;
  std::uint64_t seed = 0;

  /// Throws ArgumentError for out-of-range values.
  void validate() const;
  bool operator==(const Hyperparams&) const = default;
};

/// Three dense layers: in → hidden (tanh) → hidden (tanh) → out.
/// Parameters are one flat array: W1, b1, W2, b2, W3, b3, each W input-major.
struct MlpShape {
  std::size_t in = 0;
  std::size_t hidden = 0;
  std::size_t out = 0;

  std::size_t count() const { return in * hidden + hidden + hidden * hidden + hidden + hidden * out + out; }
  bool operator==(const MlpShape&) const = default;
};

struct MlpCache {
  std::size_t batch = 0;
  std::vector<double> h1, h2, out;
};

void mlp_forward(const MlpShape& shape, std::span<const double> params, std::span<const double> x,
                 std::size_t batch, MlpCache& cache);

/// Accumulates ∂loss/∂params into `grad` given ∂loss/∂out for the cached batch.
void mlp_backward(const MlpShape& shape, std::span<const double> params, std::span<const double> x,
                  const MlpCache& cache, std::span<const double> dout, std::span<double> grad);

/// Actor (softmax over {TT, AVB}) and critic (scalar value), separate networks.
struct PolicyModel {
  MlpShape actor_shape;
  MlpShape critic_shape;
  std::vector<double> actor;
  std::vector<double> critic;
  std::uint64_t signature = 0;

  std::size_t input_size() const { return actor_shape.in; }
  std::size_t parameter_count() const { return actor.size() + critic.size(); }
  bool operator==(const PolicyModel&) const = default;
};

/// Parameters drawn from uniform(−0.1, 0.1), actor first.
PolicyModel init_policy(std::size_t input_size, std::size_t hidden, std::uint64_t signature, Rng& rng);

/// Identifies the network encoding of a test case: node and link lists plus
/// the number of slots per link (which fixes the state size).
std::uint64_t topology_signature(const TestCase& tc);

struct PolicyOutput {
  std::array<double, 2> probs{};
  double value = 0;
};

/// Throws ShapeMismatchError when the state length differs from the model input.
PolicyOutput policy_forward(const PolicyModel& model, std::span<const double> state);

/// Numerically stable log-softmax of two logits.
std::array<double, 2> log_softmax2(double z0, double z1);

/// −Σ p log p.
double entropy(std::span<const double> probs);

struct Transition {
  int action = 0;
  double reward = 0;
  bool done = false;
  double log_prob = 0;
};

/// One episode. states holds T+1 rows: s_0 … s_T, so row t+1 is s_{t+1}.
struct Trajectory {
  std::size_t state_size = 0;
  std::vector<double> states;
  std::vector<Transition> steps;

  std::span<const double> state(std::size_t t) const { return {states.data() + t * state_size, state_size}; }
  double total_reward() const;
};

/// G_t = r_t + γ·G_{t+1}, with G = 0 after the last step.
std::vector<double> discounted_returns(std::span<const double> rewards, double gamma);

struct ReturnsAdvantages {
  std::vector<double> returns;
  std::vector<double> advantages;
};

/// Â_t = G_t − V(s_t), normalised to zero mean and unit variance when there is
/// more than one step.
ReturnsAdvantages returns_and_advantages(std::span<const double> rewards, std::span<const double> values,
                                         double gamma);

/// Flattened update batch.
struct PpoBatch {
  std::size_t state_size = 0;
  std::vector<double> states;  // T × state_size
  std::vector<int> actions;
  std::vector<double> old_log_probs;
  std::vector<double> advantages;
  std::vector<double> returns;

  std::size_t size() const { return actions.size(); }
};

struct LossParts {
  double policy = 0;   // L^CLIP (to be maximised)
  double value = 0;    // mean ½(G − V)²
  double entropy = 0;  // mean H(π)
  double total = 0;    // −L^CLIP + c1·L^V − c2·H
};

struct PolicyGrad {
  std::vector<double> actor;
  std::vector<double> critic;
};

/// Clipped surrogate term min(ρÂ, clip(ρ, 1−ε, 1+ε)Â).
double clipped_surrogate(double ratio, double advantage, double clip);

/// Loss of `batch` under `model`; with `grad`, also ∂total/∂params (overwritten).
LossParts ppo_loss(const PolicyModel& model, const PpoBatch& batch, const Hyperparams& hp,
                   PolicyGrad* grad = nullptr);

class Adam {
 public:
  Adam() = default;
  Adam(std::size_t n, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(std::span<double> params, std::span<const double> grad);
  std::int64_t steps() const { return t_; }

 private:
  double lr_ = 0, beta1_ = 0, beta2_ = 0, eps_ = 0;
  std::int64_t t_ = 0;
  std::vector<double> m_, v_;
};

struct PpoOptimizer {
  Adam actor;
  Adam critic;

  PpoOptimizer() = default;
  PpoOptimizer(const PolicyModel& model, double lr);
};

/// Per-update (not per-epoch) losses: values from the last epoch.
struct TrainStats {
  double policy_loss = 0;
  double value_loss = 0;
  double entropy = 0;
  double total = 0;
};

/// Returns, advantages and `hp.epochs` full-batch Adam steps.
/// Throws NaNError on a non-finite loss or gradient; the model keeps the
/// parameters of the last finite step.
TrainStats ppo_update(PolicyModel& model, PpoOptimizer& opt, const std::vector<Trajectory>& trajectories,
                      const Hyperparams& hp);

/// Rolls out one episode. Sampling draws from `rng`; with rng == nullptr the
/// policy acts greedily (ties go to TT).
Trajectory rollout(const PolicyModel& model, Environment& env, const TestCase& tc, int max_steps, Rng* rng);

struct EpisodeLog {
  int episode = 0;
  std::size_t testcase = 0;
  std::size_t steps = 0;
  double reward = 0;
  TrainStats stats;
  bool evaluated = false;
  double eval_reward = 0;
};

struct TrainResult {
  PolicyModel best;
  double best_eval_reward = 0;
  std::vector<EpisodeLog> log;
  std::string rng_state;
};

/// PPO over `testcases` (cycled one per episode). A greedy evaluation over all
/// cases runs after every `eval_ratio` episodes and after the last one; the
/// model with the highest evaluation reward is returned.
/// Throws TopologyMismatchError when the cases encode differently.
TrainResult train(const std::vector<TestCase>& testcases, const Hyperparams& hp, const RewardConfig& rewards = {},
                  const std::function<void(const EpisodeLog&)>& on_episode = {});

std::string training_log_csv(const std::vector<EpisodeLog>& log);

/// Greedy episode with AVB fallback for HRT flows TT cannot carry. Always
/// returns a total assignment. Throws ShapeMismatchError on an encoding mismatch.
Assignment infer(const PolicyModel& model, const TestCase& tc);

// Checkpoints -----------------------------------------------------------------

struct Checkpoint {
  PolicyModel model;
  Hyperparams hyperparams;
  std::string rng_state;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(const std::string& bytes);
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Throws SignatureMismatchError unless the checkpoint was trained on tc's encoding.
void require_signature(const PolicyModel& model, const TestCase& tc);

}  // namespace tta
