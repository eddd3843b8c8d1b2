#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gaitprior/demo.hpp"
#include "gaitprior/envs.hpp"
#include "gaitprior/imitation.hpp"
#include "gaitprior/latent_prior.hpp"
#include "gaitprior/nn.hpp"

namespace gaitprior {

/// Gaussian policy over the action head. With a prior attached the head is
/// the latent part followed by the full-action residual; without one it is
/// the plain environment action.
struct PolicyParams {
  Mlp pi_net;
  Mlp v_net;
  Vector log_std;
  int a_latent = 0;  // 0 means no prior attached
  int a_full = 0;
  int head_dim() const { return a_latent + a_full; }
};

PolicyParams make_policy(int obs_dim, int a_latent, int a_full,
                         const std::vector<int>& hidden, std::uint64_t seed);

/// Running mean/variance over the raw environment observation (the appended
/// phase channel is never normalized). normalize clips to +-clip.
struct RunningNorm {
  double count = 0.0;
  Vector mean;
  Vector var;
  double clip = 10.0;
};

RunningNorm make_running_norm(int dim, double clip = 10.0);

/// Chan parallel merge of batch statistics; rows of `batch` are samples.
void update_running_norm(RunningNorm& norm, const Matrix& batch);

Vector normalize_observation(const RunningNorm& norm, const Vector& raw);

struct RolloutBuffer {
  int capacity = 0;
  int size = 0;
  Matrix observations;  // capacity x obs_dim, phase channel last
  Matrix actions;       // capacity x head_dim, raw pre-clip samples
  Vector log_probs;
  Vector values;
  Vector rewards;
  std::vector<std::uint8_t> episode_starts;  // step t started a new episode
  std::uint8_t final_episode_start = 0;      // the state after the last step did
  Vector advantages;
  Vector returns;
};

RolloutBuffer make_rollout_buffer(int capacity, int obs_dim, int head_dim);

struct ActResult {
  Vector head;
  double log_prob = 0.0;
  double value = 0.0;
};

/// Diagonal Gaussian head. Deterministic mode returns the mean; sampling
/// consumes the rng in a fixed order. Throws on non-finite network output.
ActResult act(const PolicyParams& params, const Vector& norm_obs, bool deterministic,
              std::mt19937_64& rng);

/// First a_latent entries clipped to [-1, 1] (ready to decode), remaining
/// a_full entries raw.
std::pair<Vector, Vector> split_action_head(const Vector& head, int a_latent, int a_full);

/// delta_t = r_t + gamma V_{t+1} (1 - done) - V_t;
/// A_t = delta_t + gamma lambda (1 - done) A_{t+1}; returns = A + V.
void compute_gae(RolloutBuffer& buffer, double last_value, double gamma, double lambda);

RolloutBuffer merge_rollouts(const std::vector<RolloutBuffer>& parts);

struct PpoConfig {
  double lr = 3e-4;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_range = 0.2;
  int n_epochs = 10;
  int minibatch = 64;
  double vf_coef = 0.5;
  double ent_coef = 0.0;
  double max_grad_norm = 0.5;
  int rollout_length = 2048;
  long total_steps = 200000;
  std::uint64_t seed = 0;
  int n_envs = 1;
  std::vector<int> hidden = {64, 64};
};

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
};

/// One Adam optimizer spanning both networks and log_std, stepped once per
/// minibatch with a shared schedule.
struct PpoOptimizer {
  AdamState pi;
  AdamState v;
  AdamVectorState log_std;
};

PpoOptimizer make_ppo_optimizer(const PolicyParams& params, const PpoConfig& config);

/// n_epochs of shuffled-minibatch clipped-surrogate updates on a filled
/// buffer whose advantages are computed; advantages are standardized per
/// minibatch inside. Stats are means over all minibatches.
UpdateStats ppo_update(PolicyParams& params, const RolloutBuffer& buffer,
                       const PpoConfig& config, PpoOptimizer& optimizer,
                       std::mt19937_64& shuffle_rng);

/// One CSV row per PPO update.
struct UpdateLog {
  int update = 0;
  long env_steps = 0;
  double mean_task_return = 0.0;
  double mean_style_return = 0.0;
  double ep_len_mean = 0.0;
  double mean_abs_decoded = 0.0;
  double mean_abs_residual = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  double wall_seconds = 0.0;
};

/// Everything the action pipeline saw at one collection step.
struct StepRecord {
  long env_step = 0;
  int env_index = 0;
  Vector head;
  Vector latent_clipped;
  Vector decoded;
  Vector residual;
  Vector applied;
  double phase = 0.0;
  double task_reward = 0.0;
  double style_reward = 0.0;
  double mixed_reward = 0.0;
  bool terminated = false;
  bool truncated = false;
};

using StepObserver = std::function<void(const StepRecord&)>;
using EnvFactory = std::function<std::unique_ptr<Env>(std::uint64_t seed)>;

struct TrainOptions {
  const LatentActionPrior* prior = nullptr;   // adds the latent head
  const Demonstration* style_demo = nullptr;  // adds phase clock + style reward
  RewardWeights weights{1.0, 0.0};
  double w_full = 0.1;
  bool timing = false;  // when false wall_seconds logs as 0 for reproducible files
  StepObserver observer;
  std::function<void(const UpdateLog&)> on_update;
};

struct TrainResult {
  PolicyParams params;
  RunningNorm norm;
  int phase_period = 0;  // 0 when no demonstration was attached
  std::vector<UpdateLog> logs;
};

/// Full PPO loop: collect with composed actions, mix rewards, GAE, update.
/// Bitwise deterministic for fixed config and n_envs.
TrainResult train(const EnvFactory& factory, const PpoConfig& config,
                  const TrainOptions& options = {});

struct EvalResult {
  double mean_task_return = 0.0;
  double std_task_return = 0.0;
  double mean_style_return = 0.0;
  double mean_episode_length = 0.0;
  int episodes = 0;
};

/// Frozen-policy rollout; never touches the running norm. style_demo may be
/// null even if phase_period > 0 (the phase channel still ticks).
EvalResult evaluate_policy(Env& env, const PolicyParams& params, const RunningNorm& norm,
                           int phase_period, const LatentActionPrior* prior,
                           const Demonstration* style_demo, double w_full, int episodes,
                           bool deterministic, std::uint64_t seed);

}  // namespace gaitprior
