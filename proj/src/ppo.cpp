#include "gaitprior/ppo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <string>

#include "gaitprior/errors.hpp"
#include "gaitprior/rng.hpp"

namespace gaitprior {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double clipd(double x, double lo, double hi) { return std::min(hi, std::max(lo, x)); }

double value_of(const PolicyParams& params, const Vector& policy_obs) {
  const Vector v = forward(params.v_net, policy_obs);
  if (!std::isfinite(v[0])) {
    throw std::runtime_error("value network produced non-finite output");
  }
  return v[0];
}

Vector assemble_policy_obs(const RunningNorm& norm, const Vector& raw, double phase_channel) {
  const Vector scaled = normalize_observation(norm, raw);
  Vector out(scaled.size() + 1);
  out.head(scaled.size()) = scaled;
  out[scaled.size()] = phase_channel;
  return out;
}

/// Rolling statistics over the most recently finished episodes.
class EpisodeWindow {
 public:
  void push(double task, double style, double length) {
    task_.push_back(task);
    style_.push_back(style);
    len_.push_back(length);
    if (task_.size() > 100) {
      task_.pop_front();
      style_.pop_front();
      len_.pop_front();
    }
  }
  bool empty() const { return task_.empty(); }
  double mean_task() const { return mean(task_); }
  double mean_style() const { return mean(style_); }
  double mean_len() const { return mean(len_); }

 private:
  static double mean(const std::deque<double>& d) {
    if (d.empty()) return 0.0;
    return std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
  }
  std::deque<double> task_, style_, len_;
};

}  // namespace

PolicyParams make_policy(int obs_dim, int a_latent, int a_full,
                         const std::vector<int>& hidden, std::uint64_t seed) {
  if (obs_dim < 1 || a_full < 1 || a_latent < 0) {
    throw std::invalid_argument("make_policy: bad dimensions");
  }
  PolicyParams params;
  params.a_latent = a_latent;
  params.a_full = a_full;
  std::vector<int> pi_sizes{obs_dim};
  pi_sizes.insert(pi_sizes.end(), hidden.begin(), hidden.end());
  pi_sizes.push_back(a_latent + a_full);
  std::vector<int> v_sizes{obs_dim};
  v_sizes.insert(v_sizes.end(), hidden.begin(), hidden.end());
  v_sizes.push_back(1);
  params.pi_net = make_mlp(pi_sizes, Activation::Tanh, Activation::Identity,
                           split_seed(seed, 0));
  params.v_net = make_mlp(v_sizes, Activation::Tanh, Activation::Identity,
                          split_seed(seed, 1));
  params.log_std = Vector::Zero(a_latent + a_full);
  return params;
}

RunningNorm make_running_norm(int dim, double clip) {
  if (dim < 1) throw std::invalid_argument("make_running_norm: dim must be >= 1");
  RunningNorm norm;
  norm.mean = Vector::Zero(dim);
  norm.var = Vector::Zero(dim);
  norm.clip = clip;
  return norm;
}

void update_running_norm(RunningNorm& norm, const Matrix& batch) {
  const double n_b = static_cast<double>(batch.rows());
  if (batch.rows() == 0) return;
  if (batch.cols() != norm.mean.size()) {
    throw std::invalid_argument("update_running_norm: width mismatch");
  }
  if (!batch.allFinite()) {
    throw std::invalid_argument("update_running_norm: non-finite batch");
  }
  const Vector batch_mean = batch.colwise().mean().transpose();
  const Matrix centered = batch.rowwise() - batch_mean.transpose();
  const Vector batch_var = centered.array().square().colwise().sum().transpose() / n_b;

  const double total = norm.count + n_b;
  const Vector delta = batch_mean - norm.mean;
  const Vector m2 = norm.var * norm.count + batch_var * n_b +
                    delta.array().square().matrix() * (norm.count * n_b / total);
  norm.mean += delta * (n_b / total);
  norm.var = m2 / total;
  norm.count = total;
}

Vector normalize_observation(const RunningNorm& norm, const Vector& raw) {
  if (raw.size() != norm.mean.size()) {
    throw std::invalid_argument("normalize_observation: width mismatch");
  }
  Vector z = (raw - norm.mean).array() / (norm.var.array() + 1e-8).sqrt();
  return z.cwiseMax(-norm.clip).cwiseMin(norm.clip);
}

RolloutBuffer make_rollout_buffer(int capacity, int obs_dim, int head_dim) {
  if (capacity < 1 || obs_dim < 1 || head_dim < 1) {
    throw std::invalid_argument("make_rollout_buffer: bad sizes");
  }
  RolloutBuffer b;
  b.capacity = capacity;
  b.observations = Matrix::Zero(capacity, obs_dim);
  b.actions = Matrix::Zero(capacity, head_dim);
  b.log_probs = Vector::Zero(capacity);
  b.values = Vector::Zero(capacity);
  b.rewards = Vector::Zero(capacity);
  b.episode_starts.assign(static_cast<std::size_t>(capacity), 0);
  return b;
}

ActResult act(const PolicyParams& params, const Vector& norm_obs, bool deterministic,
              std::mt19937_64& rng) {
  const Vector mu = forward(params.pi_net, norm_obs);
  if (!mu.allFinite()) {
    throw std::runtime_error("policy network produced non-finite output");
  }
  const Eigen::Index d = mu.size();
  ActResult out;
  double zsq = 0.0;
  if (deterministic) {
    out.head = mu;
  } else {
    out.head = Vector(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      const double z = standard_normal(rng);
      out.head[j] = mu[j] + std::exp(params.log_std[j]) * z;
      zsq += z * z;
    }
  }
  out.log_prob = -0.5 * zsq - params.log_std.sum() - 0.5 * static_cast<double>(d) * kLog2Pi;
  out.value = value_of(params, norm_obs);
  return out;
}

std::pair<Vector, Vector> split_action_head(const Vector& head, int a_latent, int a_full) {
  if (head.size() != a_latent + a_full) {
    throw std::invalid_argument("split_action_head: head length " +
                                std::to_string(head.size()) + ", expected " +
                                std::to_string(a_latent + a_full));
  }
  Vector latent = head.head(a_latent).cwiseMax(-1.0).cwiseMin(1.0);
  Vector residual = head.tail(a_full);
  return {std::move(latent), std::move(residual)};
}

void compute_gae(RolloutBuffer& buffer, double last_value, double gamma, double lambda) {
  const int n = buffer.size;
  if (n < 1) throw std::invalid_argument("compute_gae: empty buffer");
  buffer.advantages = Vector::Zero(n);
  double last_gae = 0.0;
  for (int t = n - 1; t >= 0; --t) {
    double next_non_terminal;
    double next_value;
    if (t == n - 1) {
      next_non_terminal = buffer.final_episode_start ? 0.0 : 1.0;
      next_value = last_value;
    } else {
      next_non_terminal = buffer.episode_starts[static_cast<std::size_t>(t + 1)] ? 0.0 : 1.0;
      next_value = buffer.values[t + 1];
    }
    const double delta =
        buffer.rewards[t] + gamma * next_value * next_non_terminal - buffer.values[t];
    last_gae = delta + gamma * lambda * next_non_terminal * last_gae;
    buffer.advantages[t] = last_gae;
  }
  buffer.returns = buffer.advantages + buffer.values.head(n);
}

RolloutBuffer merge_rollouts(const std::vector<RolloutBuffer>& parts) {
  if (parts.empty()) throw std::invalid_argument("merge_rollouts: no parts");
  int total = 0;
  for (const RolloutBuffer& p : parts) total += p.size;
  RolloutBuffer merged = make_rollout_buffer(
      total, static_cast<int>(parts[0].observations.cols()),
      static_cast<int>(parts[0].actions.cols()));
  merged.advantages = Vector::Zero(total);
  merged.returns = Vector::Zero(total);
  int at = 0;
  for (const RolloutBuffer& p : parts) {
    const int n = p.size;
    merged.observations.middleRows(at, n) = p.observations.topRows(n);
    merged.actions.middleRows(at, n) = p.actions.topRows(n);
    merged.log_probs.segment(at, n) = p.log_probs.head(n);
    merged.values.segment(at, n) = p.values.head(n);
    merged.rewards.segment(at, n) = p.rewards.head(n);
    merged.advantages.segment(at, n) = p.advantages.head(n);
    merged.returns.segment(at, n) = p.returns.head(n);
    for (int t = 0; t < n; ++t) {
      merged.episode_starts[static_cast<std::size_t>(at + t)] =
          p.episode_starts[static_cast<std::size_t>(t)];
    }
    at += n;
  }
  merged.size = total;
  return merged;
}

PpoOptimizer make_ppo_optimizer(const PolicyParams& params, const PpoConfig& config) {
  AdamParams hp;
  hp.lr = config.lr;
  PpoOptimizer opt;
  opt.pi = make_adam_state(params.pi_net, hp);
  opt.v = make_adam_state(params.v_net, hp);
  opt.log_std = make_adam_state(params.log_std, hp);
  return opt;
}

UpdateStats ppo_update(PolicyParams& params, const RolloutBuffer& buffer,
                       const PpoConfig& config, PpoOptimizer& optimizer,
                       std::mt19937_64& shuffle_rng) {
  const int n = buffer.size;
  if (n < 1) throw std::invalid_argument("ppo_update: empty buffer");
  const int head = params.head_dim();
  const int obs_dim = params.pi_net.input_dim();
  const double eps = config.clip_range;

  std::vector<int> indices(static_cast<std::size_t>(n));
  std::iota(indices.begin(), indices.end(), 0);

  UpdateStats acc;
  long batches = 0;
  for (int epoch = 0; epoch < config.n_epochs; ++epoch) {
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(shuffle_rng() % static_cast<std::uint64_t>(i + 1));
      std::swap(indices[static_cast<std::size_t>(i)], indices[static_cast<std::size_t>(j)]);
    }
    for (int start = 0; start < n; start += config.minibatch) {
      const int m = std::min(config.minibatch, n - start);
      Matrix obs(m, obs_dim);
      Matrix act_mb(m, head);
      Vector adv(m), ret(m), old_logp(m);
      for (int r = 0; r < m; ++r) {
        const int idx = indices[static_cast<std::size_t>(start + r)];
        obs.row(r) = buffer.observations.row(idx);
        act_mb.row(r) = buffer.actions.row(idx);
        adv[r] = buffer.advantages[idx];
        ret[r] = buffer.returns[idx];
        old_logp[r] = buffer.log_probs[idx];
      }
      if (m > 1) {
        const double mean = adv.mean();
        const double sstd =
            std::sqrt((adv.array() - mean).square().sum() / static_cast<double>(m - 1));
        adv = ((adv.array() - mean) / (sstd + 1e-8)).matrix();
      }

      ForwardTrace pi_trace;
      const Matrix mu = forward_batch(params.pi_net, obs, pi_trace);
      const Vector sigma = params.log_std.array().exp().matrix();
      Matrix z = act_mb - mu;
      for (int j = 0; j < head; ++j) z.col(j) /= sigma[j];
      const double logp_const =
          params.log_std.sum() + 0.5 * static_cast<double>(head) * kLog2Pi;

      Matrix mu_upstream = Matrix::Zero(m, head);
      Vector logstd_grad = Vector::Zero(head);
      double policy_loss = 0.0;
      double approx_kl = 0.0;
      int clipped = 0;
      for (int r = 0; r < m; ++r) {
        const double logp = -0.5 * z.row(r).squaredNorm() - logp_const;
        const double rho = std::exp(logp - old_logp[r]);
        const double s1 = rho * adv[r];
        const double s2 = clipd(rho, 1.0 - eps, 1.0 + eps) * adv[r];
        policy_loss -= std::min(s1, s2);
        approx_kl += (rho - 1.0) - (logp - old_logp[r]);
        if (std::abs(rho - 1.0) > eps) ++clipped;
        if (s1 <= s2) {
          const double d_logp = -adv[r] * rho / static_cast<double>(m);
          for (int j = 0; j < head; ++j) {
            mu_upstream(r, j) = d_logp * z(r, j) / sigma[j];
            logstd_grad[j] += d_logp * (z(r, j) * z(r, j) - 1.0);
          }
        }
      }
      policy_loss /= static_cast<double>(m);
      approx_kl /= static_cast<double>(m);
      logstd_grad.array() -= config.ent_coef;

      ForwardTrace v_trace;
      const Matrix v_out = forward_batch(params.v_net, obs, v_trace);
      const Vector v_err = v_out.col(0) - ret;
      const double value_loss = v_err.squaredNorm() / static_cast<double>(m);
      Matrix v_upstream = (2.0 * config.vf_coef / static_cast<double>(m)) * v_err;

      const double entropy =
          params.log_std.sum() + 0.5 * static_cast<double>(head) * (kLog2Pi + 1.0);
      if (!std::isfinite(policy_loss) || !std::isfinite(value_loss)) {
        throw std::runtime_error(
            "ppo_update: non-finite loss (epoch " + std::to_string(epoch) +
            ", minibatch offset " + std::to_string(start) +
            ", policy_loss " + std::to_string(policy_loss) +
            ", value_loss " + std::to_string(value_loss) + ")");
      }

      Gradients pi_grads = backward_batch(params.pi_net, pi_trace, mu_upstream);
      Gradients v_grads = backward_batch(params.v_net, v_trace, v_upstream);
      const double total_norm = std::sqrt(pi_grads.squared_norm() + v_grads.squared_norm() +
                                          logstd_grad.squaredNorm());
      if (total_norm > config.max_grad_norm) {
        const double scale = config.max_grad_norm / (total_norm + 1e-6);
        pi_grads.scale(scale);
        v_grads.scale(scale);
        logstd_grad *= scale;
      }
      adam_step(params.pi_net, pi_grads, optimizer.pi);
      adam_step(params.v_net, v_grads, optimizer.v);
      adam_step(params.log_std, logstd_grad, optimizer.log_std);

      acc.policy_loss += policy_loss;
      acc.value_loss += value_loss;
      acc.entropy += entropy;
      acc.approx_kl += approx_kl;
      acc.clip_fraction += static_cast<double>(clipped) / static_cast<double>(m);
      ++batches;
    }
  }
  acc.policy_loss /= static_cast<double>(batches);
  acc.value_loss /= static_cast<double>(batches);
  acc.entropy /= static_cast<double>(batches);
  acc.approx_kl /= static_cast<double>(batches);
  acc.clip_fraction /= static_cast<double>(batches);
  return acc;
}

TrainResult train(const EnvFactory& factory, const PpoConfig& config,
                  const TrainOptions& options) {
  if (config.n_envs < 1) throw std::invalid_argument("train: n_envs must be >= 1");
  if (config.rollout_length < 1 || config.rollout_length % config.n_envs != 0) {
    throw std::invalid_argument("train: rollout_length must be a positive multiple of n_envs");
  }
  if (config.total_steps < 1) throw std::invalid_argument("train: total_steps must be >= 1");
  if (config.minibatch < 1 || config.n_epochs < 1) {
    throw std::invalid_argument("train: minibatch and n_epochs must be >= 1");
  }
  if (!(config.clip_range > 0.0 && config.clip_range < 1.0)) {
    throw std::invalid_argument("train: clip_range must be in (0, 1)");
  }
  if (!(options.w_full >= 0.0 && options.w_full <= 1.0)) {
    throw std::invalid_argument("train: w_full must be in [0, 1]");
  }

  struct EnvSlot {
    std::unique_ptr<Env> env;
    Vector raw_obs;
    PhaseClock clock;
    double ep_task = 0.0;
    double ep_style = 0.0;
    double ep_len = 0.0;
    bool episode_start = true;
  };

  std::vector<EnvSlot> slots(static_cast<std::size_t>(config.n_envs));
  for (int e = 0; e < config.n_envs; ++e) {
    slots[static_cast<std::size_t>(e)].env =
        factory(split_seed(config.seed, 10 + static_cast<std::uint64_t>(e)));
    if (!slots[static_cast<std::size_t>(e)].env) {
      throw std::invalid_argument("train: env factory returned null");
    }
  }
  const EnvSpec& sp = slots[0].env->spec();
  const int a_full = sp.action_dim;
  const int env_obs_dim = sp.obs_dim;
  const int policy_obs_dim = env_obs_dim + 1;

  const LatentActionPrior* prior = options.prior;
  if (prior && prior->full_dim != a_full) {
    throw std::invalid_argument("train: prior full_dim " + std::to_string(prior->full_dim) +
                                " does not match env action_dim " + std::to_string(a_full));
  }
  const int a_latent = prior ? prior->latent_dim : 0;

  const Demonstration* demo = options.style_demo;
  std::vector<bool> angular_mask;
  int phase_period = 0;
  if (demo) {
    validate_demonstration(*demo);
    if (demo->pose_dim != sp.pose_dim) {
      throw std::invalid_argument("train: demo pose_dim " + std::to_string(demo->pose_dim) +
                                  " does not match env pose_dim " + std::to_string(sp.pose_dim));
    }
    angular_mask = angular_pose_mask(demo->pose_names);
    // The policy only needs the gait clock when the style reward is active;
    // the demo clock still drives style bookkeeping below.
    if (options.weights.w_style > 0.0) phase_period = demo->n_frames;
  }

  PolicyParams params = make_policy(policy_obs_dim, a_latent, a_full, config.hidden,
                                    split_seed(config.seed, 0));
  RunningNorm norm = make_running_norm(env_obs_dim);
  PpoOptimizer optimizer = make_ppo_optimizer(params, config);
  std::mt19937_64 sample_rng(split_seed(config.seed, 1));
  std::mt19937_64 shuffle_rng(split_seed(config.seed, 2));

  for (auto& slot : slots) {
    slot.raw_obs = slot.env->reset();
    slot.clock.n_frames = demo ? demo->n_frames : 1;
    phase_reset(slot.clock);
  }

  const int steps_per_env = config.rollout_length / config.n_envs;
  const long n_updates =
      (config.total_steps + config.rollout_length - 1) / config.rollout_length;

  std::vector<RolloutBuffer> buffers;
  buffers.reserve(static_cast<std::size_t>(config.n_envs));
  for (int e = 0; e < config.n_envs; ++e) {
    buffers.push_back(make_rollout_buffer(steps_per_env, policy_obs_dim,
                                          params.head_dim()));
  }

  auto phase_channel = [&](const EnvSlot& slot) {
    return phase_period > 0
               ? static_cast<double>(phase_value(slot.clock)) / phase_period
               : 0.0;
  };

  EpisodeWindow window;
  TrainResult result;
  long global_step = 0;
  const auto t0 = std::chrono::steady_clock::now();

  for (long update = 1; update <= n_updates; ++update) {
    double sum_abs_decoded = 0.0;
    double sum_abs_residual = 0.0;
    long contrib_count = 0;

    for (auto& b : buffers) {
      b.size = 0;
      b.final_episode_start = 0;
    }

    for (int step = 0; step < steps_per_env; ++step) {
      for (int e = 0; e < config.n_envs; ++e) {
        EnvSlot& slot = slots[static_cast<std::size_t>(e)];
        RolloutBuffer& buffer = buffers[static_cast<std::size_t>(e)];

        update_running_norm(norm, slot.raw_obs.transpose());
        const double phase = phase_channel(slot);
        const Vector policy_obs = assemble_policy_obs(norm, slot.raw_obs, phase);
        const ActResult ar = act(params, policy_obs, false, sample_rng);

        auto [latent, residual] = split_action_head(ar.head, a_latent, a_full);
        Vector decoded;
        Vector applied;
        if (prior) {
          decoded = decode(*prior, latent);
          applied = compose_action(decoded, residual, options.w_full);
          sum_abs_decoded += (1.0 - options.w_full) * decoded.cwiseAbs().sum();
          sum_abs_residual += options.w_full * residual.cwiseAbs().sum();
        } else {
          applied = residual.cwiseMax(-1.0).cwiseMin(1.0);
          sum_abs_residual += applied.cwiseAbs().sum();
        }
        contrib_count += a_full;

        const Transition tr = slot.env->step(applied);
        double style = 0.0;
        if (demo && tr.pose.allFinite()) {
          style = style_reward(tr.pose, expert_pose_at(*demo, phase_value(slot.clock)),
                               angular_mask);
        }
        if (demo) phase_tick(slot.clock);
        const double task = std::isfinite(tr.task_reward) ? tr.task_reward : 0.0;
        double reward = mix_rewards(task, style, options.weights);

        const bool done = tr.terminated || tr.truncated;
        if (tr.truncated && !tr.terminated && tr.observation.allFinite()) {
          const Vector next_obs =
              assemble_policy_obs(norm, tr.observation, phase_channel(slot));
          reward += config.gamma * value_of(params, next_obs);
        }

        const int i = buffer.size;
        buffer.observations.row(i) = policy_obs.transpose();
        buffer.actions.row(i) = ar.head.transpose();
        buffer.log_probs[i] = ar.log_prob;
        buffer.values[i] = ar.value;
        buffer.rewards[i] = reward;
        buffer.episode_starts[static_cast<std::size_t>(i)] = slot.episode_start ? 1 : 0;
        buffer.size = i + 1;
        slot.episode_start = false;

        slot.ep_task += task;
        slot.ep_style += style;
        slot.ep_len += 1.0;
        ++global_step;

        if (options.observer) {
          StepRecord rec;
          rec.env_step = global_step;
          rec.env_index = e;
          rec.head = ar.head;
          rec.latent_clipped = latent;
          rec.decoded = decoded;
          rec.residual = residual;
          rec.applied = applied;
          rec.phase = phase;
          rec.task_reward = task;
          rec.style_reward = style;
          rec.mixed_reward = reward;
          rec.terminated = tr.terminated;
          rec.truncated = tr.truncated;
          options.observer(rec);
        }

        if (done || !tr.observation.allFinite()) {
          window.push(slot.ep_task, slot.ep_style, slot.ep_len);
          slot.ep_task = 0.0;
          slot.ep_style = 0.0;
          slot.ep_len = 0.0;
          slot.raw_obs = slot.env->reset();
          phase_reset(slot.clock);
          slot.episode_start = true;
        } else {
          slot.raw_obs = tr.observation;
        }
      }
    }

    for (int e = 0; e < config.n_envs; ++e) {
      EnvSlot& slot = slots[static_cast<std::size_t>(e)];
      RolloutBuffer& buffer = buffers[static_cast<std::size_t>(e)];
      buffer.final_episode_start = slot.episode_start ? 1 : 0;
      const Vector last_obs = assemble_policy_obs(norm, slot.raw_obs, phase_channel(slot));
      compute_gae(buffer, value_of(params, last_obs), config.gamma, config.gae_lambda);
    }
    const UpdateStats stats =
        config.n_envs == 1
            ? ppo_update(params, buffers[0], config, optimizer, shuffle_rng)
            : ppo_update(params, merge_rollouts(buffers), config, optimizer, shuffle_rng);

    UpdateLog row;
    row.update = static_cast<int>(update);
    row.env_steps = update * config.rollout_length;
    row.mean_task_return = window.mean_task();
    row.mean_style_return = window.mean_style();
    row.ep_len_mean = window.mean_len();
    row.mean_abs_decoded =
        contrib_count > 0 ? sum_abs_decoded / static_cast<double>(contrib_count) : 0.0;
    row.mean_abs_residual =
        contrib_count > 0 ? sum_abs_residual / static_cast<double>(contrib_count) : 0.0;
    row.policy_loss = stats.policy_loss;
    row.value_loss = stats.value_loss;
    row.entropy = stats.entropy;
    row.approx_kl = stats.approx_kl;
    row.clip_fraction = stats.clip_fraction;
    if (options.timing) {
      row.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    result.logs.push_back(row);
    if (options.on_update) options.on_update(row);
  }

  result.params = std::move(params);
  result.norm = std::move(norm);
  result.phase_period = phase_period;
  return result;
}

EvalResult evaluate_policy(Env& env, const PolicyParams& params, const RunningNorm& norm,
                           int phase_period, const LatentActionPrior* prior,
                           const Demonstration* style_demo, double w_full, int episodes,
                           bool deterministic, std::uint64_t seed) {
  if (episodes < 1) throw std::invalid_argument("evaluate_policy: episodes must be >= 1");
  const int a_latent = prior ? prior->latent_dim : 0;
  const int a_full = env.spec().action_dim;
  if (params.head_dim() != a_latent + a_full) {
    throw std::invalid_argument("evaluate_policy: policy head does not match prior/env dims");
  }
  if (style_demo && phase_period > 0 && style_demo->n_frames != phase_period) {
    throw std::invalid_argument("evaluate_policy: demo frames do not match phase period");
  }
  std::vector<bool> angular_mask;
  if (style_demo) angular_mask = angular_pose_mask(style_demo->pose_names);

  std::mt19937_64 rng(split_seed(seed, 999));
  Vector returns_task(episodes);
  double style_total = 0.0;
  double len_total = 0.0;
  for (int ep = 0; ep < episodes; ++ep) {
    Vector raw_obs = env.reset(split_seed(seed, static_cast<std::uint64_t>(ep)));
    PhaseClock clock;
    clock.n_frames = style_demo ? style_demo->n_frames : std::max(phase_period, 1);
    double ep_task = 0.0;
    double ep_style = 0.0;
    long ep_len = 0;
    while (true) {
      const double phase =
          phase_period > 0 ? static_cast<double>(phase_value(clock)) / phase_period : 0.0;
      const Vector policy_obs = assemble_policy_obs(norm, raw_obs, phase);
      const ActResult ar = act(params, policy_obs, deterministic, rng);
      auto [latent, residual] = split_action_head(ar.head, a_latent, a_full);
      Vector applied;
      if (prior) {
        applied = compose_action(decode(*prior, latent), residual, w_full);
      } else {
        applied = residual.cwiseMax(-1.0).cwiseMin(1.0);
      }
      const Transition tr = env.step(applied);
      if (style_demo && tr.pose.allFinite()) {
        ep_style += style_reward(tr.pose, expert_pose_at(*style_demo, phase_value(clock)),
                                 angular_mask);
      }
      if (style_demo || phase_period > 0) phase_tick(clock);
      if (std::isfinite(tr.task_reward)) ep_task += tr.task_reward;
      ++ep_len;
      if (tr.terminated || tr.truncated || !tr.observation.allFinite()) break;
      raw_obs = tr.observation;
    }
    returns_task[ep] = ep_task;
    style_total += ep_style;
    len_total += static_cast<double>(ep_len);
  }

  EvalResult out;
  out.episodes = episodes;
  out.mean_task_return = returns_task.mean();
  out.std_task_return = std::sqrt(
      (returns_task.array() - out.mean_task_return).square().sum() / episodes);
  out.mean_style_return = style_total / episodes;
  out.mean_episode_length = len_total / episodes;
  return out;
}

}  // namespace gaitprior
