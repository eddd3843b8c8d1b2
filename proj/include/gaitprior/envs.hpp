#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gaitprior/demo.hpp"

namespace gaitprior {

struct EnvSpec {
  std::string id;
  int obs_dim = 0;
  int action_dim = 0;  // action bounds are [-1, 1]^action_dim everywhere
  double dt = 0.0;
  int max_episode_steps = 0;
  int pose_dim = 0;
  std::vector<std::string> pose_names;
};

/// Transfer-task selector: higher speed_multiplier retargets the reward to a
/// multiple of the demonstrated speed; any_direction resamples a target
/// heading each episode (point_gait_2d only).
struct EnvVariant {
  int speed_multiplier = 1;
  bool any_direction = false;
};

struct Transition {
  Vector observation;
  double task_reward = 0.0;
  Vector pose;
  bool terminated = false;
  bool truncated = false;
};

class Env {
 public:
  virtual ~Env() = default;
  virtual const EnvSpec& spec() const = 0;
  /// Reseeds the episode stream, then starts a fresh episode.
  virtual Vector reset(std::uint64_t seed) = 0;
  /// Starts a fresh episode continuing the current stream.
  virtual Vector reset() = 0;
  virtual Transition step(const Vector& action) = 0;
  virtual Vector pose() const = 0;
};

std::vector<std::string> available_envs();

/// Throws ConfigError on unknown ids (listing the known ones) or variants
/// invalid for the id.
std::unique_ptr<Env> make_env(const std::string& id, const EnvVariant& variant = {},
                              std::uint64_t seed = 0);

/// Per-actuator sinusoid a_i(t) = b_i + A_i * sin(2 pi f t + psi_i), the
/// open-loop expert controller.
struct OscillatorConfig {
  double frequency = 1.0;  // Hz, shared across actuators
  std::vector<double> amplitude;
  std::vector<double> phase;
  std::vector<double> offset;
};

/// |A_i| + |b_i| <= 1 and f > 0; throws ConfigError otherwise.
void validate_oscillator(const OscillatorConfig& config);

Vector oscillator_action(const OscillatorConfig& config, double t);

/// Hand-tuned expert shipped with the repo for each environment id.
OscillatorConfig default_oscillator_config(const std::string& env_id);

OscillatorConfig load_oscillator_config(const std::string& path);
void save_oscillator_config(const OscillatorConfig& config, const std::string& path);

/// Rolls the oscillator open loop, discards settle_cycles warm-up cycles,
/// then records capture_cycles cycles of (action, pose) frames. The
/// oscillator period must be an integer multiple of the env dt.
Demonstration generate_demonstration(Env& env, const OscillatorConfig& config,
                                     int settle_cycles = 8, int capture_cycles = 1);

/// Mean speed over one captured cycle of the default expert, used as the
/// reference speed for tracking-reward variants. Computed once per env id.
double reference_speed(const std::string& env_id);

}  // namespace gaitprior
