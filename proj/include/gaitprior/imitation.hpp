#pragma once

#include <string>
#include <vector>

#include "gaitprior/demo.hpp"

namespace gaitprior {

/// Step counter over one demonstrated gait cycle. value() indexes the cycle
/// frame matching the current simulation step, keeping the style reward
/// Markovian in (observation, phase).
struct PhaseClock {
  int n_frames = 1;
  long t = 0;
};

void phase_reset(PhaseClock& clock);
void phase_tick(PhaseClock& clock);
int phase_value(const PhaseClock& clock);

struct RewardWeights {
  double w_task = 0.67;
  double w_style = 0.33;
};

/// frames[phase].q; throws on phase outside [0, n_frames).
const Vector& expert_pose_at(const Demonstration& demo, int phase);

/// Marks channels holding raw angles (name "pitch" or ending in "angle") so
/// their differences can be wrapped before squaring.
std::vector<bool> angular_pose_mask(const std::vector<std::string>& pose_names);

/// exp(-||q_exp - q||^2). Angular channels in the mask contribute their
/// wrapped difference in (-pi, pi].
double style_reward(const Vector& pose, const Vector& expert_pose,
                    const std::vector<bool>& angular_mask);
double style_reward(const Vector& pose, const Vector& expert_pose);

double mix_rewards(double r_task, double r_style, const RewardWeights& weights);

}  // namespace gaitprior
