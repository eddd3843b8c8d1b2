#include "gaitprior/imitation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gaitprior {

namespace {

double wrap_angle(double x) {
  const double two_pi = 6.283185307179586476925286766559;
  x = std::fmod(x, two_pi);
  if (x > 3.141592653589793238462643383280) x -= two_pi;
  if (x <= -3.141592653589793238462643383280) x += two_pi;
  return x;
}

}  // namespace

void phase_reset(PhaseClock& clock) { clock.t = 0; }

void phase_tick(PhaseClock& clock) { ++clock.t; }

int phase_value(const PhaseClock& clock) {
  if (clock.n_frames < 1) throw std::invalid_argument("phase_value: n_frames must be >= 1");
  return static_cast<int>(clock.t % clock.n_frames);
}

const Vector& expert_pose_at(const Demonstration& demo, int phase) {
  if (phase < 0 || phase >= demo.n_frames) {
    throw std::out_of_range("expert_pose_at: phase " + std::to_string(phase) +
                            " outside [0, " + std::to_string(demo.n_frames) + ")");
  }
  return demo.frames[static_cast<std::size_t>(phase)].q;
}

std::vector<bool> angular_pose_mask(const std::vector<std::string>& pose_names) {
  std::vector<bool> mask(pose_names.size(), false);
  for (std::size_t i = 0; i < pose_names.size(); ++i) {
    const std::string& name = pose_names[i];
    const bool ends_with_angle =
        name.size() >= 5 && name.compare(name.size() - 5, 5, "angle") == 0;
    mask[i] = (name == "pitch") || ends_with_angle;
  }
  return mask;
}

double style_reward(const Vector& pose, const Vector& expert_pose,
                    const std::vector<bool>& angular_mask) {
  if (pose.size() != expert_pose.size()) {
    throw std::invalid_argument("style_reward: pose length mismatch");
  }
  if (!angular_mask.empty() &&
      angular_mask.size() != static_cast<std::size_t>(pose.size())) {
    throw std::invalid_argument("style_reward: mask length mismatch");
  }
  double squared = 0.0;
  for (Eigen::Index j = 0; j < pose.size(); ++j) {
    double diff = expert_pose[j] - pose[j];
    if (!angular_mask.empty() && angular_mask[static_cast<std::size_t>(j)]) {
      diff = wrap_angle(diff);
    }
    squared += diff * diff;
  }
  return std::exp(-squared);
}

double style_reward(const Vector& pose, const Vector& expert_pose) {
  return style_reward(pose, expert_pose, {});
}

double mix_rewards(double r_task, double r_style, const RewardWeights& weights) {
  return weights.w_task * r_task + weights.w_style * r_style;
}

}  // namespace gaitprior
