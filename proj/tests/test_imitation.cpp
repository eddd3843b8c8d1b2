#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gaitprior/imitation.hpp"

using namespace gaitprior;

namespace {

Demonstration five_frame_demo() {
  Demonstration demo;
  demo.env_id = "point_gait";
  demo.dt = 0.02;
  demo.n_frames = 5;
  demo.action_dim = 1;
  demo.pose_dim = 2;
  demo.pose_names = {"pitch", "velocity"};
  for (int t = 0; t < 5; ++t) {
    DemoFrame frame;
    frame.a = Vector::Zero(1);
    frame.q = Vector(2);
    frame.q << 0.1 * t, 1.0 - 0.1 * t;
    demo.frames.push_back(frame);
  }
  return demo;
}

}  // namespace

//phase clock

TEST_CASE("the phase clock wraps modulo the cycle length") {
  PhaseClock clock;
  clock.n_frames = 5;
  phase_reset(clock);
  CHECK(phase_value(clock) == 0);
  for (int i = 0; i < 7; ++i) phase_tick(clock);
  CHECK(phase_value(clock) == 2);
  for (int i = 0; i < 5; ++i) phase_tick(clock);
  CHECK(phase_value(clock) == 2);
  phase_reset(clock);
  CHECK(phase_value(clock) == 0);
}

TEST_CASE("a single-frame clock is always at phase zero") {
  PhaseClock clock;
  clock.n_frames = 1;
  phase_reset(clock);
  for (int i = 0; i < 9; ++i) {
    CHECK(phase_value(clock) == 0);
    phase_tick(clock);
  }
}

TEST_CASE("an empty clock is rejected") {
  PhaseClock clock;
  clock.n_frames = 0;
  CHECK_THROWS_AS(phase_value(clock), std::invalid_argument);
}

//expert pose lookup

TEST_CASE("expert_pose_at indexes the demo frames") {
  Demonstration demo = five_frame_demo();
  CHECK(expert_pose_at(demo, 0)(0) == doctest::Approx(0.0));
  CHECK(expert_pose_at(demo, 4)(0) == doctest::Approx(0.4));
  CHECK(expert_pose_at(demo, 4)(1) == doctest::Approx(0.6));
  CHECK_THROWS_AS(expert_pose_at(demo, 5), std::out_of_range);
  CHECK_THROWS_AS(expert_pose_at(demo, -1), std::out_of_range);
}

TEST_CASE("a ticking clock visits every frame in order") {
  Demonstration demo = five_frame_demo();
  PhaseClock clock;
  clock.n_frames = demo.n_frames;
  phase_reset(clock);
  for (int t = 0; t < 10; ++t) {
    const Vector& pose = expert_pose_at(demo, phase_value(clock));
    CHECK(pose(0) == doctest::Approx(0.1 * (t % 5)));
    phase_tick(clock);
  }
}

//angular masks

TEST_CASE("angular channels are picked out by name") {
  std::vector<bool> mask = angular_pose_mask(
      {"pitch", "leg0_angle", "height", "velocity", "hip_angle", "angle_rate"});
  CHECK(mask == std::vector<bool>{true, true, false, false, true, false});
}

//style reward

TEST_CASE("matching the expert pose scores exactly one") {
  Vector pose(3);
  pose << 0.2, -0.4, 1.0;
  CHECK(style_reward(pose, pose) == 1.0);
}

TEST_CASE("unit squared distance scores exp(-1)") {
  Vector pose(2), expert(2);
  pose << 1.0, 0.0;
  expert << 0.0, 0.0;
  CHECK(style_reward(pose, expert) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  pose << 0.6, 0.8;
  CHECK(style_reward(pose, expert) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("the reward strictly decreases as poses drift apart") {
  Vector expert(2);
  expert << 0.1, -0.3;
  double previous = 1.1;
  for (double d = 0.0; d < 2.0; d += 0.25) {
    Vector pose = expert;
    pose(0) += d;
    double r = style_reward(pose, expert);
    CHECK(r < previous);
    CHECK(r > 0.0);
    previous = r;
  }
}

TEST_CASE("angular channels compare through the shortest arc") {
  double pi = std::acos(-1.0);
  std::vector<bool> mask = {true};
  Vector pose(1), expert(1);
  pose << pi - 0.05;
  expert << -pi + 0.05;
  double wrapped = style_reward(pose, expert, mask);
  CHECK(wrapped == doctest::Approx(std::exp(-0.01)).epsilon(1e-9));
  double unwrapped = style_reward(pose, expert);
  CHECK(unwrapped < 1e-6);

  pose << 4.0 * pi + 0.2;
  expert << 0.2;
  CHECK(style_reward(pose, expert, mask) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("style reward validates lengths") {
  Vector pose(2), expert(3);
  pose.setZero();
  expert.setZero();
  CHECK_THROWS_AS(style_reward(pose, expert), std::invalid_argument);
  Vector expert2 = Vector::Zero(2);
  CHECK_THROWS_AS(style_reward(pose, expert2, {true}), std::invalid_argument);
}

//reward mixing

TEST_CASE("mix_rewards applies the default 0.67/0.33 blend") {
  RewardWeights weights;
  CHECK(mix_rewards(1.0, 1.0, weights) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mix_rewards(1.0, 0.0, weights) == doctest::Approx(0.67).epsilon(1e-12));
  CHECK(mix_rewards(0.0, 1.0, weights) == doctest::Approx(0.33).epsilon(1e-12));
}

TEST_CASE("custom weights scale each term linearly") {
  RewardWeights weights;
  weights.w_task = 1.0;
  weights.w_style = 0.0;
  CHECK(mix_rewards(2.5, 77.0, weights) == doctest::Approx(2.5).epsilon(1e-12));
  weights.w_task = 0.25;
  weights.w_style = 0.5;
  CHECK(mix_rewards(2.0, -1.0, weights) == doctest::Approx(0.0).epsilon(1e-12));
}
