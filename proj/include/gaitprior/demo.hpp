#pragma once

#include <string>
#include <vector>

#include "gaitprior/nn.hpp"

namespace gaitprior {

struct DemoFrame {
  Vector a;  // applied action, length action_dim
  Vector q;  // pose features, length pose_dim, no world translation
};

/// One gait cycle of expert state-action frames plus metadata. The frame
/// count doubles as the phase clock period during style training.
struct Demonstration {
  std::string env_id;
  double dt = 0.0;
  int n_frames = 0;
  int action_dim = 0;
  int pose_dim = 0;
  std::vector<std::string> pose_names;
  std::vector<DemoFrame> frames;
};

/// Throws ConfigError describing the first violated constraint, including the
/// frame index for per-frame problems.
void validate_demonstration(const Demonstration& demo);

Demonstration load_demonstration(const std::string& path);

/// Writes a file that loads back bit-exactly.
void save_demonstration(const Demonstration& demo, const std::string& path);

/// Row t holds frames[t].a. Shape n_frames x action_dim.
Matrix actions_matrix(const Demonstration& demo);

bool demonstrations_equal(const Demonstration& a, const Demonstration& b);

/// Stable identity string (env id plus a content hash of the action frames),
/// stored in prior checkpoints to tie them back to their demonstration.
std::string demonstration_id(const Demonstration& demo);

}  // namespace gaitprior
