#pragma once

#include <string>

#include "gaitprior/envs.hpp"
#include "gaitprior/imitation.hpp"
#include "gaitprior/latent_prior.hpp"
#include "gaitprior/ppo.hpp"

namespace gaitprior {

/// Everything needed to replay a trained policy: parameters, frozen
/// normalization stats, phase period, the attached prior, and the effective
/// experiment settings it was trained under.
struct PolicyCheckpoint {
  PolicyParams params;
  RunningNorm norm;
  int phase_period = 0;
  std::string env_id;
  EnvVariant variant;
  std::string mode;
  double w_full = 0.1;
  RewardWeights weights;
  bool has_prior = false;
  LatentActionPrior prior;
  std::string config_echo;
  std::string source_demo_id;
};

/// JSON files with a magic string and format_version; loading rejects
/// mismatches with an explicit error. Round-trips are bit-exact.
void save_prior_checkpoint(const LatentActionPrior& prior, const std::string& path);
LatentActionPrior load_prior_checkpoint(const std::string& path);

void save_policy_checkpoint(const PolicyCheckpoint& checkpoint, const std::string& path);
PolicyCheckpoint load_policy_checkpoint(const std::string& path);

}  // namespace gaitprior
