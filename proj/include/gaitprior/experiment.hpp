#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gaitprior/checkpoint.hpp"
#include "gaitprior/envs.hpp"
#include "gaitprior/ppo.hpp"
#include "gaitprior/synergy.hpp"

namespace gaitprior {

/// Effective settings for one training experiment. Loaded from a flat
/// key = value file, then overridden by CLI flags; the resolved form is
/// echoed into the output directory.
struct ExperimentConfig {
  std::string env_id = "point_gait";
  EnvVariant variant;
  std::string mode = "ppo";  // ppo | ppo_style | ppo_latent | ppo_latent_style
  std::string demo_path;
  std::string prior_path;  // empty: latent modes train the prior inline
  double w_full = 0.1;
  int latent_dim = 0;  // 0: suggest_latent_dim(action_dim)
  std::optional<double> w_task;   // override the mode preset
  std::optional<double> w_style;  // override the mode preset
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  PpoConfig ppo;  // ppo.seed is ignored; each run takes its seed from `seeds`
  int prior_epochs = 10000;
  double prior_lr = 1e-3;
  std::uint64_t prior_seed = 0;
  int eval_episodes = 10;
  bool timing = false;
  std::string out_dir = "run";
};

bool mode_uses_demo(const std::string& mode);
bool mode_uses_prior(const std::string& mode);

/// Mode presets (ppo and ppo_latent are task-only, the style modes mix
/// 0.67/0.33) with explicit w_task/w_style overrides applied on top.
RewardWeights effective_weights(const ExperimentConfig& config);

/// Throws ConfigError on any out-of-range field or unusable mode combination.
void validate_experiment_config(const ExperimentConfig& config);

/// Sets one key = value pair; throws ConfigError on unknown keys or
/// unparseable values.
void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value);

/// Flat key = value text, one pair per line, '#' starts a comment.
ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::string& origin);
ExperimentConfig load_experiment_config(const std::string& path);

/// Canonical key = value dump of every field; parsing it back reproduces the
/// config exactly.
std::string config_echo(const ExperimentConfig& config);

/// Relative output paths resolve under $GAITPRIOR_OUT when it is set.
std::string resolve_out_path(const std::string& path);

struct SeedStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double median = 0.0;
  double iqr = 0.0;
};

SeedStats summarize(const std::vector<double>& values);

struct SeedOutcome {
  std::uint64_t seed = 0;
  EvalResult eval;
  std::string log_path;
  std::string checkpoint_path;
};

struct TrainRunResult {
  std::string out_dir;
  std::vector<SeedOutcome> seeds;
  SeedStats task_return;  // across the per-seed deterministic eval means
  bool prior_trained = false;
  PriorTrainReport prior_report;
};

/// Full experiment: per-seed training, CSV logs, policy checkpoints, final
/// deterministic evals, summary stats, and a learning-curve SVG, all under
/// the config's output directory.
TrainRunResult run_train(const ExperimentConfig& config,
                         const std::function<void(const SeedOutcome&)>& on_seed = {});

struct AnalyzeResult {
  PcaResult pca;
  int suggested_latent_dim = 0;
  std::string csv_path;
};

AnalyzeResult run_analyze(const std::string& demo_path, const std::string& out_dir);

LatentActionPrior run_train_prior(const std::string& demo_path, int latent_dim,
                                  const PriorTrainConfig& config,
                                  const std::string& out_path,
                                  PriorTrainReport* report = nullptr);

Demonstration run_gen_demo(const std::string& env_id,
                           const std::string& oscillator_path, int settle_cycles,
                           const std::string& out_path);

/// demo_path may be empty; without it the style column reports 0.
EvalResult run_eval(const std::string& checkpoint_path, int episodes,
                    bool deterministic, std::uint64_t seed,
                    const std::string& demo_path, const std::string& out_csv);

struct SweepResult {
  std::string out_dir;
  std::vector<double> values;  // ascending
  std::vector<SeedStats> stats;
};

/// param is "w_full" or "latent_dim"; each value trains a full multi-seed
/// experiment in its own subdirectory plus a comparison CSV and bar chart.
SweepResult run_sweep(const ExperimentConfig& base, const std::string& param,
                      const std::vector<double>& values,
                      const std::function<void(const SeedOutcome&)>& on_seed = {});

}  // namespace gaitprior
