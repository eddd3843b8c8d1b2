#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gaitprior/checkpoint.hpp"
#include "gaitprior/demo.hpp"
#include "gaitprior/envs.hpp"
#include "gaitprior/errors.hpp"
#include "gaitprior/experiment.hpp"
#include "gaitprior/imitation.hpp"
#include "gaitprior/latent_prior.hpp"
#include "gaitprior/ppo.hpp"
#include "gaitprior/report.hpp"
#include "gaitprior/synergy.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace gaitprior;

namespace {

std::function<void(const SeedOutcome&)> seed_callback(const py::object& on_seed) {
  if (on_seed.is_none()) return {};
  return [on_seed](const SeedOutcome& outcome) { on_seed(outcome); };
}

}  // namespace

PYBIND11_MODULE(_gaitprior, m) {
  m.doc() =
      "Latent action priors and phase-clocked style rewards for small "
      "locomotion environments";
  m.attr("__version__") = "0.1.0";
  m.attr("TRAINING_LOG_HEADER") = kTrainingLogHeader;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  //demonstrations
  py::class_<DemoFrame>(m, "DemoFrame")
      .def(py::init<>())
      .def_readwrite("a", &DemoFrame::a)
      .def_readwrite("q", &DemoFrame::q);

  py::class_<Demonstration>(m, "Demonstration")
      .def(py::init<>())
      .def_readwrite("env_id", &Demonstration::env_id)
      .def_readwrite("dt", &Demonstration::dt)
      .def_readwrite("n_frames", &Demonstration::n_frames)
      .def_readwrite("action_dim", &Demonstration::action_dim)
      .def_readwrite("pose_dim", &Demonstration::pose_dim)
      .def_readwrite("pose_names", &Demonstration::pose_names)
      .def_readwrite("frames", &Demonstration::frames);

  m.def("validate_demonstration", &validate_demonstration, "demo"_a);
  m.def("load_demonstration", &load_demonstration, "path"_a);
  m.def("save_demonstration", &save_demonstration, "demo"_a, "path"_a);
  m.def("actions_matrix", &actions_matrix, "demo"_a);
  m.def("demonstrations_equal", &demonstrations_equal, "a"_a, "b"_a);
  m.def("demonstration_id", &demonstration_id, "demo"_a);

  //environments
  py::class_<EnvSpec>(m, "EnvSpec")
      .def_readonly("id", &EnvSpec::id)
      .def_readonly("obs_dim", &EnvSpec::obs_dim)
      .def_readonly("action_dim", &EnvSpec::action_dim)
      .def_readonly("dt", &EnvSpec::dt)
      .def_readonly("max_episode_steps", &EnvSpec::max_episode_steps)
      .def_readonly("pose_dim", &EnvSpec::pose_dim)
      .def_readonly("pose_names", &EnvSpec::pose_names);

  py::class_<EnvVariant>(m, "EnvVariant")
      .def(py::init<>())
      .def(py::init([](int speed_multiplier, bool any_direction) {
             return EnvVariant{speed_multiplier, any_direction};
           }),
           "speed_multiplier"_a = 1, "any_direction"_a = false)
      .def_readwrite("speed_multiplier", &EnvVariant::speed_multiplier)
      .def_readwrite("any_direction", &EnvVariant::any_direction);

  py::class_<Transition>(m, "Transition")
      .def_readonly("observation", &Transition::observation)
      .def_readonly("task_reward", &Transition::task_reward)
      .def_readonly("pose", &Transition::pose)
      .def_readonly("terminated", &Transition::terminated)
      .def_readonly("truncated", &Transition::truncated);

  py::class_<Env>(m, "Env")
      .def("spec", &Env::spec)
      .def("reset", py::overload_cast<>(&Env::reset))
      .def("reset", py::overload_cast<std::uint64_t>(&Env::reset), "seed"_a)
      .def("step", &Env::step, "action"_a)
      .def("pose", &Env::pose);

  m.def("available_envs", &available_envs);
  m.def("make_env", &make_env, "id"_a, "variant"_a = EnvVariant{}, "seed"_a = 0);

  py::class_<OscillatorConfig>(m, "OscillatorConfig")
      .def(py::init<>())
      .def_readwrite("frequency", &OscillatorConfig::frequency)
      .def_readwrite("amplitude", &OscillatorConfig::amplitude)
      .def_readwrite("phase", &OscillatorConfig::phase)
      .def_readwrite("offset", &OscillatorConfig::offset);

  m.def("validate_oscillator", &validate_oscillator, "config"_a);
  m.def("oscillator_action", &oscillator_action, "config"_a, "t"_a);
  m.def("default_oscillator_config", &default_oscillator_config, "env_id"_a);
  m.def("load_oscillator_config", &load_oscillator_config, "path"_a);
  m.def("save_oscillator_config", &save_oscillator_config, "config"_a, "path"_a);
  m.def("generate_demonstration", &generate_demonstration, "env"_a, "config"_a,
        "settle_cycles"_a = 8, "capture_cycles"_a = 1);
  m.def("reference_speed", &reference_speed, "env_id"_a);

  //motion synergies
  py::class_<PcaResult>(m, "PcaResult")
      .def_readonly("explained_variance_ratio", &PcaResult::explained_variance_ratio)
      .def_readonly("components", &PcaResult::components)
      .def_readonly("mean", &PcaResult::mean);

  m.def("compute_pca", &compute_pca, "actions"_a);
  m.def("suggest_latent_dim", &suggest_latent_dim, "a_full"_a);
  m.def("dims_for_variance", &dims_for_variance, "pca"_a, "threshold"_a);

  //latent action prior
  py::class_<PriorTrainConfig>(m, "PriorTrainConfig")
      .def(py::init<>())
      .def_readwrite("epochs", &PriorTrainConfig::epochs)
      .def_readwrite("lr", &PriorTrainConfig::lr)
      .def_readwrite("early_stop_loss", &PriorTrainConfig::early_stop_loss)
      .def_readwrite("seed", &PriorTrainConfig::seed);

  py::class_<PriorTrainReport>(m, "PriorTrainReport")
      .def_readonly("epochs_run", &PriorTrainReport::epochs_run)
      .def_readonly("initial_loss", &PriorTrainReport::initial_loss)
      .def_readonly("final_loss", &PriorTrainReport::final_loss)
      .def_readonly("rmse", &PriorTrainReport::rmse);

  py::class_<LatentActionPrior>(m, "LatentActionPrior")
      .def_readonly("latent_dim", &LatentActionPrior::latent_dim)
      .def_readonly("full_dim", &LatentActionPrior::full_dim)
      .def_readwrite("full_action_weight", &LatentActionPrior::full_action_weight)
      .def_readonly("source_demo_id", &LatentActionPrior::source_demo_id)
      .def_readonly("final_loss", &LatentActionPrior::final_loss);

  m.def("norm_loss", &norm_loss, "latent"_a);
  m.def("reconstruction_loss", &reconstruction_loss, "a"_a, "a_hat"_a, "latent"_a);
  m.def(
      "train_autoencoder",
      [](const Demonstration& demo, int latent_dim, const PriorTrainConfig& config) {
        PriorTrainReport report;
        LatentActionPrior prior = train_autoencoder(demo, latent_dim, config, &report);
        return std::make_pair(std::move(prior), report);
      },
      "demo"_a, "latent_dim"_a, "config"_a = PriorTrainConfig{});
  m.def(
      "train_autoencoder",
      [](const Matrix& actions, int latent_dim, const PriorTrainConfig& config) {
        PriorTrainReport report;
        LatentActionPrior prior = train_autoencoder(actions, latent_dim, config, &report);
        return std::make_pair(std::move(prior), report);
      },
      "actions"_a, "latent_dim"_a, "config"_a = PriorTrainConfig{});
  m.def("encode", &encode, "prior"_a, "a"_a);
  m.def("decode", &decode, "prior"_a, "latent"_a);
  m.def("encode_batch", &encode_batch, "prior"_a, "actions"_a);
  m.def("decode_batch", &decode_batch, "prior"_a, "latents"_a);
  m.def("compose_action", &compose_action, "decoded"_a, "residual"_a, "w_full"_a);
  m.def("save_prior_checkpoint", &save_prior_checkpoint, "prior"_a, "path"_a);
  m.def("load_prior_checkpoint", &load_prior_checkpoint, "path"_a);

  //style reward
  py::class_<RewardWeights>(m, "RewardWeights")
      .def(py::init<>())
      .def(py::init([](double w_task, double w_style) {
             return RewardWeights{w_task, w_style};
           }),
           "w_task"_a, "w_style"_a)
      .def_readwrite("w_task", &RewardWeights::w_task)
      .def_readwrite("w_style", &RewardWeights::w_style);

  m.def("angular_pose_mask", &angular_pose_mask, "pose_names"_a);
  m.def("expert_pose_at", &expert_pose_at, "demo"_a, "phase"_a);
  m.def("style_reward",
        py::overload_cast<const Vector&, const Vector&, const std::vector<bool>&>(
            &style_reward),
        "pose"_a, "expert_pose"_a, "angular_mask"_a);
  m.def("style_reward",
        py::overload_cast<const Vector&, const Vector&>(&style_reward), "pose"_a,
        "expert_pose"_a);
  m.def("mix_rewards", &mix_rewards, "r_task"_a, "r_style"_a, "weights"_a);

  //ppo settings and evaluation results
  py::class_<PpoConfig>(m, "PpoConfig")
      .def(py::init<>())
      .def_readwrite("lr", &PpoConfig::lr)
      .def_readwrite("gamma", &PpoConfig::gamma)
      .def_readwrite("gae_lambda", &PpoConfig::gae_lambda)
      .def_readwrite("clip_range", &PpoConfig::clip_range)
      .def_readwrite("n_epochs", &PpoConfig::n_epochs)
      .def_readwrite("minibatch", &PpoConfig::minibatch)
      .def_readwrite("vf_coef", &PpoConfig::vf_coef)
      .def_readwrite("ent_coef", &PpoConfig::ent_coef)
      .def_readwrite("max_grad_norm", &PpoConfig::max_grad_norm)
      .def_readwrite("rollout_length", &PpoConfig::rollout_length)
      .def_readwrite("total_steps", &PpoConfig::total_steps)
      .def_readwrite("seed", &PpoConfig::seed)
      .def_readwrite("n_envs", &PpoConfig::n_envs)
      .def_readwrite("hidden", &PpoConfig::hidden);

  py::class_<EvalResult>(m, "EvalResult")
      .def_readonly("mean_task_return", &EvalResult::mean_task_return)
      .def_readonly("std_task_return", &EvalResult::std_task_return)
      .def_readonly("mean_style_return", &EvalResult::mean_style_return)
      .def_readonly("mean_episode_length", &EvalResult::mean_episode_length)
      .def_readonly("episodes", &EvalResult::episodes);

  py::class_<PolicyCheckpoint>(m, "PolicyCheckpoint")
      .def_readonly("phase_period", &PolicyCheckpoint::phase_period)
      .def_readonly("env_id", &PolicyCheckpoint::env_id)
      .def_readonly("variant", &PolicyCheckpoint::variant)
      .def_readonly("mode", &PolicyCheckpoint::mode)
      .def_readonly("w_full", &PolicyCheckpoint::w_full)
      .def_readonly("weights", &PolicyCheckpoint::weights)
      .def_readonly("has_prior", &PolicyCheckpoint::has_prior)
      .def_readonly("prior", &PolicyCheckpoint::prior)
      .def_readonly("config_echo", &PolicyCheckpoint::config_echo)
      .def_readonly("source_demo_id", &PolicyCheckpoint::source_demo_id);

  m.def("load_policy_checkpoint", &load_policy_checkpoint, "path"_a);

  //experiments
  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("env_id", &ExperimentConfig::env_id)
      .def_readwrite("variant", &ExperimentConfig::variant)
      .def_readwrite("mode", &ExperimentConfig::mode)
      .def_readwrite("demo_path", &ExperimentConfig::demo_path)
      .def_readwrite("prior_path", &ExperimentConfig::prior_path)
      .def_readwrite("w_full", &ExperimentConfig::w_full)
      .def_readwrite("latent_dim", &ExperimentConfig::latent_dim)
      .def_readwrite("w_task", &ExperimentConfig::w_task)
      .def_readwrite("w_style", &ExperimentConfig::w_style)
      .def_readwrite("seeds", &ExperimentConfig::seeds)
      .def_readwrite("ppo", &ExperimentConfig::ppo)
      .def_readwrite("prior_epochs", &ExperimentConfig::prior_epochs)
      .def_readwrite("prior_lr", &ExperimentConfig::prior_lr)
      .def_readwrite("prior_seed", &ExperimentConfig::prior_seed)
      .def_readwrite("eval_episodes", &ExperimentConfig::eval_episodes)
      .def_readwrite("timing", &ExperimentConfig::timing)
      .def_readwrite("out_dir", &ExperimentConfig::out_dir);

  m.def("mode_uses_demo", &mode_uses_demo, "mode"_a);
  m.def("mode_uses_prior", &mode_uses_prior, "mode"_a);
  m.def("effective_weights", &effective_weights, "config"_a);
  m.def("validate_experiment_config", &validate_experiment_config, "config"_a);
  m.def("apply_config_entry", &apply_config_entry, "config"_a, "key"_a, "value"_a);
  m.def("parse_experiment_config", &parse_experiment_config, "text"_a, "origin"_a);
  m.def("load_experiment_config", &load_experiment_config, "path"_a);
  m.def("config_echo", &config_echo, "config"_a);
  m.def("resolve_out_path", &resolve_out_path, "path"_a);

  py::class_<SeedStats>(m, "SeedStats")
      .def_readonly("mean", &SeedStats::mean)
      .def_readonly("stddev", &SeedStats::stddev)
      .def_readonly("median", &SeedStats::median)
      .def_readonly("iqr", &SeedStats::iqr);

  m.def("summarize", &summarize, "values"_a);

  py::class_<SeedOutcome>(m, "SeedOutcome")
      .def_readonly("seed", &SeedOutcome::seed)
      .def_readonly("eval", &SeedOutcome::eval)
      .def_readonly("log_path", &SeedOutcome::log_path)
      .def_readonly("checkpoint_path", &SeedOutcome::checkpoint_path);

  py::class_<TrainRunResult>(m, "TrainRunResult")
      .def_readonly("out_dir", &TrainRunResult::out_dir)
      .def_readonly("seeds", &TrainRunResult::seeds)
      .def_readonly("task_return", &TrainRunResult::task_return)
      .def_readonly("prior_trained", &TrainRunResult::prior_trained)
      .def_readonly("prior_report", &TrainRunResult::prior_report);

  py::class_<AnalyzeResult>(m, "AnalyzeResult")
      .def_readonly("pca", &AnalyzeResult::pca)
      .def_readonly("suggested_latent_dim", &AnalyzeResult::suggested_latent_dim)
      .def_readonly("csv_path", &AnalyzeResult::csv_path);

  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("out_dir", &SweepResult::out_dir)
      .def_readonly("values", &SweepResult::values)
      .def_readonly("stats", &SweepResult::stats);

  m.def(
      "run_train",
      [](const ExperimentConfig& config, const py::object& on_seed) {
        return run_train(config, seed_callback(on_seed));
      },
      "config"_a, "on_seed"_a = py::none());
  m.def("run_analyze", &run_analyze, "demo_path"_a, "out_dir"_a);
  m.def(
      "run_train_prior",
      [](const std::string& demo_path, int latent_dim, const PriorTrainConfig& config,
         const std::string& out_path) {
        PriorTrainReport report;
        LatentActionPrior prior =
            run_train_prior(demo_path, latent_dim, config, out_path, &report);
        return std::make_pair(std::move(prior), report);
      },
      "demo_path"_a, "latent_dim"_a, "config"_a, "out_path"_a);
  m.def("run_gen_demo", &run_gen_demo, "env_id"_a, "oscillator_path"_a,
        "settle_cycles"_a, "out_path"_a);
  m.def("run_eval", &run_eval, "checkpoint_path"_a, "episodes"_a, "deterministic"_a,
        "seed"_a, "demo_path"_a = std::string(), "out_csv"_a = std::string());
  m.def(
      "run_sweep",
      [](const ExperimentConfig& base, const std::string& param,
         const std::vector<double>& values, const py::object& on_seed) {
        return run_sweep(base, param, values, seed_callback(on_seed));
      },
      "base"_a, "param"_a, "values"_a, "on_seed"_a = py::none());
}
