#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "gaitprior/errors.hpp"
#include "gaitprior/experiment.hpp"
#include "gaitprior/report.hpp"

namespace {

using gaitprior::format_double;

void apply_set_flags(gaitprior::ExperimentConfig& config,
                     const std::vector<std::string>& sets) {
  for (const std::string& entry : sets) {
    std::size_t eq = entry.find('=');
    if (eq == std::string::npos) {
      throw gaitprior::ConfigError("--set expects key=value, got '" + entry + "'");
    }
    gaitprior::apply_config_entry(config, entry.substr(0, eq),
                                  entry.substr(eq + 1));
  }
}

void print_seed(const gaitprior::SeedOutcome& outcome) {
  std::cout << "seed " << outcome.seed << ": task return "
            << format_double(outcome.eval.mean_task_return) << " +- "
            << format_double(outcome.eval.std_task_return) << ", style "
            << format_double(outcome.eval.mean_style_return) << ", ep len "
            << format_double(outcome.eval.mean_episode_length) << "\n";
}

void print_stats(const gaitprior::SeedStats& stats) {
  std::cout << "task return mean " << format_double(stats.mean) << " std "
            << format_double(stats.stddev) << " median "
            << format_double(stats.median) << " iqr "
            << format_double(stats.iqr) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent gait prior RL toolkit"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand(
      "gen-demo", "Roll an oscillator expert and record one gait cycle");
  std::string gen_env;
  std::string gen_osc;
  std::string gen_out = "demo.json";
  int gen_settle = 8;
  gen->add_option("--env", gen_env, "Environment id")->required();
  gen->add_option("--oscillator", gen_osc,
                  "Oscillator config path (default: built-in)");
  gen->add_option("--settle", gen_settle, "Warm-up cycles before capture");
  gen->add_option("--out", gen_out, "Output demo path");

  auto* analyze =
      app.add_subcommand("analyze", "PCA of the demo's action frames");
  std::string an_demo;
  std::string an_out = "analysis";
  analyze->add_option("--demo", an_demo, "Demo path")->required();
  analyze->add_option("--out", an_out, "Output directory");

  auto* train_prior =
      app.add_subcommand("train-prior", "Fit the latent action autoencoder");
  std::string tp_demo;
  std::string tp_out = "prior.json";
  int tp_latent = 0;
  int tp_epochs = 10000;
  double tp_lr = 1e-3;
  std::uint64_t tp_seed = 0;
  train_prior->add_option("--demo", tp_demo, "Demo path")->required();
  train_prior->add_option("--latent-dim", tp_latent,
                          "Latent size (0 = half the action space)");
  train_prior->add_option("--epochs", tp_epochs, "Max training epochs");
  train_prior->add_option("--lr", tp_lr, "Adam learning rate");
  train_prior->add_option("--seed", tp_seed, "Init seed");
  train_prior->add_option("--out", tp_out, "Output checkpoint path");

  auto* train = app.add_subcommand("train", "Train PPO policies across seeds");
  std::string tr_config;
  std::vector<std::string> tr_sets;
  std::string tr_env, tr_mode, tr_demo, tr_prior, tr_out, tr_seeds,
      tr_total_steps, tr_w_full, tr_latent, tr_speed;
  bool tr_timing = false;
  train->add_option("--config", tr_config, "Flat key = value config file");
  train->add_option("--set", tr_sets, "Override any config key (key=value)");
  train->add_option("--env", tr_env, "Environment id");
  train->add_option("--mode", tr_mode,
                    "ppo | ppo_style | ppo_latent | ppo_latent_style");
  train->add_option("--demo", tr_demo, "Demo path");
  train->add_option("--prior", tr_prior, "Prior checkpoint path");
  train->add_option("--out", tr_out, "Output directory");
  train->add_option("--seeds", tr_seeds, "Comma-separated seed list");
  train->add_option("--total-steps", tr_total_steps, "Env steps per seed");
  train->add_option("--w-full", tr_w_full, "Full action space weight");
  train->add_option("--latent-dim", tr_latent, "Latent size for inline prior");
  train->add_option("--speed-multiplier", tr_speed, "Transfer speed multiple");
  train->add_flag("--timing", tr_timing, "Log wall-clock seconds per update");

  auto* eval = app.add_subcommand("eval", "Evaluate a policy checkpoint");
  std::string ev_ckpt, ev_demo, ev_out;
  int ev_episodes = 10;
  std::uint64_t ev_seed = 0;
  bool ev_stochastic = false;
  eval->add_option("--checkpoint", ev_ckpt, "Policy checkpoint path")->required();
  eval->add_option("--episodes", ev_episodes, "Episode count");
  eval->add_option("--seed", ev_seed, "Eval seed");
  eval->add_flag("--stochastic", ev_stochastic, "Sample actions instead of mean");
  eval->add_option("--demo", ev_demo, "Demo path for the style column");
  eval->add_option("--out", ev_out, "Metrics CSV path (default: stdout only)");

  auto* sweep = app.add_subcommand(
      "sweep", "Train one experiment per value of w_full or latent_dim");
  std::string sw_config, sw_param;
  std::vector<std::string> sw_sets;
  std::vector<double> sw_values;
  sweep->add_option("--config", sw_config, "Flat key = value config file");
  sweep->add_option("--set", sw_sets, "Override any config key (key=value)");
  sweep->add_option("--param", sw_param, "w_full or latent_dim")->required();
  sweep->add_option("--values", sw_values, "Comma-separated values")
      ->required()
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      gaitprior::Demonstration demo =
          gaitprior::run_gen_demo(gen_env, gen_osc, gen_settle, gen_out);
      std::cout << "wrote " << gaitprior::resolve_out_path(gen_out) << " ("
                << demo.n_frames << " frames, dt " << format_double(demo.dt)
                << ", action_dim " << demo.action_dim << ")\n";
    } else if (analyze->parsed()) {
      gaitprior::AnalyzeResult result = gaitprior::run_analyze(an_demo, an_out);
      double cumulative = 0.0;
      for (int i = 0; i < result.pca.explained_variance_ratio.size(); ++i) {
        cumulative += result.pca.explained_variance_ratio(i);
        std::cout << "component " << (i + 1) << ": ratio "
                  << format_double(result.pca.explained_variance_ratio(i))
                  << ", cumulative " << format_double(cumulative) << "\n";
      }
      std::cout << "suggested latent_dim: " << result.suggested_latent_dim
                << "\n";
      std::cout << "wrote " << result.csv_path << "\n";
    } else if (train_prior->parsed()) {
      gaitprior::PriorTrainConfig config;
      config.epochs = tp_epochs;
      config.lr = tp_lr;
      config.seed = tp_seed;
      gaitprior::PriorTrainReport report;
      gaitprior::LatentActionPrior prior =
          gaitprior::run_train_prior(tp_demo, tp_latent, config, tp_out, &report);
      std::cout << "latent_dim " << prior.latent_dim << ", epochs "
                << report.epochs_run << ", final loss "
                << format_double(report.final_loss) << ", rmse "
                << format_double(report.rmse) << "\n";
      std::cout << "wrote " << gaitprior::resolve_out_path(tp_out) << "\n";
    } else if (train->parsed()) {
      gaitprior::ExperimentConfig config;
      if (!tr_config.empty()) {
        config = gaitprior::load_experiment_config(tr_config);
      }
      std::vector<std::pair<std::string, std::string>> flags;
      if (train->count("--env")) flags.emplace_back("env", tr_env);
      if (train->count("--mode")) flags.emplace_back("mode", tr_mode);
      if (train->count("--demo")) flags.emplace_back("demo", tr_demo);
      if (train->count("--prior")) flags.emplace_back("prior", tr_prior);
      if (train->count("--out")) flags.emplace_back("out", tr_out);
      if (train->count("--seeds")) flags.emplace_back("seeds", tr_seeds);
      if (train->count("--total-steps")) {
        flags.emplace_back("total_steps", tr_total_steps);
      }
      if (train->count("--w-full")) flags.emplace_back("w_full", tr_w_full);
      if (train->count("--latent-dim")) {
        flags.emplace_back("latent_dim", tr_latent);
      }
      if (train->count("--speed-multiplier")) {
        flags.emplace_back("speed_multiplier", tr_speed);
      }
      if (train->count("--timing")) flags.emplace_back("timing", "true");
      for (const auto& [key, value] : flags) {
        gaitprior::apply_config_entry(config, key, value);
      }
      apply_set_flags(config, tr_sets);
      gaitprior::TrainRunResult result = gaitprior::run_train(config, print_seed);
      if (result.prior_trained) {
        std::cout << "prior: epochs " << result.prior_report.epochs_run
                  << ", final loss "
                  << format_double(result.prior_report.final_loss) << ", rmse "
                  << format_double(result.prior_report.rmse) << "\n";
      }
      print_stats(result.task_return);
      std::cout << "outputs in " << result.out_dir << "\n";
    } else if (eval->parsed()) {
      gaitprior::EvalResult result = gaitprior::run_eval(
          ev_ckpt, ev_episodes, !ev_stochastic, ev_seed, ev_demo, ev_out);
      std::cout << "task return " << format_double(result.mean_task_return)
                << " +- " << format_double(result.std_task_return) << ", style "
                << format_double(result.mean_style_return) << ", ep len "
                << format_double(result.mean_episode_length) << " over "
                << result.episodes << " episodes\n";
      if (!ev_out.empty()) {
        std::cout << "wrote " << gaitprior::resolve_out_path(ev_out) << "\n";
      }
    } else if (sweep->parsed()) {
      gaitprior::ExperimentConfig config;
      if (!sw_config.empty()) {
        config = gaitprior::load_experiment_config(sw_config);
      }
      apply_set_flags(config, sw_sets);
      gaitprior::SweepResult result =
          gaitprior::run_sweep(config, sw_param, sw_values, print_seed);
      for (std::size_t i = 0; i < result.values.size(); ++i) {
        std::cout << sw_param << " = " << format_double(result.values[i]) << ": ";
        print_stats(result.stats[i]);
      }
      std::cout << "outputs in " << result.out_dir << "\n";
    }
    return 0;
  } catch (const gaitprior::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  }
}
