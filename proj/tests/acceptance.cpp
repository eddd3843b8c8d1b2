#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gaitprior/checkpoint.hpp"
#include "gaitprior/envs.hpp"
#include "gaitprior/experiment.hpp"
#include "gaitprior/imitation.hpp"
#include "gaitprior/latent_prior.hpp"
#include "gaitprior/nn.hpp"
#include "gaitprior/ppo.hpp"
#include "gaitprior/synergy.hpp"

using namespace gaitprior;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", criterion, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void run_criterion(int criterion, const std::function<std::pair<bool, std::string>()>& body) {
  try {
    auto [pass, detail] = body();
    report(criterion, pass, detail);
  } catch (const std::exception& err) {
    report(criterion, false, std::string("exception: ") + err.what());
  }
}

std::string fmt(double value) {
  std::ostringstream out;
  out.precision(6);
  out << value;
  return out.str();
}

Matrix planted_rank4_actions(int frames = 60) {
  double two_pi = 2.0 * std::acos(-1.0);
  Matrix latents(frames, 4);
  for (int t = 0; t < frames; ++t) {
    latents(t, 0) = std::sin(two_pi * 1.0 * t / frames);
    latents(t, 1) = std::sin(two_pi * 2.0 * t / frames + 0.4);
    latents(t, 2) = std::sin(two_pi * 3.0 * t / frames + 1.1);
    latents(t, 3) = std::sin(two_pi * 5.0 * t / frames + 2.0);
  }
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-0.2, 0.2);
  Matrix mixing(4, 8);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 8; ++c) mixing(r, c) = dist(rng);
  return latents * mixing;
}

Vector gae_reference(const RolloutBuffer& buffer, double last_value, double gamma,
                     double lambda) {
  const int n = buffer.size;
  std::vector<double> delta(n);
  for (int t = 0; t < n; ++t) {
    double next_value = t == n - 1 ? last_value : buffer.values[t + 1];
    bool boundary = t == n - 1
                        ? buffer.final_episode_start != 0
                        : buffer.episode_starts[static_cast<std::size_t>(t + 1)] != 0;
    delta[t] = buffer.rewards[t] + gamma * next_value * (boundary ? 0.0 : 1.0) -
               buffer.values[t];
  }
  Vector advantages(n);
  for (int t = 0; t < n; ++t) {
    double acc = 0.0;
    double coef = 1.0;
    for (int k = t; k < n; ++k) {
      acc += coef * delta[k];
      bool boundary = k == n - 1
                          ? buffer.final_episode_start != 0
                          : buffer.episode_starts[static_cast<std::size_t>(k + 1)] != 0;
      if (boundary) break;
      coef *= gamma * lambda;
    }
    advantages[t] = acc;
  }
  return advantages;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream line_stream(line);
    while (std::getline(line_stream, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

fs::path workspace() {
  static fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / "gaitprior_acceptance";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

}  // namespace

int main() {
  const fs::path work = workspace();
  const std::string demo_path = (work / "demo.json").string();
  const std::string prior_path = (work / "prior.json").string();

  // shared state produced by the training criterion and reused afterwards
  bool runs_ready = false;
  TrainRunResult run_ppo, run_latent, run_latent_style;

  run_criterion(1, []() -> std::pair<bool, std::string> {
    Vector inside(2);
    inside << 0.5, -0.7;
    Vector above(1);
    above << 1.2;
    Vector shoulder(1);
    shoulder << 0.9;
    double e_minus_1 = std::exp(1.0) - 1.0;
    double shoulder_expected = std::exp(std::pow(0.75, 10.0)) - 1.0;
    bool pass = norm_loss(inside) == 0.0 &&
                std::abs(norm_loss(above) - e_minus_1) <= 1e-9 &&
                std::abs(norm_loss(shoulder) - shoulder_expected) <= 1e-9;
    return {pass, "latent norm penalty matches its closed form at 0.5/0.9/1.2"};
  });

  run_criterion(2, []() -> std::pair<bool, std::string> {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> dim(1, 16);
    std::uniform_int_distribution<int> depth(1, 2);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<int> sizes{std::min(dim(rng), 6)};
      int hidden_layers = depth(rng);
      for (int l = 0; l < hidden_layers; ++l) sizes.push_back(dim(rng));
      sizes.push_back(std::min(dim(rng), 4));
      Activation out_act = trial % 2 == 0 ? Activation::Identity : Activation::Tanh;
      Mlp net = make_mlp(sizes, Activation::Tanh, out_act, 1000 + trial);

      Vector input(net.input_dim());
      for (int i = 0; i < input.size(); ++i) input(i) = unit(rng);
      Vector target(net.output_dim());
      for (int i = 0; i < target.size(); ++i) target(i) = unit(rng);

      ScalarLoss loss;
      loss.value = [target](const Vector& y) { return 0.5 * (y - target).squaredNorm(); };
      loss.grad = [target](const Vector& y) -> Vector { return y - target; };
      FiniteDiffReport rep = finite_diff_check(net, loss, input, 1e-4);
      worst = std::max(worst, rep.max_rel_error);
      if (!rep.passed) return {false, "gradient check failed on a random network"};
    }
    return {worst <= 1e-4,
            "max relative gradient error " + fmt(worst) + " over 20 networks"};
  });

  run_criterion(3, []() -> std::pair<bool, std::string> {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::uniform_int_distribution<int> len_dist(1, 10);
    std::uniform_int_distribution<int> flag(0, 3);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      int n = len_dist(rng);
      RolloutBuffer buffer = make_rollout_buffer(n, 1, 1);
      buffer.size = n;
      for (int t = 0; t < n; ++t) {
        buffer.rewards(t) = dist(rng);
        buffer.values(t) = dist(rng);
        buffer.episode_starts[static_cast<std::size_t>(t)] =
            t == 0 ? 1 : (flag(rng) == 0 ? 1 : 0);
      }
      buffer.final_episode_start = flag(rng) == 0 ? 1 : 0;
      double last_value = dist(rng);
      double gamma = 0.5 + 0.5 * std::abs(dist(rng));
      double lambda = std::abs(dist(rng));
      compute_gae(buffer, last_value, gamma, lambda);
      Vector expected = gae_reference(buffer, last_value, gamma, lambda);
      worst = std::max(worst, (buffer.advantages - expected).cwiseAbs().maxCoeff());
    }
    return {worst <= 1e-10,
            "max advantage deviation " + fmt(worst) + " over 50 random sequences"};
  });

  run_criterion(4, []() -> std::pair<bool, std::string> {
    Matrix actions = planted_rank4_actions();
    PriorTrainConfig config;
    config.epochs = 5000;
    PriorTrainReport rep;
    LatentActionPrior prior = train_autoencoder(actions, 4, config, &rep);
    Matrix latents = encode_batch(prior, actions);
    long in_bounds = (latents.array().abs() <= 1.05).count();
    double fraction =
        static_cast<double>(in_bounds) / static_cast<double>(latents.size());
    bool pass = rep.rmse <= 0.05 && fraction >= 0.99;
    return {pass, "reconstruction rmse " + fmt(rep.rmse) + ", " +
                      fmt(100.0 * fraction) + "% of latents within [-1.05, 1.05]"};
  });

  run_criterion(5, []() -> std::pair<bool, std::string> {
    auto env = make_env("point_gait");
    Demonstration demo = generate_demonstration(*env, default_oscillator_config("point_gait"));
    PcaResult pca = compute_pca(actions_matrix(demo));
    int half = (demo.action_dim + 1) / 2;
    double top = pca.explained_variance_ratio.head(half).sum();
    return {top >= 0.97, "top " + std::to_string(half) + " components explain " +
                             fmt(100.0 * top) + "% of action variance"};
  });

  run_criterion(6, []() -> std::pair<bool, std::string> {
    Vector pose(3);
    pose << 0.3, -0.2, 0.7;
    bool identical = style_reward(pose, pose) == 1.0;

    Vector expert = pose;
    double previous = 1.0;
    bool decreasing = true;
    for (double d : {0.2, 0.5, 1.0, 2.0}) {
      Vector shifted = expert;
      shifted(0) += d;
      double r = style_reward(shifted, expert);
      decreasing = decreasing && r < previous;
      previous = r;
    }

    bool mix = mix_rewards(1.0, 1.0, RewardWeights{}) == 1.0;
    bool pass = identical && decreasing && mix;
    return {pass,
            "identical poses score 1.0, reward falls with distance, 0.67/0.33 mix of "
            "(1,1) is 1.00"};
  });

  run_criterion(7, [&]() -> std::pair<bool, std::string> {
    run_gen_demo("point_gait", "", 8, demo_path);
    PriorTrainConfig prior_config;
    prior_config.epochs = 10000;
    run_train_prior(demo_path, 0, prior_config, prior_path);

    ExperimentConfig base;
    base.env_id = "point_gait";
    base.seeds = {0, 1, 2, 3, 4};
    base.ppo.total_steps = 200000;

    ExperimentConfig ppo = base;
    ppo.mode = "ppo";
    ppo.out_dir = (workspace() / "run_ppo").string();
    run_ppo = run_train(ppo);

    ExperimentConfig latent = base;
    latent.mode = "ppo_latent";
    latent.demo_path = demo_path;
    latent.prior_path = prior_path;
    latent.out_dir = (workspace() / "run_latent").string();
    run_latent = run_train(latent);

    ExperimentConfig latent_style = base;
    latent_style.mode = "ppo_latent_style";
    latent_style.demo_path = demo_path;
    latent_style.prior_path = prior_path;
    latent_style.out_dir = (workspace() / "run_latent_style").string();
    run_latent_style = run_train(latent_style);

    runs_ready = true;
    double m_ppo = run_ppo.task_return.median;
    double m_latent = run_latent.task_return.median;
    double m_style = run_latent_style.task_return.median;
    bool pass = m_latent >= 1.2 * m_ppo && m_style >= 0.95 * m_latent;
    return {pass, "median final returns over 5 seeds: ppo " + fmt(m_ppo) +
                      ", ppo_latent " + fmt(m_latent) + " (need >= " +
                      fmt(1.2 * m_ppo) + "), ppo_latent_style " + fmt(m_style) +
                      " (need >= " + fmt(0.95 * m_latent) + ")"};
  });

  run_criterion(8, [&]() -> std::pair<bool, std::string> {
    ExperimentConfig base;
    base.env_id = "point_gait";
    base.variant.speed_multiplier = 2;
    base.seeds = {0, 1, 2, 3, 4};
    base.ppo.total_steps = 200000;

    ExperimentConfig ppo = base;
    ppo.mode = "ppo";
    ppo.out_dir = (workspace() / "run_2x_ppo").string();
    TrainRunResult fast_ppo = run_train(ppo);

    ExperimentConfig latent_style = base;
    latent_style.mode = "ppo_latent_style";
    latent_style.demo_path = demo_path;
    latent_style.prior_path = prior_path;
    latent_style.out_dir = (workspace() / "run_2x_latent_style").string();
    TrainRunResult fast_style = run_train(latent_style);

    double m_ppo = fast_ppo.task_return.median;
    double m_style = fast_style.task_return.median;
    return {m_style >= m_ppo,
            "2x target speed with the 1x demonstration: ppo_latent_style median " +
                fmt(m_style) + " vs ppo " + fmt(m_ppo)};
  });

  run_criterion(9, [&]() -> std::pair<bool, std::string> {
    LatentActionPrior prior = load_prior_checkpoint(prior_path);
    PpoConfig config;
    config.total_steps = 2048;
    config.rollout_length = 2048;
    config.hidden = {32, 32};
    TrainOptions options;
    options.prior = &prior;
    options.w_full = 1.0;
    long steps = 0;
    long exact = 0;
    options.observer = [&](const StepRecord& rec) {
      ++steps;
      Vector clipped = rec.residual.cwiseMax(-1.0).cwiseMin(1.0);
      if ((rec.applied - clipped).cwiseAbs().maxCoeff() == 0.0) ++exact;
    };
    train([](std::uint64_t seed) { return make_env("point_gait", {}, seed); },
          config, options);
    bool residual_identity = steps == 2048 && exact == steps;

    if (!runs_ready) return {false, "prerequisite training runs unavailable"};
    PolicyCheckpoint ckpt =
        load_policy_checkpoint(run_ppo.seeds.at(0).checkpoint_path);
    bool plain_head = ckpt.params.a_latent == 0 && ckpt.params.head_dim() == 4;
    bool pass = residual_identity && plain_head;
    return {pass, "w_full=1.0 applied clip(residual) on " + std::to_string(exact) +
                      "/" + std::to_string(steps) +
                      " steps; plain ppo head has size 4 with no latent part"};
  });

  run_criterion(10, []() -> std::pair<bool, std::string> {
    fs::path out_a = workspace() / "determinism_a";
    fs::path out_b = workspace() / "determinism_b";
    std::string base = "\"" + std::string(GAITPRIOR_CLI_PATH) +
                       "\" train --env point_gait --mode ppo --seeds 0"
                       " --total-steps 20480 --out ";
    for (const fs::path& out : {out_a, out_b}) {
      std::string cmd = base + "\"" + out.string() + "\" > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) {
        return {false, "training command failed"};
      }
    }
    std::string log_a = read_file(out_a / "logs/seed_0.csv");
    std::string log_b = read_file(out_b / "logs/seed_0.csv");
    bool pass = !log_a.empty() && log_a == log_b;
    return {pass, "two identical 20k-step runs wrote byte-identical training logs"};
  });

  run_criterion(11, [&]() -> std::pair<bool, std::string> {
    if (!runs_ready) return {false, "prerequisite training runs unavailable"};
    bool finite = true;
    bool varies = true;
    for (const SeedOutcome& outcome : run_latent.seeds) {
      auto rows = parse_csv(read_file(outcome.log_path));
      if (rows.size() < 3) return {false, "training log too short"};
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      for (std::size_t r = 1; r < rows.size(); ++r) {
        double decoded = std::stod(rows[r].at(5));
        double residual = std::stod(rows[r].at(6));
        finite = finite && std::isfinite(decoded) && std::isfinite(residual);
        lo = std::min(lo, decoded);
        hi = std::max(hi, decoded);
      }
      varies = varies && lo < hi;
    }
    bool pass = finite && varies;
    return {pass,
            "decoded/residual contribution columns are finite and the decoded "
            "magnitude varies over training in all 5 seeds"};
  });

  std::printf("%d of 11 criteria passed\n", 11 - failures);
  return failures == 0 ? 0 : 1;
}
