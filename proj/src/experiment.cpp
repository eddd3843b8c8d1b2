#include "gaitprior/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gaitprior/errors.hpp"
#include "gaitprior/report.hpp"

namespace gaitprior {

namespace fs = std::filesystem;

bool mode_uses_demo(const std::string& mode) {
  return mode == "ppo_style" || mode == "ppo_latent" || mode == "ppo_latent_style";
}

bool mode_uses_prior(const std::string& mode) {
  return mode == "ppo_latent" || mode == "ppo_latent_style";
}

RewardWeights effective_weights(const ExperimentConfig& config) {
  RewardWeights weights;
  if (config.mode == "ppo_style" || config.mode == "ppo_latent_style") {
    weights = RewardWeights{};
  } else {
    weights.w_task = 1.0;
    weights.w_style = 0.0;
  }
  if (config.w_task.has_value()) weights.w_task = *config.w_task;
  if (config.w_style.has_value()) weights.w_style = *config.w_style;
  return weights;
}

namespace {

bool known_mode(const std::string& mode) {
  return mode == "ppo" || mode_uses_demo(mode);
}

double parse_double_value(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    double parsed = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse '" + value +
                      "' as a number");
  }
}

long parse_long_value(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    long parsed = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse '" + value +
                      "' as an integer");
  }
}

int parse_int_value(const std::string& key, const std::string& value) {
  long parsed = parse_long_value(key, value);
  if (parsed < std::numeric_limits<int>::min() ||
      parsed > std::numeric_limits<int>::max()) {
    throw ConfigError("config key '" + key + "': value out of range");
  }
  return static_cast<int>(parsed);
}

std::uint64_t parse_u64_value(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    unsigned long long parsed = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return static_cast<std::uint64_t>(parsed);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse '" + value +
                      "' as an unsigned integer");
  }
}

bool parse_bool_value(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" +
                    value + "'");
}

std::vector<std::string> split_commas(const std::string& value) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : value) {
    if (c == ',') {
      parts.push_back(current);
      current.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      current += c;
    }
  }
  parts.push_back(current);
  return parts;
}

std::string trim(const std::string& text) {
  std::size_t begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  std::size_t end = text.find_last_not_of(" \t\r\n");
  return text.substr(begin, end - begin + 1);
}

template <typename T>
std::string join_list(const std::vector<T>& values) {
  std::ostringstream out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out << ',';
    out << values[i];
  }
  return out.str();
}

}  // namespace

void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value) {
  if (key == "env") {
    config.env_id = value;
  } else if (key == "speed_multiplier") {
    config.variant.speed_multiplier = parse_int_value(key, value);
  } else if (key == "any_direction") {
    config.variant.any_direction = parse_bool_value(key, value);
  } else if (key == "mode") {
    config.mode = value;
  } else if (key == "demo") {
    config.demo_path = value;
  } else if (key == "prior") {
    config.prior_path = value;
  } else if (key == "w_full") {
    config.w_full = parse_double_value(key, value);
  } else if (key == "latent_dim") {
    config.latent_dim = parse_int_value(key, value);
  } else if (key == "w_task") {
    config.w_task = parse_double_value(key, value);
  } else if (key == "w_style") {
    config.w_style = parse_double_value(key, value);
  } else if (key == "seeds") {
    std::vector<std::uint64_t> seeds;
    for (const std::string& part : split_commas(value)) {
      seeds.push_back(parse_u64_value(key, part));
    }
    config.seeds = std::move(seeds);
  } else if (key == "total_steps") {
    config.ppo.total_steps = parse_long_value(key, value);
  } else if (key == "rollout_length") {
    config.ppo.rollout_length = parse_int_value(key, value);
  } else if (key == "n_envs") {
    config.ppo.n_envs = parse_int_value(key, value);
  } else if (key == "lr") {
    config.ppo.lr = parse_double_value(key, value);
  } else if (key == "gamma") {
    config.ppo.gamma = parse_double_value(key, value);
  } else if (key == "gae_lambda") {
    config.ppo.gae_lambda = parse_double_value(key, value);
  } else if (key == "clip_range") {
    config.ppo.clip_range = parse_double_value(key, value);
  } else if (key == "n_epochs") {
    config.ppo.n_epochs = parse_int_value(key, value);
  } else if (key == "minibatch") {
    config.ppo.minibatch = parse_int_value(key, value);
  } else if (key == "vf_coef") {
    config.ppo.vf_coef = parse_double_value(key, value);
  } else if (key == "ent_coef") {
    config.ppo.ent_coef = parse_double_value(key, value);
  } else if (key == "max_grad_norm") {
    config.ppo.max_grad_norm = parse_double_value(key, value);
  } else if (key == "hidden") {
    std::vector<int> hidden;
    for (const std::string& part : split_commas(value)) {
      hidden.push_back(parse_int_value(key, part));
    }
    config.ppo.hidden = std::move(hidden);
  } else if (key == "prior_epochs") {
    config.prior_epochs = parse_int_value(key, value);
  } else if (key == "prior_lr") {
    config.prior_lr = parse_double_value(key, value);
  } else if (key == "prior_seed") {
    config.prior_seed = parse_u64_value(key, value);
  } else if (key == "eval_episodes") {
    config.eval_episodes = parse_int_value(key, value);
  } else if (key == "timing") {
    config.timing = parse_bool_value(key, value);
  } else if (key == "out") {
    config.out_dir = value;
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::string& origin) {
  ExperimentConfig config;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": expected key = value, got '" + stripped + "'");
    }
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": empty config key");
    }
    try {
      apply_config_entry(config, key, value);
    } catch (const ConfigError& err) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": " +
                        err.what());
    }
  }
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_experiment_config(text.str(), path);
}

std::string config_echo(const ExperimentConfig& config) {
  RewardWeights weights = effective_weights(config);
  std::ostringstream out;
  out << "env = " << config.env_id << "\n";
  out << "speed_multiplier = " << config.variant.speed_multiplier << "\n";
  out << "any_direction = " << (config.variant.any_direction ? "true" : "false")
      << "\n";
  out << "mode = " << config.mode << "\n";
  out << "demo = " << config.demo_path << "\n";
  out << "prior = " << config.prior_path << "\n";
  out << "w_full = " << format_double(config.w_full) << "\n";
  out << "latent_dim = " << config.latent_dim << "\n";
  out << "w_task = " << format_double(weights.w_task) << "\n";
  out << "w_style = " << format_double(weights.w_style) << "\n";
  out << "seeds = " << join_list(config.seeds) << "\n";
  out << "total_steps = " << config.ppo.total_steps << "\n";
  out << "rollout_length = " << config.ppo.rollout_length << "\n";
  out << "n_envs = " << config.ppo.n_envs << "\n";
  out << "lr = " << format_double(config.ppo.lr) << "\n";
  out << "gamma = " << format_double(config.ppo.gamma) << "\n";
  out << "gae_lambda = " << format_double(config.ppo.gae_lambda) << "\n";
  out << "clip_range = " << format_double(config.ppo.clip_range) << "\n";
  out << "n_epochs = " << config.ppo.n_epochs << "\n";
  out << "minibatch = " << config.ppo.minibatch << "\n";
  out << "vf_coef = " << format_double(config.ppo.vf_coef) << "\n";
  out << "ent_coef = " << format_double(config.ppo.ent_coef) << "\n";
  out << "max_grad_norm = " << format_double(config.ppo.max_grad_norm) << "\n";
  out << "hidden = " << join_list(config.ppo.hidden) << "\n";
  out << "prior_epochs = " << config.prior_epochs << "\n";
  out << "prior_lr = " << format_double(config.prior_lr) << "\n";
  out << "prior_seed = " << config.prior_seed << "\n";
  out << "eval_episodes = " << config.eval_episodes << "\n";
  out << "timing = " << (config.timing ? "true" : "false") << "\n";
  out << "out = " << config.out_dir << "\n";
  return out.str();
}

void validate_experiment_config(const ExperimentConfig& config) {
  if (!known_mode(config.mode)) {
    throw ConfigError("unknown mode '" + config.mode +
                      "' (expected ppo, ppo_style, ppo_latent, ppo_latent_style)");
  }
  if (!(config.w_full >= 0.0 && config.w_full <= 1.0)) {
    throw ConfigError("w_full must lie in [0, 1]");
  }
  if (config.latent_dim < 0) {
    throw ConfigError("latent_dim must be positive (or 0 to auto-select)");
  }
  if (config.w_task.has_value() &&
      !(std::isfinite(*config.w_task) && *config.w_task >= 0.0)) {
    throw ConfigError("w_task must be finite and non-negative");
  }
  if (config.w_style.has_value() &&
      !(std::isfinite(*config.w_style) && *config.w_style >= 0.0)) {
    throw ConfigError("w_style must be finite and non-negative");
  }
  if (config.seeds.empty()) throw ConfigError("seeds must not be empty");
  std::vector<std::uint64_t> sorted_seeds = config.seeds;
  std::sort(sorted_seeds.begin(), sorted_seeds.end());
  if (std::adjacent_find(sorted_seeds.begin(), sorted_seeds.end()) !=
      sorted_seeds.end()) {
    throw ConfigError("seeds must be distinct");
  }
  if (config.eval_episodes < 1) throw ConfigError("eval_episodes must be >= 1");
  if (config.prior_epochs < 1) throw ConfigError("prior_epochs must be >= 1");
  if (!(config.prior_lr > 0.0)) throw ConfigError("prior_lr must be positive");

  const PpoConfig& ppo = config.ppo;
  if (ppo.total_steps < 1) throw ConfigError("total_steps must be >= 1");
  if (ppo.rollout_length < 1) throw ConfigError("rollout_length must be >= 1");
  if (ppo.n_envs < 1) throw ConfigError("n_envs must be >= 1");
  if (ppo.minibatch < 1) throw ConfigError("minibatch must be >= 1");
  if (ppo.n_epochs < 1) throw ConfigError("n_epochs must be >= 1");
  if (!(ppo.lr > 0.0)) throw ConfigError("lr must be positive");
  if (!(ppo.gamma >= 0.0 && ppo.gamma <= 1.0)) {
    throw ConfigError("gamma must lie in [0, 1]");
  }
  if (!(ppo.gae_lambda >= 0.0 && ppo.gae_lambda <= 1.0)) {
    throw ConfigError("gae_lambda must lie in [0, 1]");
  }
  if (!(ppo.clip_range > 0.0)) throw ConfigError("clip_range must be positive");
  if (!(ppo.vf_coef >= 0.0)) throw ConfigError("vf_coef must be non-negative");
  if (!(ppo.ent_coef >= 0.0)) throw ConfigError("ent_coef must be non-negative");
  if (!(ppo.max_grad_norm > 0.0)) {
    throw ConfigError("max_grad_norm must be positive");
  }
  if (ppo.hidden.empty()) throw ConfigError("hidden must not be empty");
  for (int width : ppo.hidden) {
    if (width < 1) throw ConfigError("hidden layer widths must be >= 1");
  }

  bool style_mode = config.mode == "ppo_style" || config.mode == "ppo_latent_style";
  if (style_mode && config.demo_path.empty()) {
    throw ConfigError("mode " + config.mode + " requires demo = <path>");
  }
  if (config.mode == "ppo_latent" && config.demo_path.empty() &&
      config.prior_path.empty()) {
    throw ConfigError("mode ppo_latent requires demo = <path> or prior = <path>");
  }
}

std::string resolve_out_path(const std::string& path) {
  const char* root = std::getenv("GAITPRIOR_OUT");
  if (root != nullptr && *root != '\0') {
    fs::path p(path);
    if (p.is_relative()) return (fs::path(root) / p).string();
  }
  return path;
}

namespace {

double quantile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0.0;
  if (sorted.size() == 1) return sorted.front();
  double h = p * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

SeedStats summarize(const std::vector<double>& values) {
  SeedStats stats;
  if (values.empty()) return stats;
  double sum = 0.0;
  for (double v : values) sum += v;
  std::size_t n = values.size();
  stats.mean = sum / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - stats.mean) * (v - stats.mean);
    stats.stddev = std::sqrt(ss / static_cast<double>(n - 1));
  }
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  stats.median = quantile(sorted, 0.5);
  stats.iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
  return stats;
}

namespace {

void check_demo_matches_env(const Demonstration& demo, const EnvSpec& spec) {
  if (demo.action_dim != spec.action_dim) {
    throw ConfigError("demo action_dim " + std::to_string(demo.action_dim) +
                      " does not match env action_dim " +
                      std::to_string(spec.action_dim));
  }
  if (demo.pose_dim != spec.pose_dim) {
    throw ConfigError("demo pose_dim " + std::to_string(demo.pose_dim) +
                      " does not match env pose_dim " +
                      std::to_string(spec.pose_dim));
  }
}

std::string eval_csv(const EvalResult& eval) {
  std::ostringstream out;
  out << "mean_task_return,std_task_return,mean_style_return,"
         "mean_episode_length,episodes\n";
  out << format_double(eval.mean_task_return) << ','
      << format_double(eval.std_task_return) << ','
      << format_double(eval.mean_style_return) << ','
      << format_double(eval.mean_episode_length) << ',' << eval.episodes
      << "\n";
  return out.str();
}

}  // namespace

TrainRunResult run_train(const ExperimentConfig& config,
                         const std::function<void(const SeedOutcome&)>& on_seed) {
  validate_experiment_config(config);
  std::string out = resolve_out_path(config.out_dir);
  fs::create_directories(fs::path(out) / "logs");
  fs::create_directories(fs::path(out) / "checkpoints");
  fs::create_directories(fs::path(out) / "reports");

  auto probe = make_env(config.env_id, config.variant, 0);
  const EnvSpec spec = probe->spec();
  probe.reset();

  Demonstration demo;
  bool have_demo = false;
  if (mode_uses_demo(config.mode) && !config.demo_path.empty()) {
    demo = load_demonstration(config.demo_path);
    check_demo_matches_env(demo, spec);
    have_demo = true;
  }

  TrainRunResult result;
  result.out_dir = out;

  LatentActionPrior prior;
  bool have_prior = false;
  if (mode_uses_prior(config.mode)) {
    if (!config.prior_path.empty()) {
      prior = load_prior_checkpoint(config.prior_path);
      if (prior.full_dim != spec.action_dim) {
        throw ConfigError("prior full_dim " + std::to_string(prior.full_dim) +
                          " does not match env action_dim " +
                          std::to_string(spec.action_dim));
      }
    } else {
      int latent = config.latent_dim > 0 ? config.latent_dim
                                         : suggest_latent_dim(demo.action_dim);
      if (latent < 1 || latent > demo.action_dim) {
        throw ConfigError("latent_dim must lie in [1, " +
                          std::to_string(demo.action_dim) + "], got " +
                          std::to_string(latent));
      }
      PriorTrainConfig prior_config;
      prior_config.epochs = config.prior_epochs;
      prior_config.lr = config.prior_lr;
      prior_config.seed = config.prior_seed;
      prior = train_autoencoder(demo, latent, prior_config, &result.prior_report);
      result.prior_trained = true;
    }
    prior.full_action_weight = config.w_full;
    have_prior = true;
    save_prior_checkpoint(prior, (fs::path(out) / "checkpoints/prior.json").string());
  }

  std::string echo = config_echo(config);
  write_text_file((fs::path(out) / "config.txt").string(), echo);

  RewardWeights weights = effective_weights(config);
  std::vector<double> final_returns;
  std::vector<Series> curves;

  for (std::uint64_t seed : config.seeds) {
    PpoConfig ppo = config.ppo;
    ppo.seed = seed;
    TrainOptions options;
    options.prior = have_prior ? &prior : nullptr;
    options.style_demo = have_demo ? &demo : nullptr;
    options.weights = weights;
    options.w_full = config.w_full;
    options.timing = config.timing;
    EnvFactory factory = [&config](std::uint64_t env_seed) {
      return make_env(config.env_id, config.variant, env_seed);
    };
    TrainResult trained = train(factory, ppo, options);

    SeedOutcome outcome;
    outcome.seed = seed;
    outcome.log_path =
        (fs::path(out) / "logs" / ("seed_" + std::to_string(seed) + ".csv")).string();
    write_text_file(outcome.log_path, training_log_csv(trained.logs));

    PolicyCheckpoint ckpt;
    ckpt.params = trained.params;
    ckpt.norm = trained.norm;
    ckpt.phase_period = trained.phase_period;
    ckpt.env_id = config.env_id;
    ckpt.variant = config.variant;
    ckpt.mode = config.mode;
    ckpt.w_full = config.w_full;
    ckpt.weights = weights;
    ckpt.has_prior = have_prior;
    if (have_prior) ckpt.prior = prior;
    ckpt.config_echo = echo;
    if (have_demo) ckpt.source_demo_id = demonstration_id(demo);
    outcome.checkpoint_path =
        (fs::path(out) / "checkpoints" /
         ("seed_" + std::to_string(seed) + "_policy.json"))
            .string();
    save_policy_checkpoint(ckpt, outcome.checkpoint_path);

    auto eval_env = make_env(config.env_id, config.variant, seed);
    outcome.eval = evaluate_policy(
        *eval_env, trained.params, trained.norm, trained.phase_period,
        have_prior ? &prior : nullptr, have_demo ? &demo : nullptr,
        config.w_full, config.eval_episodes, true, seed);
    final_returns.push_back(outcome.eval.mean_task_return);

    Series curve;
    curve.name = "seed " + std::to_string(seed);
    for (const UpdateLog& row : trained.logs) {
      curve.x.push_back(static_cast<double>(row.env_steps));
      curve.y.push_back(row.mean_task_return);
    }
    curves.push_back(std::move(curve));

    if (on_seed) on_seed(outcome);
    result.seeds.push_back(std::move(outcome));
  }

  result.task_return = summarize(final_returns);

  std::ostringstream summary;
  summary << "seed,final_task_return,std_task_return,mean_style_return,"
             "mean_episode_length,episodes\n";
  for (const SeedOutcome& outcome : result.seeds) {
    summary << outcome.seed << ','
            << format_double(outcome.eval.mean_task_return) << ','
            << format_double(outcome.eval.std_task_return) << ','
            << format_double(outcome.eval.mean_style_return) << ','
            << format_double(outcome.eval.mean_episode_length) << ','
            << outcome.eval.episodes << "\n";
  }
  summary << "mean," << format_double(result.task_return.mean) << ",,,,\n";
  summary << "std," << format_double(result.task_return.stddev) << ",,,,\n";
  summary << "median," << format_double(result.task_return.median) << ",,,,\n";
  summary << "iqr," << format_double(result.task_return.iqr) << ",,,,\n";
  write_text_file((fs::path(out) / "reports/summary.csv").string(), summary.str());

  write_line_chart((fs::path(out) / "reports/learning_curve.svg").string(),
                   config.env_id + " " + config.mode + " task return", curves);
  return result;
}

AnalyzeResult run_analyze(const std::string& demo_path, const std::string& out_dir) {
  Demonstration demo = load_demonstration(demo_path);
  AnalyzeResult result;
  result.pca = compute_pca(actions_matrix(demo));
  result.suggested_latent_dim = suggest_latent_dim(demo.action_dim);

  std::ostringstream csv;
  csv << "component,explained_variance_ratio,cumulative\n";
  Series curve;
  curve.name = "cumulative";
  double cumulative = 0.0;
  for (int i = 0; i < result.pca.explained_variance_ratio.size(); ++i) {
    cumulative += result.pca.explained_variance_ratio(i);
    csv << (i + 1) << ',' << format_double(result.pca.explained_variance_ratio(i))
        << ',' << format_double(cumulative) << "\n";
    curve.x.push_back(static_cast<double>(i + 1));
    curve.y.push_back(cumulative);
  }

  std::string out = resolve_out_path(out_dir);
  fs::create_directories(out);
  result.csv_path = (fs::path(out) / "analysis.csv").string();
  write_text_file(result.csv_path, csv.str());
  write_line_chart((fs::path(out) / "analysis.svg").string(),
                   demo.env_id + " cumulative explained variance", {curve});
  return result;
}

LatentActionPrior run_train_prior(const std::string& demo_path, int latent_dim,
                                  const PriorTrainConfig& config,
                                  const std::string& out_path,
                                  PriorTrainReport* report) {
  Demonstration demo = load_demonstration(demo_path);
  int latent = latent_dim > 0 ? latent_dim : suggest_latent_dim(demo.action_dim);
  if (latent < 1 || latent > demo.action_dim) {
    throw ConfigError("latent_dim must lie in [1, " +
                      std::to_string(demo.action_dim) + "], got " +
                      std::to_string(latent));
  }
  if (config.epochs < 1) throw ConfigError("prior epochs must be >= 1");
  if (!(config.lr > 0.0)) throw ConfigError("prior lr must be positive");
  LatentActionPrior prior = train_autoencoder(demo, latent, config, report);
  save_prior_checkpoint(prior, resolve_out_path(out_path));
  return prior;
}

Demonstration run_gen_demo(const std::string& env_id,
                           const std::string& oscillator_path, int settle_cycles,
                           const std::string& out_path) {
  if (settle_cycles < 0) throw ConfigError("settle cycles must be >= 0");
  OscillatorConfig oscillator = oscillator_path.empty()
                                    ? default_oscillator_config(env_id)
                                    : load_oscillator_config(oscillator_path);
  auto env = make_env(env_id);
  Demonstration demo = generate_demonstration(*env, oscillator, settle_cycles);
  save_demonstration(demo, resolve_out_path(out_path));
  return demo;
}

EvalResult run_eval(const std::string& checkpoint_path, int episodes,
                    bool deterministic, std::uint64_t seed,
                    const std::string& demo_path, const std::string& out_csv) {
  if (episodes < 1) throw ConfigError("episodes must be >= 1");
  PolicyCheckpoint ckpt = load_policy_checkpoint(checkpoint_path);
  auto env = make_env(ckpt.env_id, ckpt.variant, seed);

  Demonstration demo;
  bool have_demo = false;
  if (!demo_path.empty()) {
    demo = load_demonstration(demo_path);
    check_demo_matches_env(demo, env->spec());
    have_demo = true;
  }

  EvalResult eval = evaluate_policy(
      *env, ckpt.params, ckpt.norm, ckpt.phase_period,
      ckpt.has_prior ? &ckpt.prior : nullptr, have_demo ? &demo : nullptr,
      ckpt.w_full, episodes, deterministic, seed);
  if (!out_csv.empty()) {
    write_text_file(resolve_out_path(out_csv), eval_csv(eval));
  }
  return eval;
}

SweepResult run_sweep(const ExperimentConfig& base, const std::string& param,
                      const std::vector<double>& values,
                      const std::function<void(const SeedOutcome&)>& on_seed) {
  if (param != "w_full" && param != "latent_dim") {
    throw ConfigError("sweep param must be w_full or latent_dim, got '" + param +
                      "'");
  }
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  if (!mode_uses_prior(base.mode)) {
    throw ConfigError("sweep over " + param + " requires a latent mode");
  }

  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ConfigError("sweep values must be distinct");
  }
  for (double v : sorted) {
    if (param == "w_full") {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ConfigError("w_full sweep values must lie in [0, 1]");
      }
    } else {
      if (v != std::floor(v) || v < 1.0) {
        throw ConfigError("latent_dim sweep values must be integers >= 1");
      }
    }
  }
  if (param == "latent_dim" && !base.prior_path.empty()) {
    throw ConfigError("latent_dim sweep retrains the prior; drop prior = <path>");
  }

  SweepResult result;
  result.out_dir = resolve_out_path(base.out_dir);
  fs::create_directories(fs::path(result.out_dir) / "reports");

  std::vector<std::string> labels;
  std::vector<double> means;
  std::ostringstream csv;
  csv << "value,mean,std,median,iqr\n";
  for (double v : sorted) {
    ExperimentConfig sub = base;
    std::string label;
    if (param == "w_full") {
      sub.w_full = v;
      label = format_double(v);
    } else {
      sub.latent_dim = static_cast<int>(v);
      label = std::to_string(static_cast<int>(v));
    }
    sub.out_dir = (fs::path(result.out_dir) / (param + "_" + label)).string();
    TrainRunResult run = run_train(sub, on_seed);
    result.values.push_back(v);
    result.stats.push_back(run.task_return);
    labels.push_back(label);
    means.push_back(run.task_return.mean);
    csv << label << ',' << format_double(run.task_return.mean) << ','
        << format_double(run.task_return.stddev) << ','
        << format_double(run.task_return.median) << ','
        << format_double(run.task_return.iqr) << "\n";
  }
  write_text_file(
      (fs::path(result.out_dir) / "reports" / ("sweep_" + param + ".csv")).string(),
      csv.str());
  write_bar_chart(
      (fs::path(result.out_dir) / "reports" / ("sweep_" + param + ".svg")).string(),
      base.env_id + " " + base.mode + " sweep over " + param, labels, means);
  return result;
}

}  // namespace gaitprior
