#include "gaitprior/envs.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "gaitprior/errors.hpp"
#include "gaitprior/rng.hpp"

namespace gaitprior {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

double clip(double x, double lo, double hi) { return std::min(hi, std::max(lo, x)); }

double wrap_positive(double angle) {
  angle = std::fmod(angle, kTwoPi);
  if (angle < 0.0) angle += kTwoPi;
  return angle;
}

Vector clipped_action(const Vector& action, int dim) {
  if (action.size() != dim) {
    throw std::invalid_argument("step: action length " + std::to_string(action.size()) +
                                ", expected " + std::to_string(dim));
  }
  return action.cwiseMax(-1.0).cwiseMin(1.0);
}

void check_variant(const std::string& id, const EnvVariant& variant) {
  if (variant.speed_multiplier < 1 || variant.speed_multiplier > 4) {
    throw ConfigError("speed_multiplier must be in {1, 2, 3, 4}");
  }
  if (variant.any_direction && id != "point_gait_2d") {
    throw ConfigError("any_direction is only available for point_gait_2d");
  }
}

/// File-local base adding the travelled distance hook needed to measure the
/// expert's reference speed.
class BasicEnv : public Env {
 public:
  double x_position() const { return x_; }

 protected:
  double x_ = 0.0;
  std::mt19937_64 rng_{0};
  int step_count_ = 0;
};

class PointGaitEnv final : public BasicEnv {
 public:
  PointGaitEnv(const EnvVariant& variant, std::uint64_t seed, double v_ref)
      : variant_(variant), v_ref_(v_ref) {
    spec_.id = "point_gait";
    spec_.obs_dim = 4;
    spec_.action_dim = 4;
    spec_.dt = 0.02;
    spec_.max_episode_steps = 400;
    spec_.pose_dim = 5;
    spec_.pose_names = {"limb0_sin", "limb0_cos", "limb1_sin", "limb1_cos", "velocity"};
    rng_.seed(seed);
  }

  const EnvSpec& spec() const override { return spec_; }

  Vector reset(std::uint64_t seed) override {
    rng_.seed(seed);
    return reset();
  }

  Vector reset() override {
    x_ = 0.0;
    v_ = 0.0;
    p1_ = 0.0;
    p2_ = kPi;
    step_count_ = 0;
    return observation();
  }

  Transition step(const Vector& action) override {
    const Vector a = clipped_action(action, spec_.action_dim);
    const bool stance1 = std::sin(p1_) >= 0.0;
    const bool stance2 = std::sin(p2_) >= 0.0;
    double u = 0.0;
    if (stance1) u += 0.5 * (a[0] - a[1]);
    if (stance2) u += 0.5 * (a[2] - a[3]);
    p1_ = wrap_positive(p1_ + (1.0 + a[0] - a[1]) * kOmega0 * spec_.dt);
    p2_ = wrap_positive(p2_ + (1.0 + a[2] - a[3]) * kOmega0 * spec_.dt);
    v_ += spec_.dt * (u - kDrag * v_);
    x_ += spec_.dt * v_;
    ++step_count_;

    Transition tr;
    tr.observation = observation();
    tr.pose = pose();
    if (variant_.speed_multiplier == 1) {
      tr.task_reward = v_ - 0.05 * a.squaredNorm();
    } else {
      const double target = variant_.speed_multiplier * v_ref_;
      tr.task_reward = std::exp(-(v_ - target) * (v_ - target));
    }
    tr.terminated = step_count_ > kStallGraceSteps && v_ < kStallSpeed;
    tr.truncated = !tr.terminated && step_count_ >= spec_.max_episode_steps;
    return tr;
  }

  Vector pose() const override {
    Vector q(5);
    q << std::sin(p1_), std::cos(p1_), std::sin(p2_), std::cos(p2_), v_;
    return q;
  }

 private:
  Vector observation() const {
    Vector o(4);
    o << std::sin(p1_), std::cos(p1_), std::sin(p2_), std::cos(p2_);
    return o;
  }

  static constexpr double kOmega0 = kTwoPi;
  static constexpr double kDrag = 0.5;
  static constexpr int kStallGraceSteps = 150;
  static constexpr double kStallSpeed = 0.5;
  EnvSpec spec_;
  EnvVariant variant_;
  double v_ref_ = 0.0;
  double v_ = 0.0;
  double p1_ = 0.0;
  double p2_ = 0.0;
};

class PointGait2dEnv final : public BasicEnv {
 public:
  PointGait2dEnv(const EnvVariant& variant, std::uint64_t seed, double v_ref)
      : variant_(variant), v_ref_(v_ref) {
    spec_.id = "point_gait_2d";
    spec_.obs_dim = 6;
    spec_.action_dim = 6;
    spec_.dt = 0.02;
    spec_.max_episode_steps = 400;
    spec_.pose_dim = 5;
    spec_.pose_names = {"limb0_sin", "limb0_cos", "limb1_sin", "limb1_cos", "velocity"};
    rng_.seed(seed);
  }

  const EnvSpec& spec() const override { return spec_; }

  Vector reset(std::uint64_t seed) override {
    rng_.seed(seed);
    return reset();
  }

  Vector reset() override {
    x_ = 0.0;
    y_ = 0.0;
    theta_ = 0.0;
    vx_ = 0.0;
    vy_ = 0.0;
    p1_ = 0.0;
    p2_ = kPi;
    target_ = variant_.any_direction ? uniform01(rng_) * kTwoPi : 0.0;
    step_count_ = 0;
    return observation();
  }

  Transition step(const Vector& action) override {
    const Vector a = clipped_action(action, spec_.action_dim);
    const bool stance1 = std::sin(p1_) >= 0.0;
    const bool stance2 = std::sin(p2_) >= 0.0;
    double u = 0.0;
    if (stance1) u += 0.5 * (a[0] - a[1]);
    if (stance2) u += 0.5 * (a[2] - a[3]);
    p1_ = wrap_positive(p1_ + (1.0 + a[0] - a[1]) * kOmega0 * spec_.dt);
    p2_ = wrap_positive(p2_ + (1.0 + a[2] - a[3]) * kOmega0 * spec_.dt);
    theta_ = wrap_positive(theta_ + spec_.dt * kSteerRate * (a[4] - a[5]));
    const double hx = std::cos(theta_);
    const double hy = std::sin(theta_);
    vx_ += spec_.dt * (u * hx - kDrag * vx_);
    vy_ += spec_.dt * (u * hy - kDrag * vy_);
    x_ += spec_.dt * vx_;
    y_ += spec_.dt * vy_;
    ++step_count_;

    Transition tr;
    tr.observation = observation();
    tr.pose = pose();
    const double along = vx_ * std::cos(target_) + vy_ * std::sin(target_);
    if (variant_.speed_multiplier == 1) {
      tr.task_reward = along - 0.05 * a.squaredNorm();
    } else {
      const double target_speed = variant_.speed_multiplier * v_ref_;
      tr.task_reward = std::exp(-(along - target_speed) * (along - target_speed));
    }
    tr.terminated = step_count_ > kStallGraceSteps && forward_speed() < kStallSpeed;
    tr.truncated = !tr.terminated && step_count_ >= spec_.max_episode_steps;
    return tr;
  }

  Vector pose() const override {
    Vector q(5);
    q << std::sin(p1_), std::cos(p1_), std::sin(p2_), std::cos(p2_), forward_speed();
    return q;
  }

 private:
  double forward_speed() const {
    return vx_ * std::cos(theta_) + vy_ * std::sin(theta_);
  }

  Vector observation() const {
    const double rel = target_ - theta_;
    Vector o(6);
    o << std::sin(p1_), std::cos(p1_), std::sin(p2_), std::cos(p2_),
        std::cos(rel), std::sin(rel);
    return o;
  }

  static constexpr double kOmega0 = kTwoPi;
  static constexpr double kDrag = 0.5;
  static constexpr double kSteerRate = 2.0;
  static constexpr int kStallGraceSteps = 150;
  static constexpr double kStallSpeed = 0.5;
  EnvSpec spec_;
  EnvVariant variant_;
  double v_ref_ = 0.0;
  double y_ = 0.0;
  double theta_ = 0.0;
  double vx_ = 0.0;
  double vy_ = 0.0;
  double p1_ = 0.0;
  double p2_ = 0.0;
  double target_ = 0.0;
};

class PlanarHopperEnv final : public BasicEnv {
 public:
  PlanarHopperEnv(const EnvVariant& variant, std::uint64_t seed, double v_ref)
      : variant_(variant), v_ref_(v_ref) {
    spec_.id = "planar_hopper";
    spec_.obs_dim = 11;
    spec_.action_dim = 4;
    spec_.dt = 0.01;
    spec_.max_episode_steps = 500;
    spec_.pose_dim = 6;
    spec_.pose_names = {"height", "pitch", "leg0_angle", "leg1_angle",
                        "leg0_length", "leg1_length"};
    rng_.seed(seed);
  }

  const EnvSpec& spec() const override { return spec_; }

  Vector reset(std::uint64_t seed) override {
    rng_.seed(seed);
    return reset();
  }

  Vector reset() override {
    x_ = 0.0;
    z_ = 0.52 + 0.02 * (uniform01(rng_) - 0.5);
    theta_ = 0.1 * (uniform01(rng_) - 0.5);
    vx_ = 0.0;
    vz_ = 0.0;
    omega_ = 0.0;
    for (int i = 0; i < 2; ++i) {
      alpha_[i] = 0.0;
      len_[i] = kRestLength;
      contact_[i] = false;
    }
    step_count_ = 0;
    return observation();
  }

  Transition step(const Vector& action) override {
    const Vector a = clipped_action(action, spec_.action_dim);
    const double dt = spec_.dt;

    double alpha_rate[2];
    double len_rate[2];
    for (int i = 0; i < 2; ++i) {
      const double tau = kTorqueScale * a[2 * i];
      const double thrust = kForceScale * a[2 * i + 1];
      const double target_alpha =
          clip(alpha_[i] + dt * (tau - kAlphaSpring * alpha_[i]) / kAlphaDamp,
               -kAlphaLimit, kAlphaLimit);
      const double target_len =
          clip(len_[i] + dt * (thrust - kLenSpring * (len_[i] - kRestLength)) / kLenDamp,
               kMinLength, kMaxLength);
      alpha_rate[i] = (target_alpha - alpha_[i]) / dt;
      len_rate[i] = (target_len - len_[i]) / dt;
      alpha_[i] = target_alpha;
      len_[i] = target_len;
    }

    const double c = std::cos(theta_);
    const double s = std::sin(theta_);
    double fx = 0.0;
    double fz = 0.0;
    double torque = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double hip = kHipOffset[i];
      const double phi = theta_ + alpha_[i];
      const double ux = std::sin(phi);
      const double uz = -std::cos(phi);
      const double rfx = c * hip + len_[i] * ux;
      const double rfz = s * hip + len_[i] * uz;
      const double foot_z = z_ + rfz;
      contact_[i] = foot_z < 0.0;
      if (!contact_[i]) continue;
      const double swing = omega_ + alpha_rate[i];
      const double vfx = vx_ - omega_ * rfz + len_rate[i] * ux + len_[i] * swing * std::cos(phi);
      const double vfz = vz_ + omega_ * rfx + len_rate[i] * uz + len_[i] * swing * std::sin(phi);
      double fn = -kGroundSpring * foot_z - kGroundDamp * vfz;
      fn = std::max(fn, 0.0);
      double ft = -kTangentDamp * vfx;
      ft = clip(ft, -kFriction * fn, kFriction * fn);
      fx += ft;
      fz += fn;
      torque += rfx * fn - rfz * ft;
    }

    vx_ += dt * fx / kMass;
    vz_ += dt * (fz / kMass - kGravity);
    omega_ += dt * torque / kInertia;
    x_ += dt * vx_;
    z_ += dt * vz_;
    theta_ += dt * omega_;
    ++step_count_;

    const bool finite = std::isfinite(x_) && std::isfinite(z_) && std::isfinite(theta_) &&
                        std::isfinite(vx_) && std::isfinite(vz_) && std::isfinite(omega_);
    Transition tr;
    tr.observation = observation();
    tr.pose = pose();
    if (variant_.speed_multiplier == 1) {
      tr.task_reward = vx_ + 0.5 - 0.05 * a.squaredNorm();
    } else {
      const double target = variant_.speed_multiplier * v_ref_;
      tr.task_reward = std::exp(-(vx_ - target) * (vx_ - target)) + 0.5 - 0.05 * a.squaredNorm();
    }
    tr.terminated = !finite || z_ < 0.3 || std::abs(theta_) > 1.0;
    tr.truncated = step_count_ >= spec_.max_episode_steps;
    if (!finite) tr.task_reward = 0.0;
    return tr;
  }

  Vector pose() const override {
    Vector q(6);
    q << z_, theta_, alpha_[0], alpha_[1], len_[0], len_[1];
    return q;
  }

 private:
  Vector observation() const {
    Vector o(11);
    o << z_, theta_, vx_, vz_, omega_, alpha_[0], alpha_[1], len_[0], len_[1],
        contact_[0] ? 1.0 : 0.0, contact_[1] ? 1.0 : 0.0;
    return o;
  }

  static constexpr double kMass = 10.0;
  static constexpr double kInertia = 1.0;
  static constexpr double kGravity = 9.81;
  static constexpr double kHipOffset[2] = {0.2, -0.2};
  static constexpr double kTorqueScale = 20.0;
  static constexpr double kForceScale = 200.0;
  static constexpr double kAlphaSpring = 10.0;
  static constexpr double kAlphaDamp = 2.0;
  static constexpr double kAlphaLimit = 0.8;
  static constexpr double kLenSpring = 500.0;
  static constexpr double kLenDamp = 100.0;
  static constexpr double kRestLength = 0.5;
  static constexpr double kMinLength = 0.3;
  static constexpr double kMaxLength = 0.7;
  static constexpr double kGroundSpring = 4000.0;
  static constexpr double kGroundDamp = 100.0;
  static constexpr double kTangentDamp = 100.0;
  static constexpr double kFriction = 1.0;
  EnvSpec spec_;
  EnvVariant variant_;
  double v_ref_ = 0.0;
  double z_ = 0.0;
  double theta_ = 0.0;
  double vx_ = 0.0;
  double vz_ = 0.0;
  double omega_ = 0.0;
  double alpha_[2] = {0.0, 0.0};
  double len_[2] = {kRestLength, kRestLength};
  bool contact_[2] = {false, false};
};

std::unique_ptr<BasicEnv> make_basic_env(const std::string& id, const EnvVariant& variant,
                                         std::uint64_t seed, double v_ref) {
  if (id == "point_gait") return std::make_unique<PointGaitEnv>(variant, seed, v_ref);
  if (id == "point_gait_2d") return std::make_unique<PointGait2dEnv>(variant, seed, v_ref);
  if (id == "planar_hopper") return std::make_unique<PlanarHopperEnv>(variant, seed, v_ref);
  std::string known;
  for (const std::string& e : available_envs()) {
    if (!known.empty()) known += ", ";
    known += e;
  }
  throw ConfigError("unknown env id '" + id + "' (available: " + known + ")");
}

std::vector<double> json_doubles(const json& arr, const std::string& key,
                                 const std::string& path) {
  if (!arr.is_array()) throw ConfigError("oscillator file " + path + ": '" + key + "' must be an array");
  std::vector<double> out;
  for (const json& v : arr) {
    if (!v.is_number()) throw ConfigError("oscillator file " + path + ": '" + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

std::vector<std::string> available_envs() {
  return {"point_gait", "point_gait_2d", "planar_hopper"};
}

std::unique_ptr<Env> make_env(const std::string& id, const EnvVariant& variant,
                              std::uint64_t seed) {
  check_variant(id, variant);
  double v_ref = 0.0;
  if (variant.speed_multiplier > 1) v_ref = reference_speed(id);
  return make_basic_env(id, variant, seed, v_ref);
}

void validate_oscillator(const OscillatorConfig& config) {
  if (!(config.frequency > 0.0) || !std::isfinite(config.frequency)) {
    throw ConfigError("oscillator frequency must be positive and finite");
  }
  const std::size_t n = config.amplitude.size();
  if (n == 0) throw ConfigError("oscillator needs at least one actuator channel");
  if (config.phase.size() != n || config.offset.size() != n) {
    throw ConfigError("oscillator amplitude/phase/offset lengths differ");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double a = config.amplitude[i];
    const double p = config.phase[i];
    const double b = config.offset[i];
    if (!std::isfinite(a) || !std::isfinite(p) || !std::isfinite(b)) {
      throw ConfigError("oscillator channel " + std::to_string(i) + " has non-finite values");
    }
    if (std::abs(a) + std::abs(b) > 1.0 + 1e-12) {
      throw ConfigError("oscillator channel " + std::to_string(i) +
                        " violates |amplitude| + |offset| <= 1");
    }
  }
}

Vector oscillator_action(const OscillatorConfig& config, double t) {
  const std::size_t n = config.amplitude.size();
  Vector a(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    a[static_cast<Eigen::Index>(i)] =
        config.offset[i] +
        config.amplitude[i] * std::sin(kTwoPi * config.frequency * t + config.phase[i]);
  }
  return a;
}

OscillatorConfig default_oscillator_config(const std::string& env_id) {
  OscillatorConfig c;
  if (env_id == "point_gait") {
    c.frequency = 1.0;
    c.amplitude = {0.5, 0.5, 0.5, 0.5};
    c.phase = {0.375 * kPi, 1.375 * kPi, 0.375 * kPi + kPi / 3,
               1.375 * kPi + kPi / 3};
    c.offset = {0.5, -0.5, 0.5, -0.5};
  } else if (env_id == "point_gait_2d") {
    c.frequency = 1.0;
    c.amplitude = {0.5, 0.5, 0.5, 0.5, 0.0, 0.0};
    c.phase = {0.375 * kPi, 1.375 * kPi, 0.375 * kPi + kPi / 3,
               1.375 * kPi + kPi / 3, 0.0, 0.0};
    c.offset = {0.5, -0.5, 0.5, -0.5, 0.0, 0.0};
  } else if (env_id == "planar_hopper") {
    c.frequency = 2.5;
    c.amplitude = {0.2, 0.5, 0.2, 0.5};
    c.phase = {3.0, 0.0, 3.0, 0.0};
    c.offset = {0.0, 0.15, 0.0, 0.15};
  } else {
    make_basic_env(env_id, {}, 0, 0.0);  // throws with the available-id list
  }
  validate_oscillator(c);
  return c;
}

OscillatorConfig load_oscillator_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open oscillator file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("oscillator file " + path + " is not valid JSON: " + e.what());
  }
  OscillatorConfig c;
  if (!doc.contains("frequency") || !doc["frequency"].is_number()) {
    throw ConfigError("oscillator file " + path + ": missing numeric 'frequency'");
  }
  c.frequency = doc["frequency"].get<double>();
  for (const char* key : {"amplitude", "phase", "offset"}) {
    if (!doc.contains(key)) {
      throw ConfigError("oscillator file " + path + ": missing '" + std::string(key) + "'");
    }
  }
  c.amplitude = json_doubles(doc["amplitude"], "amplitude", path);
  c.phase = json_doubles(doc["phase"], "phase", path);
  c.offset = json_doubles(doc["offset"], "offset", path);
  validate_oscillator(c);
  return c;
}

void save_oscillator_config(const OscillatorConfig& config, const std::string& path) {
  validate_oscillator(config);
  json doc;
  doc["frequency"] = config.frequency;
  doc["amplitude"] = config.amplitude;
  doc["phase"] = config.phase;
  doc["offset"] = config.offset;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write oscillator file: " + path);
  out << doc.dump(1) << "\n";
  if (!out) throw std::runtime_error("write failed for oscillator file: " + path);
}

Demonstration generate_demonstration(Env& env, const OscillatorConfig& config,
                                     int settle_cycles, int capture_cycles) {
  validate_oscillator(config);
  const EnvSpec& sp = env.spec();
  if (static_cast<int>(config.amplitude.size()) != sp.action_dim) {
    throw ConfigError("oscillator has " + std::to_string(config.amplitude.size()) +
                      " channels, env expects " + std::to_string(sp.action_dim));
  }
  if (settle_cycles < 0 || capture_cycles < 1) {
    throw ConfigError("need settle_cycles >= 0 and capture_cycles >= 1");
  }
  const double frames_exact = 1.0 / (config.frequency * sp.dt);
  const int frames_per_cycle = static_cast<int>(std::llround(frames_exact));
  if (frames_per_cycle < 1 || std::abs(frames_exact - frames_per_cycle) > 1e-6) {
    throw ConfigError("oscillator period 1/f must be an integer multiple of dt (got " +
                      std::to_string(frames_exact) + " frames per cycle)");
  }

  Demonstration demo;
  demo.env_id = sp.id;
  demo.dt = sp.dt;
  demo.n_frames = capture_cycles * frames_per_cycle;
  demo.action_dim = sp.action_dim;
  demo.pose_dim = sp.pose_dim;
  demo.pose_names = sp.pose_names;
  demo.frames.reserve(static_cast<std::size_t>(demo.n_frames));

  env.reset(0);
  const int total = (settle_cycles + capture_cycles) * frames_per_cycle;
  const int skip = settle_cycles * frames_per_cycle;
  for (int t = 0; t < total; ++t) {
    const Vector a = oscillator_action(config, t * sp.dt);
    const Transition tr = env.step(a);
    if (!tr.observation.allFinite() || !tr.pose.allFinite()) {
      throw std::runtime_error("expert rollout went non-finite at step " + std::to_string(t));
    }
    if (t >= skip) demo.frames.push_back({a, tr.pose});
  }
  validate_demonstration(demo);
  return demo;
}

double reference_speed(const std::string& env_id) {
  static std::mutex mutex;
  static std::map<std::string, double> cache;
  std::lock_guard<std::mutex> lock(mutex);
  const auto it = cache.find(env_id);
  if (it != cache.end()) return it->second;

  const OscillatorConfig config = default_oscillator_config(env_id);
  auto env = make_basic_env(env_id, {}, 0, 0.0);
  const double dt = env->spec().dt;
  const int frames_per_cycle = static_cast<int>(std::llround(1.0 / (config.frequency * dt)));
  env->reset(0);
  const int settle = 8 * frames_per_cycle;
  for (int t = 0; t < settle; ++t) env->step(oscillator_action(config, t * dt));
  const double x0 = env->x_position();
  for (int t = settle; t < settle + frames_per_cycle; ++t) {
    env->step(oscillator_action(config, t * dt));
  }
  const double v = (env->x_position() - x0) / (frames_per_cycle * dt);
  cache[env_id] = v;
  return v;
}

}  // namespace gaitprior
