#include "gaitprior/demo.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "gaitprior/errors.hpp"

namespace gaitprior {

using nlohmann::json;

namespace {

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw ConfigError(where + ": expected an array of numbers");
  Vector v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw ConfigError(where + ": non-numeric entry");
    v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  }
  return v;
}

}  // namespace

void validate_demonstration(const Demonstration& demo) {
  if (demo.env_id.empty()) throw ConfigError("demonstration: env_id is empty");
  if (!(demo.dt > 0.0) || !std::isfinite(demo.dt)) {
    throw ConfigError("demonstration: dt must be a positive finite number");
  }
  if (demo.n_frames < 2) {
    throw ConfigError("demonstration: n_frames must be >= 2, got " +
                      std::to_string(demo.n_frames));
  }
  if (demo.action_dim <= 0 || demo.pose_dim <= 0) {
    throw ConfigError("demonstration: action_dim and pose_dim must be positive");
  }
  if (static_cast<int>(demo.frames.size()) != demo.n_frames) {
    throw ConfigError("demonstration: frame count " + std::to_string(demo.frames.size()) +
                      " does not match declared n_frames " + std::to_string(demo.n_frames));
  }
  if (static_cast<int>(demo.pose_names.size()) != demo.pose_dim) {
    throw ConfigError("demonstration: pose_names length does not match pose_dim");
  }
  for (int t = 0; t < demo.n_frames; ++t) {
    const DemoFrame& f = demo.frames[t];
    if (f.a.size() != demo.action_dim) {
      throw ConfigError("demonstration frame " + std::to_string(t) + ": action length " +
                        std::to_string(f.a.size()) + " != action_dim " +
                        std::to_string(demo.action_dim));
    }
    if (f.q.size() != demo.pose_dim) {
      throw ConfigError("demonstration frame " + std::to_string(t) + ": pose length " +
                        std::to_string(f.q.size()) + " != pose_dim " +
                        std::to_string(demo.pose_dim));
    }
    if (!f.a.allFinite() || !f.q.allFinite()) {
      throw ConfigError("demonstration frame " + std::to_string(t) +
                        ": non-finite value");
    }
  }
}

Demonstration load_demonstration(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open demonstration file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("demonstration parse error in " + path + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("meta") || !doc.contains("frames")) {
    throw ConfigError("demonstration file " + path + ": expected {meta, frames}");
  }
  const json& meta = doc["meta"];
  Demonstration demo;
  try {
    demo.env_id = meta.at("env_id").get<std::string>();
    demo.dt = meta.at("dt").get<double>();
    demo.n_frames = meta.at("n_frames").get<int>();
    demo.action_dim = meta.at("action_dim").get<int>();
    demo.pose_dim = meta.at("pose_dim").get<int>();
    demo.pose_names = meta.at("pose_names").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ConfigError("demonstration meta in " + path + ": " + e.what());
  }
  const json& frames = doc["frames"];
  if (!frames.is_array()) throw ConfigError("demonstration file: frames must be an array");
  int index = 0;
  for (const json& f : frames) {
    DemoFrame frame;
    const std::string where = "frame " + std::to_string(index);
    if (!f.is_object() || !f.contains("a") || !f.contains("q")) {
      throw ConfigError("demonstration " + where + ": expected {a, q}");
    }
    frame.a = vector_from_json(f["a"], where + " actions");
    frame.q = vector_from_json(f["q"], where + " pose");
    demo.frames.push_back(std::move(frame));
    ++index;
  }
  validate_demonstration(demo);
  return demo;
}

void save_demonstration(const Demonstration& demo, const std::string& path) {
  validate_demonstration(demo);
  json doc;
  doc["meta"] = {{"env_id", demo.env_id},   {"dt", demo.dt},
                 {"n_frames", demo.n_frames}, {"action_dim", demo.action_dim},
                 {"pose_dim", demo.pose_dim}, {"pose_names", demo.pose_names}};
  json frames = json::array();
  for (const DemoFrame& f : demo.frames) {
    frames.push_back({{"a", vector_to_json(f.a)}, {"q", vector_to_json(f.q)}});
  }
  doc["frames"] = std::move(frames);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write demonstration file: " + path);
  out << doc.dump(1) << "\n";
  if (!out) throw std::runtime_error("write failed for demonstration file: " + path);
}

Matrix actions_matrix(const Demonstration& demo) {
  Matrix m(demo.n_frames, demo.action_dim);
  for (int t = 0; t < demo.n_frames; ++t) m.row(t) = demo.frames[t].a.transpose();
  return m;
}

bool demonstrations_equal(const Demonstration& a, const Demonstration& b) {
  if (a.env_id != b.env_id || a.dt != b.dt || a.n_frames != b.n_frames ||
      a.action_dim != b.action_dim || a.pose_dim != b.pose_dim ||
      a.pose_names != b.pose_names) {
    return false;
  }
  for (int t = 0; t < a.n_frames; ++t) {
    if (a.frames[t].a != b.frames[t].a || a.frames[t].q != b.frames[t].q) return false;
  }
  return true;
}

std::string demonstration_id(const Demonstration& demo) {
  // FNV-1a over the action bytes; enough to detect a swapped demonstration.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const DemoFrame& f : demo.frames) {
    mix(f.a.data(), sizeof(double) * static_cast<std::size_t>(f.a.size()));
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return demo.env_id + "-" + hex;
}

}  // namespace gaitprior
