#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "gaitprior/demo.hpp"
#include "gaitprior/errors.hpp"
#include "json.hpp"

using namespace gaitprior;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  fs::path dir = fs::temp_directory_path() / "gaitprior_test_demo_io";
  fs::create_directories(dir);
  return dir;
}

Demonstration tiny_demo() {
  Demonstration demo;
  demo.env_id = "point_gait";
  demo.dt = 0.02;
  demo.n_frames = 4;
  demo.action_dim = 2;
  demo.pose_dim = 3;
  demo.pose_names = {"limb0_sin", "limb0_cos", "velocity"};
  for (int t = 0; t < 4; ++t) {
    DemoFrame frame;
    frame.a = Vector(2);
    frame.a << 1.0 / 3.0 - 0.1 * t, -std::acos(-1.0) / 4.0 + 0.05 * t;
    frame.q = Vector(3);
    frame.q << 0.125 * t, 1e-17, -2.0 / 7.0;
    demo.frames.push_back(frame);
  }
  return demo;
}

Demonstration random_demo(int frames, int action_dim, std::uint64_t seed) {
  Demonstration demo;
  demo.env_id = "planar_hopper";
  demo.dt = 0.01;
  demo.n_frames = frames;
  demo.action_dim = action_dim;
  demo.pose_dim = 2;
  demo.pose_names = {"pitch", "height"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int t = 0; t < frames; ++t) {
    DemoFrame frame;
    frame.a = Vector(action_dim);
    for (int i = 0; i < action_dim; ++i) frame.a(i) = dist(rng);
    frame.q = Vector(2);
    frame.q << dist(rng), dist(rng);
    demo.frames.push_back(frame);
  }
  return demo;
}

}  // namespace

//round trips

TEST_CASE("save and load reproduce every double bit for bit") {
  fs::path path = temp_dir() / "tiny.json";
  Demonstration demo = tiny_demo();
  save_demonstration(demo, path.string());
  Demonstration loaded = load_demonstration(path.string());
  CHECK(demonstrations_equal(demo, loaded));
  CHECK(loaded.env_id == demo.env_id);
  CHECK(loaded.dt == demo.dt);
  CHECK(loaded.pose_names == demo.pose_names);
  for (int t = 0; t < demo.n_frames; ++t) {
    for (int i = 0; i < demo.action_dim; ++i) CHECK(loaded.frames[t].a(i) == demo.frames[t].a(i));
    for (int i = 0; i < demo.pose_dim; ++i) CHECK(loaded.frames[t].q(i) == demo.frames[t].q(i));
  }
}

TEST_CASE("a 106 frame random demo survives the round trip exactly") {
  fs::path path = temp_dir() / "large.json";
  Demonstration demo = random_demo(106, 4, 20240817);
  save_demonstration(demo, path.string());
  Demonstration loaded = load_demonstration(path.string());
  REQUIRE(loaded.n_frames == 106);
  for (int t = 0; t < 106; ++t)
    for (int i = 0; i < 4; ++i) CHECK(loaded.frames[t].a(i) == demo.frames[t].a(i));
}

TEST_CASE("the on-disk layout keeps meta and frames keys") {
  fs::path path = temp_dir() / "schema.json";
  save_demonstration(tiny_demo(), path.string());
  std::ifstream in(path);
  nlohmann::json doc = nlohmann::json::parse(in);
  REQUIRE(doc.contains("meta"));
  REQUIRE(doc.contains("frames"));
  CHECK(doc["meta"]["env_id"] == "point_gait");
  CHECK(doc["meta"]["dt"] == 0.02);
  CHECK(doc["meta"]["n_frames"] == 4);
  CHECK(doc["meta"]["action_dim"] == 2);
  CHECK(doc["meta"]["pose_dim"] == 3);
  CHECK(doc["meta"]["pose_names"].size() == 3);
  REQUIRE(doc["frames"].is_array());
  REQUIRE(doc["frames"].size() == 4);
  CHECK(doc["frames"][0].contains("a"));
  CHECK(doc["frames"][0].contains("q"));
  CHECK(doc["frames"][0]["a"].size() == 2);
  CHECK(doc["frames"][0]["q"].size() == 3);
}

//validation

TEST_CASE("a NaN action is rejected naming the frame") {
  Demonstration demo = tiny_demo();
  demo.frames[3].a(1) = std::numeric_limits<double>::quiet_NaN();
  try {
    validate_demonstration(demo);
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("frame 3") != std::string::npos);
  }
}

TEST_CASE("a wrong action length is rejected naming the frame") {
  Demonstration demo = tiny_demo();
  demo.frames[2].a = Vector::Zero(5);
  try {
    validate_demonstration(demo);
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("frame 2") != std::string::npos);
  }
}

TEST_CASE("metadata inconsistencies are rejected") {
  Demonstration demo = tiny_demo();
  demo.n_frames = 1;
  demo.frames.resize(1);
  CHECK_THROWS_AS(validate_demonstration(demo), ConfigError);

  demo = tiny_demo();
  demo.n_frames = 7;
  CHECK_THROWS_AS(validate_demonstration(demo), ConfigError);

  demo = tiny_demo();
  demo.dt = 0.0;
  CHECK_THROWS_AS(validate_demonstration(demo), ConfigError);

  demo = tiny_demo();
  demo.pose_names.pop_back();
  CHECK_THROWS_AS(validate_demonstration(demo), ConfigError);

  demo = tiny_demo();
  demo.env_id.clear();
  CHECK_THROWS_AS(validate_demonstration(demo), ConfigError);
}

TEST_CASE("loading bad files raises ConfigError") {
  CHECK_THROWS_AS(load_demonstration((temp_dir() / "missing.json").string()), ConfigError);

  fs::path garbled = temp_dir() / "garbled.json";
  std::ofstream(garbled) << "{ not json";
  CHECK_THROWS_AS(load_demonstration(garbled.string()), ConfigError);

  fs::path no_meta = temp_dir() / "no_meta.json";
  std::ofstream(no_meta) << "{\"frames\": []}";
  CHECK_THROWS_AS(load_demonstration(no_meta.string()), ConfigError);
}

//views and identity

TEST_CASE("actions_matrix stacks frames as rows") {
  Demonstration demo = tiny_demo();
  demo.frames[0].a << 0.25, -0.5;
  demo.frames[1].a << 1.0, 0.125;
  Matrix actions = actions_matrix(demo);
  REQUIRE(actions.rows() == 4);
  REQUIRE(actions.cols() == 2);
  CHECK(actions(0, 0) == 0.25);
  CHECK(actions(0, 1) == -0.5);
  CHECK(actions(1, 0) == 1.0);
  CHECK(actions(1, 1) == 0.125);
}

TEST_CASE("demonstration ids are stable and action sensitive") {
  Demonstration demo = tiny_demo();
  std::string id1 = demonstration_id(demo);
  std::string id2 = demonstration_id(demo);
  CHECK(id1 == id2);
  CHECK(id1.rfind("point_gait-", 0) == 0);
  CHECK(id1.size() == std::string("point_gait-").size() + 16);

  Demonstration other = tiny_demo();
  other.frames[1].a(0) += 1e-12;
  CHECK(demonstration_id(other) != id1);

  Demonstration poses_differ = tiny_demo();
  poses_differ.frames[1].q(0) += 1.0;
  CHECK(demonstration_id(poses_differ) == id1);
}

TEST_CASE("demonstrations_equal spots any field change") {
  Demonstration a = tiny_demo();
  CHECK(demonstrations_equal(a, tiny_demo()));
  Demonstration b = tiny_demo();
  b.dt = 0.03;
  CHECK_FALSE(demonstrations_equal(a, b));
  Demonstration c = tiny_demo();
  c.frames[0].q(1) = 0.5;
  CHECK_FALSE(demonstrations_equal(a, c));
}
