#include "gaitprior/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "gaitprior/errors.hpp"

namespace gaitprior {

namespace {

using nlohmann::json;

constexpr const char* kMagic = "gaitprior-checkpoint";
constexpr int kFormatVersion = 1;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows, const std::string& what) {
  if (!rows.is_array() || rows.empty()) throw ConfigError("checkpoint: bad matrix " + what);
  const std::size_t n_cols = rows[0].size();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n_cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!rows[r].is_array() || rows[r].size() != n_cols) {
      throw ConfigError("checkpoint: ragged matrix " + what);
    }
    for (std::size_t c = 0; c < n_cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c].get<double>();
    }
  }
  return m;
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const json& arr, const std::string& what) {
  if (!arr.is_array()) throw ConfigError("checkpoint: bad vector " + what);
  Vector v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return v;
}

json mlp_to_json(const Mlp& net) {
  json doc;
  doc["layer_sizes"] = net.layer_sizes;
  json weights = json::array();
  json biases = json::array();
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    weights.push_back(matrix_to_json(net.weights[l]));
    biases.push_back(vector_to_json(net.biases[l]));
  }
  doc["weights"] = std::move(weights);
  doc["biases"] = std::move(biases);
  return doc;
}

Mlp mlp_from_json(const json& doc, const std::string& what) {
  Mlp net;
  net.layer_sizes = doc.at("layer_sizes").get<std::vector<int>>();
  if (net.layer_sizes.size() < 2) throw ConfigError("checkpoint: " + what + " has too few layers");
  const json& weights = doc.at("weights");
  const json& biases = doc.at("biases");
  if (weights.size() != net.layer_sizes.size() - 1 || biases.size() != weights.size()) {
    throw ConfigError("checkpoint: " + what + " layer count mismatch");
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    Matrix w = matrix_from_json(weights[l], what);
    Vector b = vector_from_json(biases[l], what);
    if (w.rows() != net.layer_sizes[l + 1] || w.cols() != net.layer_sizes[l] ||
        b.size() != net.layer_sizes[l + 1]) {
      throw ConfigError("checkpoint: " + what + " layer " + std::to_string(l) +
                        " shape mismatch");
    }
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

json prior_to_json(const LatentActionPrior& prior) {
  json doc;
  doc["latent_dim"] = prior.latent_dim;
  doc["full_dim"] = prior.full_dim;
  doc["full_action_weight"] = prior.full_action_weight;
  doc["source_demo_id"] = prior.source_demo_id;
  doc["final_loss"] = prior.final_loss;
  doc["encoder"] = mlp_to_json(prior.encoder);
  doc["decoder"] = mlp_to_json(prior.decoder);
  return doc;
}

LatentActionPrior prior_from_json(const json& doc) {
  LatentActionPrior prior;
  prior.latent_dim = doc.at("latent_dim").get<int>();
  prior.full_dim = doc.at("full_dim").get<int>();
  prior.full_action_weight = doc.at("full_action_weight").get<double>();
  prior.source_demo_id = doc.at("source_demo_id").get<std::string>();
  prior.final_loss = doc.at("final_loss").get<double>();
  prior.encoder = mlp_from_json(doc.at("encoder"), "encoder");
  prior.decoder = mlp_from_json(doc.at("decoder"), "decoder");
  if (prior.encoder.input_dim() != prior.full_dim ||
      prior.encoder.output_dim() != prior.latent_dim ||
      prior.decoder.input_dim() != prior.latent_dim ||
      prior.decoder.output_dim() != prior.full_dim) {
    throw ConfigError("checkpoint: prior dimensions are inconsistent");
  }
  return prior;
}

json read_checkpoint_file(const std::string& path, const std::string& expected_kind) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open checkpoint file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("checkpoint file " + path + " is not valid JSON: " + e.what());
  }
  if (!doc.contains("magic") || doc["magic"] != kMagic) {
    throw ConfigError("checkpoint file " + path + " has a bad magic string");
  }
  if (!doc.contains("format_version") || doc["format_version"].get<int>() != kFormatVersion) {
    throw ConfigError("checkpoint file " + path + " has unsupported format_version (want " +
                      std::to_string(kFormatVersion) + ")");
  }
  if (!doc.contains("kind") || doc["kind"].get<std::string>() != expected_kind) {
    throw ConfigError("checkpoint file " + path + " is not a " + expected_kind + " checkpoint");
  }
  return doc;
}

void write_checkpoint_file(const json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint file: " + path);
  out << doc.dump(1) << "\n";
  if (!out) throw std::runtime_error("write failed for checkpoint file: " + path);
}

}  // namespace

void save_prior_checkpoint(const LatentActionPrior& prior, const std::string& path) {
  json doc = prior_to_json(prior);
  doc["magic"] = kMagic;
  doc["format_version"] = kFormatVersion;
  doc["kind"] = "prior";
  write_checkpoint_file(doc, path);
}

LatentActionPrior load_prior_checkpoint(const std::string& path) {
  return prior_from_json(read_checkpoint_file(path, "prior"));
}

void save_policy_checkpoint(const PolicyCheckpoint& checkpoint, const std::string& path) {
  json doc;
  doc["magic"] = kMagic;
  doc["format_version"] = kFormatVersion;
  doc["kind"] = "policy";
  doc["a_latent"] = checkpoint.params.a_latent;
  doc["a_full"] = checkpoint.params.a_full;
  doc["pi_net"] = mlp_to_json(checkpoint.params.pi_net);
  doc["v_net"] = mlp_to_json(checkpoint.params.v_net);
  doc["log_std"] = vector_to_json(checkpoint.params.log_std);
  doc["norm"] = {{"count", checkpoint.norm.count},
                 {"mean", vector_to_json(checkpoint.norm.mean)},
                 {"var", vector_to_json(checkpoint.norm.var)},
                 {"clip", checkpoint.norm.clip}};
  doc["phase_period"] = checkpoint.phase_period;
  doc["env_id"] = checkpoint.env_id;
  doc["variant"] = {{"speed_multiplier", checkpoint.variant.speed_multiplier},
                    {"any_direction", checkpoint.variant.any_direction}};
  doc["mode"] = checkpoint.mode;
  doc["w_full"] = checkpoint.w_full;
  doc["w_task"] = checkpoint.weights.w_task;
  doc["w_style"] = checkpoint.weights.w_style;
  doc["config_echo"] = checkpoint.config_echo;
  doc["source_demo_id"] = checkpoint.source_demo_id;
  if (checkpoint.has_prior) doc["prior"] = prior_to_json(checkpoint.prior);
  write_checkpoint_file(doc, path);
}

PolicyCheckpoint load_policy_checkpoint(const std::string& path) {
  const json doc = read_checkpoint_file(path, "policy");
  PolicyCheckpoint c;
  c.params.a_latent = doc.at("a_latent").get<int>();
  c.params.a_full = doc.at("a_full").get<int>();
  c.params.pi_net = mlp_from_json(doc.at("pi_net"), "pi_net");
  c.params.v_net = mlp_from_json(doc.at("v_net"), "v_net");
  c.params.log_std = vector_from_json(doc.at("log_std"), "log_std");
  const json& norm = doc.at("norm");
  c.norm.count = norm.at("count").get<double>();
  c.norm.mean = vector_from_json(norm.at("mean"), "norm.mean");
  c.norm.var = vector_from_json(norm.at("var"), "norm.var");
  c.norm.clip = norm.at("clip").get<double>();
  c.phase_period = doc.at("phase_period").get<int>();
  c.env_id = doc.at("env_id").get<std::string>();
  c.variant.speed_multiplier = doc.at("variant").at("speed_multiplier").get<int>();
  c.variant.any_direction = doc.at("variant").at("any_direction").get<bool>();
  c.mode = doc.at("mode").get<std::string>();
  c.w_full = doc.at("w_full").get<double>();
  c.weights.w_task = doc.at("w_task").get<double>();
  c.weights.w_style = doc.at("w_style").get<double>();
  c.config_echo = doc.at("config_echo").get<std::string>();
  c.source_demo_id = doc.at("source_demo_id").get<std::string>();
  if (doc.contains("prior")) {
    c.has_prior = true;
    c.prior = prior_from_json(doc.at("prior"));
  }
  if (c.params.log_std.size() != c.params.head_dim()) {
    throw ConfigError("checkpoint: log_std length does not match the action head");
  }
  return c;
}

}  // namespace gaitprior
