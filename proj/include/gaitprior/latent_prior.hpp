#pragma once

#include <cstdint>
#include <string>

#include "gaitprior/demo.hpp"
#include "gaitprior/nn.hpp"

namespace gaitprior {

/// Action autoencoder trained on one gait cycle. The decoder is frozen during
/// reinforcement learning; only the policy adapts.
struct LatentActionPrior {
  Mlp encoder;  // a_full -> 2*a_l -> a_l, tanh hidden, linear output
  Mlp decoder;  // a_l -> 2*a_l -> a_full, tanh hidden, linear output
  int latent_dim = 0;
  int full_dim = 0;
  double full_action_weight = 0.1;
  std::string source_demo_id;
  double final_loss = 0.0;
};

/// Soft penalty keeping latent components near [-1, 1]: zero while the
/// max-norm stays below 0.8, otherwise sum_i exp((z_i / 1.2)^10) - 1.
double norm_loss(const Vector& latent);

/// Gradient of norm_loss; zero inside the gated box.
Vector norm_loss_gradient(const Vector& latent);

/// ||a - a_hat||^2 + norm_loss(latent).
double reconstruction_loss(const Vector& a, const Vector& a_hat, const Vector& latent);

struct PriorTrainConfig {
  int epochs = 10000;
  double lr = 1e-3;
  double early_stop_loss = 1e-6;
  std::uint64_t seed = 0;
};

struct PriorTrainReport {
  int epochs_run = 0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  double rmse = 0.0;  // element-wise reconstruction RMSE over the data
};

/// Full-batch Adam on the mean reconstruction loss over all rows of
/// `actions`. Deterministic given the seed. Throws on non-finite loss,
/// naming the epoch.
LatentActionPrior train_autoencoder(const Matrix& actions, int latent_dim,
                                    const PriorTrainConfig& config = {},
                                    PriorTrainReport* report = nullptr);

/// Demonstration front end; records the demo identity in the prior.
LatentActionPrior train_autoencoder(const Demonstration& demo, int latent_dim,
                                    const PriorTrainConfig& config = {},
                                    PriorTrainReport* report = nullptr);

Vector encode(const LatentActionPrior& prior, const Vector& a);
Vector decode(const LatentActionPrior& prior, const Vector& latent);
Matrix encode_batch(const LatentActionPrior& prior, const Matrix& actions);
Matrix decode_batch(const LatentActionPrior& prior, const Matrix& latents);

/// w_full * residual + (1 - w_full) * decoded, clipped to the [-1, 1] action
/// bounds shared by every environment here. Throws on w_full outside [0, 1]
/// or mismatched lengths.
Vector compose_action(const Vector& decoded, const Vector& residual, double w_full);

}  // namespace gaitprior
