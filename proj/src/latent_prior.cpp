#include "gaitprior/latent_prior.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "gaitprior/rng.hpp"

namespace gaitprior {

double norm_loss(const Vector& latent) {
  if (latent.size() == 0) return 0.0;
  if (latent.cwiseAbs().maxCoeff() < 0.8) return 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < latent.size(); ++i) {
    total += std::exp(std::pow(latent[i] / 1.2, 10.0)) - 1.0;
  }
  return total;
}

Vector norm_loss_gradient(const Vector& latent) {
  Vector grad = Vector::Zero(latent.size());
  if (latent.size() == 0 || latent.cwiseAbs().maxCoeff() < 0.8) return grad;
  for (Eigen::Index i = 0; i < latent.size(); ++i) {
    const double u = latent[i] / 1.2;
    grad[i] = std::exp(std::pow(u, 10.0)) * 10.0 * std::pow(u, 9.0) / 1.2;
  }
  return grad;
}

double reconstruction_loss(const Vector& a, const Vector& a_hat, const Vector& latent) {
  if (a.size() != a_hat.size()) {
    throw std::invalid_argument("reconstruction_loss: action length mismatch");
  }
  return (a - a_hat).squaredNorm() + norm_loss(latent);
}

LatentActionPrior train_autoencoder(const Matrix& actions, int latent_dim,
                                    const PriorTrainConfig& config,
                                    PriorTrainReport* report) {
  const int n = static_cast<int>(actions.rows());
  const int a_full = static_cast<int>(actions.cols());
  if (n < 1) throw std::invalid_argument("train_autoencoder: empty action set");
  if (latent_dim < 1 || latent_dim > a_full) {
    throw std::invalid_argument("train_autoencoder: latent_dim must be in [1, action_dim]");
  }
  if (!actions.allFinite()) {
    throw std::invalid_argument("train_autoencoder: non-finite actions");
  }
  if (config.epochs < 1) throw std::invalid_argument("train_autoencoder: epochs must be >= 1");

  LatentActionPrior prior;
  prior.latent_dim = latent_dim;
  prior.full_dim = a_full;
  prior.encoder = make_mlp({a_full, 2 * latent_dim, latent_dim}, Activation::Tanh,
                           Activation::Identity, split_seed(config.seed, 0));
  prior.decoder = make_mlp({latent_dim, 2 * latent_dim, a_full}, Activation::Tanh,
                           Activation::Identity, split_seed(config.seed, 1));

  AdamParams hp;
  hp.lr = config.lr;
  AdamState enc_adam = make_adam_state(prior.encoder, hp);
  AdamState dec_adam = make_adam_state(prior.decoder, hp);

  const double inv_n = 1.0 / static_cast<double>(n);
  double loss = 0.0;
  int epochs_run = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    ForwardTrace enc_trace;
    const Matrix latents = forward_batch(prior.encoder, actions, enc_trace);
    ForwardTrace dec_trace;
    const Matrix recon = forward_batch(prior.decoder, latents, dec_trace);

    const Matrix err = recon - actions;
    double norm_total = 0.0;
    Matrix latent_grad = Matrix::Zero(latents.rows(), latents.cols());
    for (Eigen::Index r = 0; r < latents.rows(); ++r) {
      const Vector z = latents.row(r).transpose();
      norm_total += norm_loss(z);
      latent_grad.row(r) = norm_loss_gradient(z).transpose();
    }
    loss = (err.squaredNorm() + norm_total) * inv_n;
    if (!std::isfinite(loss)) {
      throw std::runtime_error("train_autoencoder: loss diverged at epoch " +
                               std::to_string(epoch));
    }
    if (report && epoch == 0) report->initial_loss = loss;
    epochs_run = epoch + 1;
    if (loss < config.early_stop_loss) break;

    Matrix dec_upstream = 2.0 * inv_n * err;
    Matrix recon_latent_grad;
    const Gradients dec_grads =
        backward_batch(prior.decoder, dec_trace, dec_upstream, &recon_latent_grad);
    Matrix enc_upstream = recon_latent_grad + inv_n * latent_grad;
    const Gradients enc_grads = backward_batch(prior.encoder, enc_trace, enc_upstream);

    adam_step(prior.decoder, dec_grads, dec_adam);
    adam_step(prior.encoder, enc_grads, enc_adam);
  }

  prior.final_loss = loss;
  if (report) {
    report->epochs_run = epochs_run;
    report->final_loss = loss;
    const Matrix recon = decode_batch(prior, encode_batch(prior, actions));
    report->rmse = std::sqrt((recon - actions).squaredNorm() /
                             static_cast<double>(actions.size()));
  }
  return prior;
}

LatentActionPrior train_autoencoder(const Demonstration& demo, int latent_dim,
                                    const PriorTrainConfig& config,
                                    PriorTrainReport* report) {
  validate_demonstration(demo);
  LatentActionPrior prior = train_autoencoder(actions_matrix(demo), latent_dim, config, report);
  prior.source_demo_id = demonstration_id(demo);
  return prior;
}

Vector encode(const LatentActionPrior& prior, const Vector& a) {
  if (a.size() != prior.full_dim) throw std::invalid_argument("encode: action length mismatch");
  return forward(prior.encoder, a);
}

Vector decode(const LatentActionPrior& prior, const Vector& latent) {
  if (latent.size() != prior.latent_dim) {
    throw std::invalid_argument("decode: latent length mismatch");
  }
  return forward(prior.decoder, latent);
}

Matrix encode_batch(const LatentActionPrior& prior, const Matrix& actions) {
  if (actions.cols() != prior.full_dim) {
    throw std::invalid_argument("encode_batch: action width mismatch");
  }
  return forward_batch(prior.encoder, actions);
}

Matrix decode_batch(const LatentActionPrior& prior, const Matrix& latents) {
  if (latents.cols() != prior.latent_dim) {
    throw std::invalid_argument("decode_batch: latent width mismatch");
  }
  return forward_batch(prior.decoder, latents);
}

Vector compose_action(const Vector& decoded, const Vector& residual, double w_full) {
  if (!(w_full >= 0.0 && w_full <= 1.0)) {
    throw std::invalid_argument("compose_action: w_full must be in [0, 1]");
  }
  if (decoded.size() != residual.size()) {
    throw std::invalid_argument("compose_action: length mismatch");
  }
  Vector applied = w_full * residual + (1.0 - w_full) * decoded;
  return applied.cwiseMax(-1.0).cwiseMin(1.0);
}

}  // namespace gaitprior
