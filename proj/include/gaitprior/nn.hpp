#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace gaitprior {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { Tanh, Identity };

/// Dense feed-forward network. weights[l] has shape
/// layer_sizes[l+1] x layer_sizes[l]; biases[l] has length layer_sizes[l+1].
/// The hidden activation applies to every layer except the last.
struct Mlp {
  std::vector<int> layer_sizes;
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  Activation hidden_activation = Activation::Tanh;
  Activation output_activation = Activation::Identity;

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  int layer_count() const { return static_cast<int>(weights.size()); }
  std::size_t parameter_count() const;
};

/// Glorot-uniform weights in +-sqrt(6/(fan_in+fan_out)), zero biases,
/// drawn from a generator seeded with `seed`.
Mlp make_mlp(const std::vector<int>& layer_sizes, Activation hidden,
             Activation output, std::uint64_t seed);

/// Per-parameter derivatives, same shapes as the Mlp they belong to.
struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  void set_zero();
  void add_scaled(const Gradients& other, double scale);
  double squared_norm() const;
  void scale(double factor);
};

Gradients zero_gradients_like(const Mlp& net);

Vector forward(const Mlp& net, const Vector& input);

/// Batched forward pass, one sample per row.
Matrix forward_batch(const Mlp& net, const Matrix& inputs);

/// Layer activations kept from a forward pass so the backward pass does not
/// recompute them. activations[0] is the input batch, activations.back() the
/// network output.
struct ForwardTrace {
  std::vector<Matrix> activations;
};

Matrix forward_batch(const Mlp& net, const Matrix& inputs, ForwardTrace& trace);

/// Reverse-mode accumulation through a traced forward pass. `upstream` holds
/// dLoss/dOutput per row. When `input_gradients` is non-null it receives
/// dLoss/dInput, which lets two networks be chained (decoder into encoder).
Gradients backward_batch(const Mlp& net, const ForwardTrace& trace,
                         const Matrix& upstream, Matrix* input_gradients = nullptr);

Gradients backward(const Mlp& net, const Vector& input, const Vector& upstream,
                   Vector* input_gradient = nullptr);

struct AdamParams {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam moments for one Mlp. step_count increments by exactly 1 per update.
struct AdamState {
  long step_count = 0;
  AdamParams hp;
  std::vector<Matrix> first_weights, second_weights;
  std::vector<Vector> first_biases, second_biases;
};

AdamState make_adam_state(const Mlp& net, const AdamParams& hp);

/// Standard bias-corrected Adam update, in place. Throws on non-finite
/// gradients, naming the offending layer.
void adam_step(Mlp& params, const Gradients& grads, AdamState& state);

/// Adam moments for a free parameter vector (e.g. a policy's log_std).
struct AdamVectorState {
  long step_count = 0;
  AdamParams hp;
  Vector first, second;
};

AdamVectorState make_adam_state(const Vector& params, const AdamParams& hp);
void adam_step(Vector& params, const Vector& grad, AdamVectorState& state);

/// Scalar loss on the network output together with its gradient, used by the
/// finite-difference harness to obtain the analytic side.
struct ScalarLoss {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> grad;
};

struct FiniteDiffReport {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t checked_parameters = 0;
  int worst_layer = -1;
  bool passed = false;
};

/// Compares analytic gradients against central finite differences over every
/// parameter. Relative error uses max(|analytic|, |numeric|, 1) as the scale.
FiniteDiffReport finite_diff_check(const Mlp& net, const ScalarLoss& loss,
                                   const Vector& input, double tolerance,
                                   double fd_step = 1e-5);

}  // namespace gaitprior
