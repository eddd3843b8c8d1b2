#include "gaitprior/nn.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace gaitprior {

namespace {

void check_layer_shapes(const Mlp& net) {
  if (net.layer_sizes.size() < 2) {
    throw std::invalid_argument("Mlp needs at least an input and an output layer");
  }
  if (net.weights.size() + 1 != net.layer_sizes.size() ||
      net.biases.size() != net.weights.size()) {
    throw std::invalid_argument("Mlp weight/bias count does not match layer_sizes");
  }
}

Matrix apply_activation(Matrix z, Activation act) {
  if (act == Activation::Tanh) {
    return z.array().tanh().matrix();
  }
  return z;
}

// Derivative expressed through the activated output: tanh'(z) = 1 - tanh(z)^2.
Matrix activation_derivative(const Matrix& activated, Activation act) {
  if (act == Activation::Tanh) {
    return (1.0 - activated.array().square()).matrix();
  }
  return Matrix::Ones(activated.rows(), activated.cols());
}

void adam_update_array(Eigen::Map<Eigen::ArrayXd> param,
                       Eigen::Map<const Eigen::ArrayXd> grad,
                       Eigen::Map<Eigen::ArrayXd> m, Eigen::Map<Eigen::ArrayXd> v,
                       const AdamParams& hp, double bias1, double bias2) {
  m = hp.beta1 * m + (1.0 - hp.beta1) * grad;
  v = hp.beta2 * v + (1.0 - hp.beta2) * grad.square();
  param -= hp.lr * (m / bias1) / ((v / bias2).sqrt() + hp.epsilon);
}

Eigen::Map<Eigen::ArrayXd> as_array(Matrix& m) {
  return {m.data(), m.size()};
}
Eigen::Map<Eigen::ArrayXd> as_array(Vector& v) {
  return {v.data(), v.size()};
}
Eigen::Map<const Eigen::ArrayXd> as_const_array(const Matrix& m) {
  return {m.data(), m.size()};
}
Eigen::Map<const Eigen::ArrayXd> as_const_array(const Vector& v) {
  return {v.data(), v.size()};
}

}  // namespace

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += static_cast<std::size_t>(w.size());
  for (const auto& b : biases) n += static_cast<std::size_t>(b.size());
  return n;
}

Mlp make_mlp(const std::vector<int>& layer_sizes, Activation hidden,
             Activation output, std::uint64_t seed) {
  if (layer_sizes.size() < 2) {
    throw std::invalid_argument("make_mlp: need at least two layer sizes");
  }
  for (int s : layer_sizes) {
    if (s <= 0) throw std::invalid_argument("make_mlp: layer sizes must be positive");
  }
  Mlp net;
  net.layer_sizes = layer_sizes;
  net.hidden_activation = hidden;
  net.output_activation = output;
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int fan_in = layer_sizes[l];
    const int fan_out = layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Matrix w(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) w(r, c) = dist(rng);
    }
    net.weights.push_back(std::move(w));
    net.biases.push_back(Vector::Zero(fan_out));
  }
  return net;
}

void Gradients::set_zero() {
  for (auto& w : weights) w.setZero();
  for (auto& b : biases) b.setZero();
}

void Gradients::add_scaled(const Gradients& other, double scale) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] += scale * other.weights[l];
    biases[l] += scale * other.biases[l];
  }
}

double Gradients::squared_norm() const {
  double total = 0.0;
  for (const auto& w : weights) total += w.squaredNorm();
  for (const auto& b : biases) total += b.squaredNorm();
  return total;
}

void Gradients::scale(double factor) {
  for (auto& w : weights) w *= factor;
  for (auto& b : biases) b *= factor;
}

Gradients zero_gradients_like(const Mlp& net) {
  Gradients g;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    g.weights.push_back(Matrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
    g.biases.push_back(Vector::Zero(net.biases[l].size()));
  }
  return g;
}

Matrix forward_batch(const Mlp& net, const Matrix& inputs, ForwardTrace& trace) {
  check_layer_shapes(net);
  if (inputs.cols() != net.input_dim()) {
    throw std::invalid_argument("forward: input has " + std::to_string(inputs.cols()) +
                                " columns, expected " + std::to_string(net.input_dim()));
  }
  trace.activations.clear();
  trace.activations.reserve(net.weights.size() + 1);
  trace.activations.push_back(inputs);
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    const bool last = (l + 1 == net.weights.size());
    const Activation act = last ? net.output_activation : net.hidden_activation;
    Matrix z = trace.activations.back() * net.weights[l].transpose();
    z.rowwise() += net.biases[l].transpose();
    trace.activations.push_back(apply_activation(std::move(z), act));
  }
  return trace.activations.back();
}

Matrix forward_batch(const Mlp& net, const Matrix& inputs) {
  ForwardTrace trace;
  return forward_batch(net, inputs, trace);
}

Vector forward(const Mlp& net, const Vector& input) {
  return forward_batch(net, input.transpose()).row(0).transpose();
}

Gradients backward_batch(const Mlp& net, const ForwardTrace& trace,
                         const Matrix& upstream, Matrix* input_gradients) {
  check_layer_shapes(net);
  if (trace.activations.size() != net.weights.size() + 1) {
    throw std::invalid_argument("backward: trace does not match network depth");
  }
  if (upstream.rows() != trace.activations.back().rows() ||
      upstream.cols() != net.output_dim()) {
    throw std::invalid_argument("backward: upstream gradient shape mismatch");
  }
  Gradients grads = zero_gradients_like(net);
  Matrix delta = upstream;
  for (int l = net.layer_count() - 1; l >= 0; --l) {
    const bool last = (l + 1 == net.layer_count());
    const Activation act = last ? net.output_activation : net.hidden_activation;
    delta = delta.cwiseProduct(activation_derivative(trace.activations[l + 1], act));
    grads.weights[l] = delta.transpose() * trace.activations[l];
    grads.biases[l] = delta.colwise().sum().transpose();
    if (l > 0 || input_gradients != nullptr) {
      delta = delta * net.weights[l];
    }
  }
  if (input_gradients != nullptr) *input_gradients = delta;
  return grads;
}

Gradients backward(const Mlp& net, const Vector& input, const Vector& upstream,
                   Vector* input_gradient) {
  ForwardTrace trace;
  forward_batch(net, input.transpose(), trace);
  Matrix input_grads;
  Gradients g = backward_batch(net, trace, upstream.transpose(),
                               input_gradient ? &input_grads : nullptr);
  if (input_gradient != nullptr) *input_gradient = input_grads.row(0).transpose();
  return g;
}

AdamState make_adam_state(const Mlp& net, const AdamParams& hp) {
  if (hp.lr <= 0.0) throw std::invalid_argument("adam: lr must be positive");
  AdamState state;
  state.hp = hp;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    state.first_weights.push_back(Matrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
    state.second_weights.push_back(Matrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
    state.first_biases.push_back(Vector::Zero(net.biases[l].size()));
    state.second_biases.push_back(Vector::Zero(net.biases[l].size()));
  }
  return state;
}

void adam_step(Mlp& params, const Gradients& grads, AdamState& state) {
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    if (!grads.weights[l].allFinite() || !grads.biases[l].allFinite()) {
      throw std::runtime_error("adam_step: non-finite gradient in layer " + std::to_string(l));
    }
  }
  state.step_count += 1;
  const double bias1 = 1.0 - std::pow(state.hp.beta1, state.step_count);
  const double bias2 = 1.0 - std::pow(state.hp.beta2, state.step_count);
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    adam_update_array(as_array(params.weights[l]), as_const_array(grads.weights[l]),
                      as_array(state.first_weights[l]), as_array(state.second_weights[l]),
                      state.hp, bias1, bias2);
    adam_update_array(as_array(params.biases[l]), as_const_array(grads.biases[l]),
                      as_array(state.first_biases[l]), as_array(state.second_biases[l]),
                      state.hp, bias1, bias2);
  }
}

AdamVectorState make_adam_state(const Vector& params, const AdamParams& hp) {
  if (hp.lr <= 0.0) throw std::invalid_argument("adam: lr must be positive");
  AdamVectorState state;
  state.hp = hp;
  state.first = Vector::Zero(params.size());
  state.second = Vector::Zero(params.size());
  return state;
}

void adam_step(Vector& params, const Vector& grad, AdamVectorState& state) {
  if (!grad.allFinite()) {
    throw std::runtime_error("adam_step: non-finite gradient in parameter vector");
  }
  state.step_count += 1;
  const double bias1 = 1.0 - std::pow(state.hp.beta1, state.step_count);
  const double bias2 = 1.0 - std::pow(state.hp.beta2, state.step_count);
  adam_update_array(as_array(params), as_const_array(grad), as_array(state.first),
                    as_array(state.second), state.hp, bias1, bias2);
}

FiniteDiffReport finite_diff_check(const Mlp& net, const ScalarLoss& loss,
                                   const Vector& input, double tolerance,
                                   double fd_step) {
  ForwardTrace trace;
  const Matrix out = forward_batch(net, input.transpose(), trace);
  const Vector upstream = loss.grad(out.row(0).transpose());
  const Gradients analytic = backward_batch(net, trace, upstream.transpose());

  FiniteDiffReport report;
  Mlp probe = net;
  auto eval = [&](const Mlp& n) { return loss.value(forward(n, input)); };
  auto check_entry = [&](double* slot, double analytic_grad, int layer) {
    const double saved = *slot;
    *slot = saved + fd_step;
    const double plus = eval(probe);
    *slot = saved - fd_step;
    const double minus = eval(probe);
    *slot = saved;
    const double numeric = (plus - minus) / (2.0 * fd_step);
    const double abs_err = std::abs(analytic_grad - numeric);
    const double scale = std::max({std::abs(analytic_grad), std::abs(numeric), 1.0});
    const double rel = abs_err / scale;
    report.checked_parameters += 1;
    report.max_abs_error = std::max(report.max_abs_error, abs_err);
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_layer = layer;
    }
  };
  for (int l = 0; l < net.layer_count(); ++l) {
    Matrix& w = probe.weights[l];
    for (Eigen::Index k = 0; k < w.size(); ++k) {
      check_entry(w.data() + k, analytic.weights[l].data()[k], l);
    }
    Vector& b = probe.biases[l];
    for (Eigen::Index k = 0; k < b.size(); ++k) {
      check_entry(b.data() + k, analytic.biases[l].data()[k], l);
    }
  }
  report.passed = report.max_rel_error <= tolerance;
  return report;
}

}  // namespace gaitprior
