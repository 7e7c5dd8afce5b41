#include "rlsurv/nn.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "rlsurv/errors.hpp"

namespace rlsurv {

namespace {

void check_layer_sizes(const std::vector<int>& sizes) {
  if (sizes.size() < 2) {
    throw std::invalid_argument("mlp needs at least input and output layers");
  }
  for (int s : sizes) {
    if (s < 1) throw std::invalid_argument("layer sizes must be positive");
  }
}

void check_forward_input(const Mlp& net, const Eigen::Ref<const Matrix>& states) {
  if (states.cols() != net.input_dim()) {
    throw std::invalid_argument("state width " + std::to_string(states.cols()) +
                                " does not match input dim " +
                                std::to_string(net.input_dim()));
  }
  if (!states.allFinite()) {
    throw std::invalid_argument("non-finite state input");
  }
}

}  // namespace

Mlp init_mlp(const std::vector<int>& layer_sizes, std::uint64_t seed) {
  check_layer_sizes(layer_sizes);
  Mlp net;
  net.layer_sizes = layer_sizes;
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k + 1 < layer_sizes.size(); ++k) {
    const int fan_in = layer_sizes[k];
    const int fan_out = layer_sizes[k + 1];
    const double bound = std::sqrt(6.0 / fan_in);
    std::uniform_real_distribution<double> dist(-bound, bound);
    Matrix w(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) w(r, c) = dist(rng);
    }
    net.weights.push_back(std::move(w));
    net.biases.push_back(Vector::Zero(fan_out));
  }
  return net;
}

OptimizerState make_optimizer(const Mlp& net, OptimizerKind kind,
                              double learning_rate) {
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("learning rate must be positive");
  }
  OptimizerState opt;
  opt.kind = kind;
  opt.learning_rate = learning_rate;
  if (kind == OptimizerKind::adam) {
    for (std::size_t k = 0; k < net.layer_count(); ++k) {
      opt.weight_m.push_back(Matrix::Zero(net.weights[k].rows(), net.weights[k].cols()));
      opt.weight_v.push_back(Matrix::Zero(net.weights[k].rows(), net.weights[k].cols()));
      opt.bias_m.push_back(Vector::Zero(net.biases[k].size()));
      opt.bias_v.push_back(Vector::Zero(net.biases[k].size()));
    }
  }
  return opt;
}

Matrix forward(const Mlp& net, const Eigen::Ref<const Matrix>& states) {
  check_forward_input(net, states);
  Matrix h = states;
  for (std::size_t k = 0; k < net.layer_count(); ++k) {
    Matrix z = h * net.weights[k].transpose();
    z.rowwise() += net.biases[k].transpose();
    if (k + 1 < net.layer_count()) {
      h = z.cwiseMax(0.0);
    } else {
      h = std::move(z);
    }
  }
  return h;
}

Vector forward_one(const Mlp& net, const Vector& state) {
  Matrix row(1, state.size());
  row.row(0) = state.transpose();
  return forward(net, row).row(0).transpose();
}

GradientSet backward(const Mlp& net, const Eigen::Ref<const Matrix>& states,
                     const Eigen::Ref<const Matrix>& output_grads) {
  check_forward_input(net, states);
  if (output_grads.rows() != states.rows() ||
      output_grads.cols() != net.output_dim()) {
    throw std::invalid_argument("output_grads shape does not match forward output");
  }
  const std::size_t layers = net.layer_count();

  // Forward pass, caching the activation fed into each layer.
  std::vector<Matrix> inputs(layers);
  Matrix h = states;
  for (std::size_t k = 0; k < layers; ++k) {
    inputs[k] = h;
    if (k + 1 < layers) {
      Matrix z = h * net.weights[k].transpose();
      z.rowwise() += net.biases[k].transpose();
      h = z.cwiseMax(0.0);
    }
  }

  GradientSet grads;
  grads.weight_grads.resize(layers);
  grads.bias_grads.resize(layers);
  Matrix delta = output_grads;
  for (std::size_t k = layers; k-- > 0;) {
    grads.weight_grads[k] = delta.transpose() * inputs[k];
    grads.bias_grads[k] = delta.colwise().sum().transpose();
    if (k > 0) {
      // ReLU mask: the cached input of layer k is the post-ReLU activation,
      // positive exactly where the pre-activation was positive.
      delta = (delta * net.weights[k]).cwiseProduct(
          (inputs[k].array() > 0.0).cast<double>().matrix());
    }
  }
  return grads;
}

void optimizer_step(Mlp& net, const GradientSet& grads, OptimizerState& opt) {
  if (grads.weight_grads.size() != net.layer_count() ||
      grads.bias_grads.size() != net.layer_count()) {
    throw std::invalid_argument("gradient layer count mismatch");
  }
  for (std::size_t k = 0; k < net.layer_count(); ++k) {
    if (grads.weight_grads[k].rows() != net.weights[k].rows() ||
        grads.weight_grads[k].cols() != net.weights[k].cols() ||
        grads.bias_grads[k].size() != net.biases[k].size()) {
      throw std::invalid_argument("gradient shape mismatch at layer " +
                                  std::to_string(k));
    }
  }

  opt.step_count += 1;
  if (opt.kind == OptimizerKind::sgd) {
    for (std::size_t k = 0; k < net.layer_count(); ++k) {
      net.weights[k] -= opt.learning_rate * grads.weight_grads[k];
      net.biases[k] -= opt.learning_rate * grads.bias_grads[k];
    }
  } else {
    const double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step_count));
    const double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step_count));
    for (std::size_t k = 0; k < net.layer_count(); ++k) {
      auto& mw = opt.weight_m[k];
      auto& vw = opt.weight_v[k];
      const auto& gw = grads.weight_grads[k];
      mw = opt.beta1 * mw + (1.0 - opt.beta1) * gw;
      vw.array() = opt.beta2 * vw.array() + (1.0 - opt.beta2) * gw.array().square();
      net.weights[k].array() -=
          opt.learning_rate * (mw.array() / c1) / ((vw.array() / c2).sqrt() + opt.epsilon);

      auto& mb = opt.bias_m[k];
      auto& vb = opt.bias_v[k];
      const auto& gb = grads.bias_grads[k];
      mb = opt.beta1 * mb + (1.0 - opt.beta1) * gb;
      vb.array() = opt.beta2 * vb.array() + (1.0 - opt.beta2) * gb.array().square();
      net.biases[k].array() -=
          opt.learning_rate * (mb.array() / c1) / ((vb.array() / c2).sqrt() + opt.epsilon);
    }
  }

  for (std::size_t k = 0; k < net.layer_count(); ++k) {
    if (!net.weights[k].allFinite() || !net.biases[k].allFinite()) {
      throw NumericError("optimizer step produced non-finite parameters at layer " +
                         std::to_string(k));
    }
  }
}

void copy_weights(const Mlp& src, Mlp& dst) {
  if (!same_topology(src, dst)) {
    throw std::invalid_argument("cannot copy weights between different topologies");
  }
  dst.weights = src.weights;
  dst.biases = src.biases;
}

bool same_topology(const Mlp& a, const Mlp& b) {
  return a.layer_sizes == b.layer_sizes;
}

bool parameters_equal(const Mlp& a, const Mlp& b) {
  if (!same_topology(a, b)) return false;
  for (std::size_t k = 0; k < a.layer_count(); ++k) {
    if (a.weights[k] != b.weights[k]) return false;
    if (a.biases[k] != b.biases[k]) return false;
  }
  return true;
}

std::pair<double, Vector> huber_loss_and_grad(
    const Eigen::Ref<const Vector>& predicted,
    const Eigen::Ref<const Vector>& target) {
  if (predicted.size() != target.size() || predicted.size() == 0) {
    throw std::invalid_argument("predicted/target length mismatch");
  }
  const auto n = predicted.size();
  double loss = 0.0;
  Vector grad(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = predicted(i) - target(i);
    if (std::abs(d) <= 1.0) {
      loss += 0.5 * d * d;
      grad(i) = d;
    } else {
      loss += std::abs(d) - 0.5;
      grad(i) = d > 0.0 ? 1.0 : -1.0;
    }
  }
  loss /= static_cast<double>(n);
  grad /= static_cast<double>(n);
  return {loss, std::move(grad)};
}

std::pair<double, Vector> mse_loss_and_grad(
    const Eigen::Ref<const Vector>& predicted,
    const Eigen::Ref<const Vector>& target) {
  if (predicted.size() != target.size() || predicted.size() == 0) {
    throw std::invalid_argument("predicted/target length mismatch");
  }
  const auto n = predicted.size();
  Vector d = predicted - target;
  const double loss = 0.5 * d.squaredNorm() / static_cast<double>(n);
  d /= static_cast<double>(n);
  return {loss, std::move(d)};
}

}  // namespace rlsurv
