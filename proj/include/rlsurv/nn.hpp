#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rlsurv/types.hpp"

namespace rlsurv {

/// Fully connected feed-forward network. Hidden layers apply ReLU; the output
/// layer is linear so the network can emit unbounded values such as Q-values.
struct Mlp {
  std::vector<int> layer_sizes;
  std::vector<Matrix> weights;  // weights[k]: layer_sizes[k+1] x layer_sizes[k]
  std::vector<Vector> biases;   // biases[k]:  layer_sizes[k+1]

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  std::size_t layer_count() const { return weights.size(); }
};

/// Per-layer parameter gradients, shape-matched to the Mlp that produced them.
struct GradientSet {
  std::vector<Matrix> weight_grads;
  std::vector<Vector> bias_grads;
};

enum class OptimizerKind { adam, sgd };

struct OptimizerState {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 0.0025;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long step_count = 0;
  // First/second Adam moment accumulators, shape-matched to the parameters.
  std::vector<Matrix> weight_m, weight_v;
  std::vector<Vector> bias_m, bias_v;
};

/// He-uniform weights (bound sqrt(6/fan_in)) drawn row-major from a seeded
/// generator; zero biases. Identical (layer_sizes, seed) give bit-identical
/// parameters.
Mlp init_mlp(const std::vector<int>& layer_sizes, std::uint64_t seed);

OptimizerState make_optimizer(const Mlp& net, OptimizerKind kind,
                              double learning_rate);

/// Batched forward pass: one state per row, one output row per state.
Matrix forward(const Mlp& net, const Eigen::Ref<const Matrix>& states);

/// Single-state convenience wrapper around forward().
Vector forward_one(const Mlp& net, const Vector& state);

/// Reverse-mode gradients of sum_i <output_grads_i, outputs_i> with respect to
/// every weight and bias. The ReLU subgradient at exactly zero is zero.
GradientSet backward(const Mlp& net, const Eigen::Ref<const Matrix>& states,
                     const Eigen::Ref<const Matrix>& output_grads);

/// Applies one Adam (bias-corrected) or SGD update in place and increments
/// step_count. Throws NumericError if any parameter becomes non-finite.
void optimizer_step(Mlp& net, const GradientSet& grads, OptimizerState& opt);

/// Copies all parameters of src into dst. Topologies must match.
void copy_weights(const Mlp& src, Mlp& dst);

bool same_topology(const Mlp& a, const Mlp& b);

/// Exact (bitwise) parameter comparison.
bool parameters_equal(const Mlp& a, const Mlp& b);

/// Elementwise Huber loss (delta = 1) on predicted - target, mean-reduced.
/// Returns the scalar loss and d(loss)/d(predicted).
std::pair<double, Vector> huber_loss_and_grad(
    const Eigen::Ref<const Vector>& predicted,
    const Eigen::Ref<const Vector>& target);

/// Half squared error, mean-reduced: loss = mean(0.5 * d^2), grad = d / n.
/// Matches the Huber quadratic branch so the two losses are swappable.
std::pair<double, Vector> mse_loss_and_grad(
    const Eigen::Ref<const Vector>& predicted,
    const Eigen::Ref<const Vector>& target);

}  // namespace rlsurv
