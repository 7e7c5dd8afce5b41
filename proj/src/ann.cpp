#include "rlsurv/ann.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "rlsurv/metrics.hpp"

namespace rlsurv {

std::pair<double, Matrix> softmax_xent_loss_and_grad(
    const Eigen::Ref<const Matrix>& logits, const std::vector<int>& labels,
    const Eigen::Vector2d& class_weights) {
  const long n = logits.rows();
  if (logits.cols() != 2) throw std::invalid_argument("expected two logits per row");
  if (static_cast<long>(labels.size()) != n)
    throw std::invalid_argument("labels/logits row mismatch");

  double loss = 0.0;
  Matrix grad(n, 2);
  for (long i = 0; i < n; ++i) {
    const int y = labels[i];
    if (y != 0 && y != 1) throw std::invalid_argument("labels must be 0 or 1");
    const double w = class_weights(y);

    // log-sum-exp with the max subtracted, so huge logits cannot overflow
    const double m = std::max(logits(i, 0), logits(i, 1));
    const double z0 = logits(i, 0) - m;
    const double z1 = logits(i, 1) - m;
    const double lse = std::log(std::exp(z0) + std::exp(z1));
    loss += w * (lse - (y == 0 ? z0 : z1));

    const double p0 = std::exp(z0 - lse);
    const double p1 = std::exp(z1 - lse);
    grad(i, 0) = w * (p0 - (y == 0 ? 1.0 : 0.0));
    grad(i, 1) = w * (p1 - (y == 1 ? 1.0 : 0.0));
  }
  loss /= static_cast<double>(n);
  grad /= static_cast<double>(n);
  return {loss, grad};
}

AnnResult train_ann(const AnnConfig& cfg, const Dataset& train_set,
                    const Dataset& val_set) {
  if (cfg.epochs < 1) throw std::invalid_argument("epochs must be at least 1");
  if (cfg.batch_size < 1) throw std::invalid_argument("batch size must be positive");
  if (cfg.learning_rate <= 0.0) throw std::invalid_argument("learning rate must be positive");
  const long n0 = train_set.count_label(0);
  const long n1 = train_set.count_label(1);
  if (n0 == 0 || n1 == 0)
    throw std::invalid_argument("training split must contain both classes");

  const auto started = std::chrono::steady_clock::now();
  AnnResult result;
  result.net = init_mlp(cfg.layer_sizes, mix_seed(cfg.seed, hash_name("ann_init")));
  OptimizerState opt = make_optimizer(result.net, cfg.optimizer, cfg.learning_rate);
  std::mt19937_64 shuffle_rng(mix_seed(cfg.seed, hash_name("ann_shuffle")));

  Eigen::Vector2d weights(1.0, 1.0);
  if (cfg.class_weighting == ClassWeighting::balanced) {
    const double n = static_cast<double>(n0 + n1);
    weights << n / (2.0 * n0), n / (2.0 * n1);
  }

  const long rows = static_cast<long>(train_set.size());
  std::vector<long> order(rows);
  std::iota(order.begin(), order.end(), 0);

  Mlp best = result.net;
  double best_f1 = -1.0;

  for (long epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    long batches = 0;

    for (long offset = 0; offset < rows; offset += cfg.batch_size) {
      const long b = std::min<long>(cfg.batch_size, rows - offset);
      Matrix states(b, train_set.features.cols());
      std::vector<int> labels(b);
      for (long i = 0; i < b; ++i) {
        states.row(i) = train_set.features.row(order[offset + i]);
        labels[i] = train_set.labels[order[offset + i]];
      }
      const Matrix logits = forward(result.net, states);
      const auto [loss, grad] = softmax_xent_loss_and_grad(logits, labels, weights);
      const GradientSet grads = backward(result.net, states, grad);
      optimizer_step(result.net, grads, opt);
      loss_sum += loss;
      ++batches;
      ++result.update_count;
    }

    AnnCurvePoint point;
    point.epoch = epoch;
    point.mean_loss = batches > 0 ? loss_sum / batches : 0.0;
    if (val_set.size() > 0) {
      const std::vector<int> preds = predict_ann(result.net, val_set.features);
      point.val_f1 = f1_score(confusion(preds, val_set.labels));
      if (point.val_f1 >= best_f1) {
        best_f1 = point.val_f1;
        best = result.net;
        result.best_epoch = epoch;
      }
    }
    result.curve.push_back(point);
  }

  if (best_f1 >= 0.0) {
    result.net = best;
    result.best_val_f1 = best_f1;
  }
  result.train_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return result;
}

std::vector<int> predict_ann(const Mlp& net,
                             const Eigen::Ref<const Matrix>& states) {
  const Matrix logits = forward(net, states);
  std::vector<int> labels(logits.rows());
  for (long i = 0; i < logits.rows(); ++i)
    labels[i] = static_cast<int>(argmax_index(logits.row(i)));
  return labels;
}

}  // namespace rlsurv
