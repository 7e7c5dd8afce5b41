#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rlsurv/dataset.hpp"
#include "rlsurv/nn.hpp"
#include "rlsurv/types.hpp"

namespace rlsurv {

enum class ClassWeighting { none, balanced };

struct AnnConfig {
  std::vector<int> layer_sizes = {4, 128, 64, 32, 2};
  double learning_rate = 0.0025;
  int batch_size = 32;
  long epochs = 100;
  ClassWeighting class_weighting = ClassWeighting::none;
  OptimizerKind optimizer = OptimizerKind::adam;
  std::uint64_t seed = 0;
};

/// Numerically stable softmax cross-entropy over two logits per row, weighted
/// per class and mean-reduced over the batch. The gradient is
/// weight[label] * (softmax - one_hot) / batch_size.
std::pair<double, Matrix> softmax_xent_loss_and_grad(
    const Eigen::Ref<const Matrix>& logits, const std::vector<int>& labels,
    const Eigen::Vector2d& class_weights);

struct AnnCurvePoint {
  long epoch = 0;
  double mean_loss = 0.0;
  double val_f1 = 0.0;
};

struct AnnResult {
  Mlp net;
  std::vector<AnnCurvePoint> curve;
  double train_seconds = 0.0;
  double best_val_f1 = 0.0;
  long best_epoch = 0;
  long update_count = 0;  // optimizer steps actually performed
};

/// Mini-batch training over shuffled epochs with per-epoch validation; the
/// best-validation-F1 snapshot is what comes back.
AnnResult train_ann(const AnnConfig& cfg, const Dataset& train_set,
                    const Dataset& val_set);

/// Greedy labels from the logits, ties to class 0.
std::vector<int> predict_ann(const Mlp& net,
                             const Eigen::Ref<const Matrix>& states);

}  // namespace rlsurv
