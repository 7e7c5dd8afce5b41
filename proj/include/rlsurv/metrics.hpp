#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rlsurv/dataset.hpp"

namespace rlsurv {

/// Binary confusion counts with FAILURE (label 1) as the positive class.
struct ConfusionMatrix {
  long tp = 0, fp = 0, fn = 0, tn = 0;
  long total() const { return tp + fp + fn + tn; }
};

ConfusionMatrix confusion(const std::vector<int>& preds,
                          const std::vector<int>& labels);

/// tp / (tp + fp); 0 when there are no predicted positives.
double precision(const ConfusionMatrix& cm);
/// tp / (tp + fn); 0 when there are no actual positives.
double recall(const ConfusionMatrix& cm);
/// Harmonic mean of precision and recall; 0 when both are 0.
double f1_score(const ConfusionMatrix& cm);

/// One row of the train/test feature-range comparison. A flag means the test
/// data reaches outside the training envelope on that side.
struct RangeRow {
  std::string feature;
  double train_min = 0, train_max = 0;
  double test_min = 0, test_max = 0;
  bool low_flag = false;   // test_min < train_min
  bool high_flag = false;  // test_max > train_max
};

std::vector<RangeRow> range_table(const Dataset& train, const Dataset& test);

/// Outcome of one trained-and-evaluated run, one comparison-table row.
struct EvalReport {
  std::string algorithm;
  std::string device;
  double test_fraction = 0.0;
  std::uint64_t seed = 0;
  ConfusionMatrix cm;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double train_seconds = 0.0;
  // Validation F1 of the selected checkpoint; diagnostic only, not part of
  // the comparison table. -1 when the algorithm has no validation phase.
  double val_f1 = -1.0;
};

EvalReport make_report(const std::string& algorithm, const std::string& device,
                       double test_fraction, std::uint64_t seed,
                       const ConfusionMatrix& cm, double train_seconds);

}  // namespace rlsurv
