#include "rlsurv/metrics.hpp"

#include <stdexcept>

namespace rlsurv {

ConfusionMatrix confusion(const std::vector<int>& preds,
                          const std::vector<int>& labels) {
  if (preds.size() != labels.size()) {
    throw std::invalid_argument("predictions and labels differ in length");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const int p = preds[i], y = labels[i];
    if ((p != 0 && p != 1) || (y != 0 && y != 1)) {
      throw std::invalid_argument("predictions and labels must be 0 or 1");
    }
    if (y == 1) {
      p == 1 ? ++cm.tp : ++cm.fn;
    } else {
      p == 1 ? ++cm.fp : ++cm.tn;
    }
  }
  return cm;
}

double precision(const ConfusionMatrix& cm) {
  const long denom = cm.tp + cm.fp;
  return denom == 0 ? 0.0 : static_cast<double>(cm.tp) / static_cast<double>(denom);
}

double recall(const ConfusionMatrix& cm) {
  const long denom = cm.tp + cm.fn;
  return denom == 0 ? 0.0 : static_cast<double>(cm.tp) / static_cast<double>(denom);
}

double f1_score(const ConfusionMatrix& cm) {
  const double p = precision(cm);
  const double r = recall(cm);
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

std::vector<RangeRow> range_table(const Dataset& train, const Dataset& test) {
  if (train.size() == 0 || test.size() == 0) {
    throw std::invalid_argument("range table needs non-empty train and test data");
  }
  std::vector<RangeRow> rows;
  for (int f = 0; f < kFeatureCount; ++f) {
    RangeRow row;
    row.feature = kFeatureNames[f];
    row.train_min = train.features.col(f).minCoeff();
    row.train_max = train.features.col(f).maxCoeff();
    row.test_min = test.features.col(f).minCoeff();
    row.test_max = test.features.col(f).maxCoeff();
    row.low_flag = row.test_min < row.train_min;
    row.high_flag = row.test_max > row.train_max;
    rows.push_back(row);
  }
  return rows;
}

EvalReport make_report(const std::string& algorithm, const std::string& device,
                       double test_fraction, std::uint64_t seed,
                       const ConfusionMatrix& cm, double train_seconds) {
  EvalReport r;
  r.algorithm = algorithm;
  r.device = device;
  r.test_fraction = test_fraction;
  r.seed = seed;
  r.cm = cm;
  r.precision = precision(cm);
  r.recall = recall(cm);
  r.f1 = f1_score(cm);
  r.train_seconds = train_seconds;
  return r;
}

}  // namespace rlsurv
