#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "rlsurv/metrics.hpp"

using namespace rlsurv;

TEST_CASE("confusion counts the four cells") {
  const ConfusionMatrix all_right = confusion({1, 0, 1, 0}, {1, 0, 1, 0});
  CHECK(all_right.tp == 2);
  CHECK(all_right.tn == 2);
  CHECK(all_right.fp == 0);
  CHECK(all_right.fn == 0);

  const ConfusionMatrix silent = confusion({0, 0, 0}, {1, 1, 0});
  CHECK(silent.fn == 2);
  CHECK(silent.tn == 1);
  CHECK(silent.tp == 0);
  CHECK(silent.total() == 3);
}

TEST_CASE("confusion matches an independent per-row tally") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const long n = 1 + static_cast<long>(rng() % 300);
    std::vector<int> preds(n), labels(n);
    for (long i = 0; i < n; ++i) {
      preds[i] = static_cast<int>(rng() % 2);
      labels[i] = rng() % 10 == 0 ? 1 : 0;  // skewed like the real data
    }
    long tp = 0, fp = 0, fn = 0, tn = 0;
    for (long i = 0; i < n; ++i) {
      if (preds[i] == 1 && labels[i] == 1) ++tp;
      if (preds[i] == 1 && labels[i] == 0) ++fp;
      if (preds[i] == 0 && labels[i] == 1) ++fn;
      if (preds[i] == 0 && labels[i] == 0) ++tn;
    }
    const ConfusionMatrix cm = confusion(preds, labels);
    CHECK(cm.tp == tp);
    CHECK(cm.fp == fp);
    CHECK(cm.fn == fn);
    CHECK(cm.tn == tn);
  }
}

TEST_CASE("confusion is invariant under joint permutation") {
  std::vector<int> preds = {1, 0, 0, 1, 1, 0, 1};
  std::vector<int> labels = {1, 1, 0, 0, 1, 0, 0};
  const ConfusionMatrix before = confusion(preds, labels);

  std::vector<std::size_t> order(preds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(9);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> p2, l2;
  for (std::size_t i : order) {
    p2.push_back(preds[i]);
    l2.push_back(labels[i]);
  }
  const ConfusionMatrix after = confusion(p2, l2);
  CHECK(before.tp == after.tp);
  CHECK(before.fp == after.fp);
  CHECK(before.fn == after.fn);
  CHECK(before.tn == after.tn);
}

TEST_CASE("confusion validates its input") {
  CHECK_THROWS_AS(confusion({1, 0}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(confusion({2}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(confusion({0}, {3}), std::invalid_argument);
}

TEST_CASE("precision, recall, and F1 hand cases") {
  ConfusionMatrix cm;
  cm.tp = 2;
  cm.fp = 1;
  cm.fn = 1;
  CHECK(precision(cm) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(recall(cm) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(f1_score(cm) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  ConfusionMatrix miss;
  miss.fn = 5;
  CHECK(precision(miss) == 0.0);
  CHECK(recall(miss) == 0.0);
  CHECK(f1_score(miss) == 0.0);

  ConfusionMatrix strong;
  strong.tp = 6;
  strong.fp = 1;
  strong.fn = 1;
  strong.tn = 992;
  CHECK(f1_score(strong) == doctest::Approx(0.857142857142857).epsilon(1e-12));
}

TEST_CASE("F1 is 1 exactly when nothing is missed or false-alarmed") {
  ConfusionMatrix perfect;
  perfect.tp = 5;
  perfect.tn = 100;
  CHECK(f1_score(perfect) == 1.0);

  ConfusionMatrix degenerate;
  degenerate.tn = 100;  // no positives anywhere: 0/0 convention
  CHECK(f1_score(degenerate) == 0.0);

  ConfusionMatrix one_fp = perfect;
  one_fp.fp = 1;
  CHECK(f1_score(one_fp) < 1.0);
  ConfusionMatrix one_fn = perfect;
  one_fn.fn = 1;
  CHECK(f1_score(one_fn) < 1.0);
}

TEST_CASE("F1 agrees with a direct per-row oracle") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 200; ++rep) {
    const long n = 1 + static_cast<long>(rng() % 100);
    std::vector<int> preds(n), labels(n);
    for (long i = 0; i < n; ++i) {
      preds[i] = static_cast<int>(rng() % 2);
      labels[i] = static_cast<int>(rng() % 2);
    }
    const ConfusionMatrix cm = confusion(preds, labels);

    // direct formula from raw counts, written independently of the library
    double expected = 0.0;
    long tp = 0, pred_pos = 0, actual_pos = 0;
    for (long i = 0; i < n; ++i) {
      tp += preds[i] == 1 && labels[i] == 1;
      pred_pos += preds[i] == 1;
      actual_pos += labels[i] == 1;
    }
    const double p = pred_pos ? static_cast<double>(tp) / pred_pos : 0.0;
    const double r = actual_pos ? static_cast<double>(tp) / actual_pos : 0.0;
    expected = (p + r) > 0 ? 2 * p * r / (p + r) : 0.0;

    CHECK(f1_score(cm) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(f1_score(cm) >= 0.0);
    CHECK(f1_score(cm) <= 1.0);
  }
}

namespace {

Dataset column_data(double lo, double hi) {
  Dataset ds;
  ds.features.resize(2, kFeatureCount);
  ds.features.row(0).setConstant(lo);
  ds.features.row(1).setConstant(hi);
  ds.labels = {0, 0};
  return ds;
}

}  // namespace

TEST_CASE("range table flags test bounds outside the training envelope") {
  SUBCASE("contained test range raises no flags") {
    const auto rows = range_table(column_data(0.0, 10.0), column_data(2.0, 8.0));
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows) {
      CHECK(!r.low_flag);
      CHECK(!r.high_flag);
    }
    CHECK(rows[0].feature == "volt");
    CHECK(rows[3].feature == "vibration");
  }
  SUBCASE("the published volt row flags both sides") {
    const auto rows =
        range_table(column_data(121.989, 225.1894), column_data(119.059, 237.9385));
    CHECK(rows[0].train_min == 121.989);
    CHECK(rows[0].train_max == 225.1894);
    CHECK(rows[0].low_flag);
    CHECK(rows[0].high_flag);
  }
  SUBCASE("flags equal a brute-force scan") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    Dataset train, test;
    train.features.resize(30, kFeatureCount);
    test.features.resize(30, kFeatureCount);
    for (long i = 0; i < 30; ++i)
      for (int f = 0; f < kFeatureCount; ++f) {
        train.features(i, f) = u(rng);
        test.features(i, f) = u(rng);
      }
    train.labels.assign(30, 0);
    test.labels.assign(30, 0);

    const auto rows = range_table(train, test);
    for (int f = 0; f < kFeatureCount; ++f) {
      double tmin = train.features(0, f), tmax = tmin;
      double smin = test.features(0, f), smax = smin;
      for (long i = 1; i < 30; ++i) {
        tmin = std::min(tmin, train.features(i, f));
        tmax = std::max(tmax, train.features(i, f));
        smin = std::min(smin, test.features(i, f));
        smax = std::max(smax, test.features(i, f));
      }
      CHECK(rows[f].train_min == tmin);
      CHECK(rows[f].train_max == tmax);
      CHECK(rows[f].low_flag == (smin < tmin));
      CHECK(rows[f].high_flag == (smax > tmax));
    }
  }
  SUBCASE("empty inputs are rejected") {
    Dataset empty;
    empty.features.resize(0, kFeatureCount);
    CHECK_THROWS_AS(range_table(empty, column_data(0, 1)), std::invalid_argument);
  }
}

TEST_CASE("make_report derives the metric fields from the matrix") {
  ConfusionMatrix cm;
  cm.tp = 6;
  cm.fp = 1;
  cm.fn = 1;
  cm.tn = 992;
  const EvalReport r = make_report("ddqn", "device1", 0.2, 3, cm, 12.5);
  CHECK(r.algorithm == "ddqn");
  CHECK(r.device == "device1");
  CHECK(r.test_fraction == 0.2);
  CHECK(r.seed == 3);
  CHECK(r.precision == doctest::Approx(6.0 / 7.0).epsilon(1e-15));
  CHECK(r.recall == doctest::Approx(6.0 / 7.0).epsilon(1e-15));
  CHECK(r.f1 == doctest::Approx(0.857142857142857).epsilon(1e-12));
  CHECK(r.train_seconds == 12.5);
  CHECK(r.val_f1 == -1.0);
}
