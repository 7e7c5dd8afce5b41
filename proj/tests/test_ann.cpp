#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "rlsurv/ann.hpp"
#include "rlsurv/metrics.hpp"

using namespace rlsurv;

namespace {

const Eigen::Vector2d kUnitWeights(1.0, 1.0);

Dataset toy_clusters(long per_class, std::uint64_t seed) {
  Dataset ds;
  const long n = 2 * per_class;
  ds.features.resize(n, 4);
  ds.labels.resize(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.05);
  for (long i = 0; i < n; ++i) {
    const int label = i < per_class ? 0 : 1;
    const double center = label == 0 ? 0.25 : 0.75;
    for (int f = 0; f < 4; ++f) ds.features(i, f) = center + noise(rng);
    ds.labels[i] = label;
  }
  ds.name = "toy";
  return ds;
}

}  // namespace

TEST_CASE("uniform logits cost ln 2") {
  Matrix logits = Matrix::Zero(1, 2);
  const auto [loss, grad] = softmax_xent_loss_and_grad(logits, {0}, kUnitWeights);
  CHECK(loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(grad(0, 0) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(grad(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("huge logits neither overflow nor explode") {
  Matrix logits(1, 2);
  logits << 1000.0, -1000.0;
  const auto [loss, grad] = softmax_xent_loss_and_grad(logits, {0}, kUnitWeights);
  CHECK(std::isfinite(loss));
  CHECK(loss < 1e-9);
  CHECK(std::isfinite(grad(0, 0)));
  CHECK(std::isfinite(grad(0, 1)));

  logits << -1000.0, 1000.0;  // confidently wrong: loss is the logit gap
  const auto [wrong, wgrad] = softmax_xent_loss_and_grad(logits, {0}, kUnitWeights);
  CHECK(wrong == doctest::Approx(2000.0).epsilon(1e-12));
  CHECK(std::isfinite(wgrad(0, 0)));
}

TEST_CASE("gradient is softmax minus one-hot over batch size") {
  Matrix logits(2, 2);
  logits << 2.0, 1.0, -1.0, 3.0;
  const std::vector<int> labels = {0, 1};
  const auto [loss, grad] = softmax_xent_loss_and_grad(logits, labels, kUnitWeights);

  for (long i = 0; i < 2; ++i) {
    const double m = std::max(logits(i, 0), logits(i, 1));
    const double e0 = std::exp(logits(i, 0) - m);
    const double e1 = std::exp(logits(i, 1) - m);
    const double p0 = e0 / (e0 + e1);
    const double p1 = e1 / (e0 + e1);
    CHECK(grad(i, 0) == doctest::Approx((p0 - (labels[i] == 0 ? 1 : 0)) / 2.0).epsilon(1e-12));
    CHECK(grad(i, 1) == doctest::Approx((p1 - (labels[i] == 1 ? 1 : 0)) / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("cross-entropy gradient matches finite differences") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const double h = 1e-6;
  double worst = 0.0;
  for (int rep = 0; rep < 30; ++rep) {
    const long n = 1 + static_cast<long>(rng() % 8);
    Matrix logits(n, 2);
    std::vector<int> labels(n);
    for (long i = 0; i < n; ++i) {
      logits(i, 0) = u(rng);
      logits(i, 1) = u(rng);
      labels[i] = static_cast<int>(rng() % 2);
    }
    Eigen::Vector2d weights(0.5 + u(rng) * 0.1 + 0.3, 1.7);

    const auto [loss, grad] = softmax_xent_loss_and_grad(logits, labels, weights);
    for (long i = 0; i < n; ++i) {
      for (long j = 0; j < 2; ++j) {
        Matrix bumped = logits;
        bumped(i, j) += h;
        const double up = softmax_xent_loss_and_grad(bumped, labels, weights).first;
        bumped(i, j) -= 2 * h;
        const double down = softmax_xent_loss_and_grad(bumped, labels, weights).first;
        const double fd = (up - down) / (2 * h);
        const double rel = std::abs(fd - grad(i, j)) /
                           std::max({1.0, std::abs(fd), std::abs(grad(i, j))});
        worst = std::max(worst, rel);
      }
    }
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("class weights scale loss and gradient per label") {
  Matrix logits = Matrix::Zero(1, 2);
  Eigen::Vector2d weights(2.0, 3.0);
  const auto [l0, g0] = softmax_xent_loss_and_grad(logits, {0}, weights);
  CHECK(l0 == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(g0(0, 0) == doctest::Approx(2.0 * -0.5).epsilon(1e-12));
  const auto [l1, g1] = softmax_xent_loss_and_grad(logits, {1}, weights);
  CHECK(l1 == doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(g1(0, 1) == doctest::Approx(3.0 * -0.5).epsilon(1e-12));
}

TEST_CASE("input validation") {
  Matrix logits = Matrix::Zero(2, 2);
  CHECK_THROWS_AS(softmax_xent_loss_and_grad(logits, {0}, kUnitWeights),
                  std::invalid_argument);
  CHECK_THROWS_AS(softmax_xent_loss_and_grad(logits, {0, 2}, kUnitWeights),
                  std::invalid_argument);
  Matrix wide = Matrix::Zero(1, 3);
  CHECK_THROWS_AS(softmax_xent_loss_and_grad(wide, {0}, kUnitWeights),
                  std::invalid_argument);
}

TEST_CASE("one epoch performs ceil(N / batch) updates") {
  AnnConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 32;
  const Dataset toy = toy_clusters(50, 1);  // 100 rows -> 4 batches
  const AnnResult r = train_ann(cfg, toy, toy);
  CHECK(r.update_count == 4);

  AnnConfig zero = cfg;
  zero.epochs = 0;
  CHECK_THROWS_AS(train_ann(zero, toy, toy), std::invalid_argument);
}

TEST_CASE("training is seed-deterministic") {
  AnnConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 77;
  const Dataset toy = toy_clusters(40, 2);
  const Dataset val = toy_clusters(10, 3);
  const AnnResult a = train_ann(cfg, toy, val);
  const AnnResult b = train_ann(cfg, toy, val);
  CHECK(parameters_equal(a.net, b.net));
  REQUIRE(a.curve.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(a.curve[i].mean_loss == b.curve[i].mean_loss);
    CHECK(a.curve[i].val_f1 == b.curve[i].val_f1);
  }

  AnnConfig other = cfg;
  other.seed = 78;
  const AnnResult c = train_ann(other, toy, val);
  CHECK(!parameters_equal(a.net, c.net));
}

TEST_CASE("the toy fixture is learned and the loss really drops") {
  AnnConfig cfg;
  cfg.epochs = 50;
  cfg.seed = 5;
  const Dataset toy = toy_clusters(100, 8);
  const Dataset val = toy_clusters(25, 9);
  const AnnResult r = train_ann(cfg, toy, val);

  const std::vector<int> preds = predict_ann(r.net, toy.features);
  long correct = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) correct += preds[i] == toy.labels[i];
  CHECK(static_cast<double>(correct) / toy.size() >= 0.95);

  REQUIRE(r.curve.size() == 50);
  CHECK(r.curve.back().mean_loss < r.curve.front().mean_loss);
  CHECK(r.best_val_f1 > 0.9);
  CHECK(r.train_seconds > 0.0);
}

TEST_CASE("the restored snapshot reproduces its recorded validation F1") {
  AnnConfig cfg;
  cfg.epochs = 10;
  cfg.seed = 6;
  const Dataset toy = toy_clusters(30, 10);
  const Dataset val = toy_clusters(10, 11);
  const AnnResult r = train_ann(cfg, toy, val);
  const std::vector<int> preds = predict_ann(r.net, val.features);
  CHECK(f1_score(confusion(preds, val.labels)) == r.best_val_f1);
  double best = -1.0;
  for (const auto& p : r.curve) best = std::max(best, p.val_f1);
  CHECK(r.best_val_f1 == best);
}

TEST_CASE("single-class training data is rejected") {
  Dataset single;
  single.features = Matrix::Zero(10, 4);
  single.labels.assign(10, 0);
  AnnConfig cfg;
  CHECK_THROWS_AS(train_ann(cfg, single, single), std::invalid_argument);
}

TEST_CASE("prediction is argmax with ties to zero and shift invariance") {
  Mlp net = init_mlp({4, 2}, 1);
  for (auto& w : net.weights) w.setZero();
  net.biases[0] << 0.0, 0.0;
  Matrix states = Matrix::Random(5, 4);
  for (int p : predict_ann(net, states)) CHECK(p == 0);

  net.biases[0] << 0.3, 0.31;
  for (int p : predict_ann(net, states)) CHECK(p == 1);

  // adding a constant to both logits must not change the decision
  Mlp shifted = net;
  shifted.biases[0].array() += 40.0;
  CHECK(predict_ann(net, states) == predict_ann(shifted, states));

  // batch equals per-row
  Mlp random_net = init_mlp({4, 8, 2}, 9);
  const std::vector<int> batch = predict_ann(random_net, states);
  for (long i = 0; i < states.rows(); ++i) {
    CHECK(predict_ann(random_net, states.row(i))[0] == batch[i]);
  }
}
