#include <cmath>

#include "doctest.h"
#include "softnet/baselines.hpp"
#include "softnet/metrics.hpp"
#include "softnet/mlp.hpp"
#include "softnet/rng.hpp"

using namespace softnet;

namespace {

// y = A x + b on random inputs; closed-form realizable by a linear net.
void make_linear_task(int n, std::uint64_t seed, std::vector<VecX>& xs, std::vector<VecX>& ys) {
  Rng rng(seed);
  MatX a(2, 3);
  a << 0.5, -1.0, 2.0, 1.5, 0.25, -0.75;
  VecX b(2);
  b << 0.1, -0.2;
  for (int i = 0; i < n; ++i) {
    VecX x(3);
    for (int j = 0; j < 3; ++j) x[j] = rng.uniform(-1.0, 1.0);
    xs.push_back(x);
    ys.push_back(a * x + b);
  }
}

Dataset linear_dataset(int n, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d;
  for (int i = 0; i < n; ++i) {
    DatasetRecord r;
    r.timestamp_s = 0.01 * i;
    for (int j = 0; j < 6; ++j) r.pose[j] = rng.uniform(-5.0, 5.0);
    r.rate = 0.1 * r.pose;
    r.accel = Vec6::Zero();
    // Exactly linear label map within the declared maxima.
    r.wrench = 0.5 * r.pose + 2.0 * r.rate;
    (i % 3 == 2 ? d.test : d.train).push_back(r);
  }
  return d;
}

}  // namespace

TEST_CASE("forward pass matches a hand-rolled dense oracle") {
  const MLPModel m = MLPModel::init({3, 5, 2}, 42);
  Rng rng(7);
  VecX x(3);
  for (int i = 0; i < 3; ++i) x[i] = rng.uniform(-1.0, 1.0);
  // Naive re-implementation: affine + ReLU + affine.
  VecX h = m.weights[0] * x + m.biases[0];
  for (int i = 0; i < h.size(); ++i) h[i] = std::max(0.0, h[i]);
  const VecX expect = m.weights[1] * h + m.biases[1];
  CHECK((m.forward(x) - expect).norm() <= 1e-12);
}

TEST_CASE("zero-weight model outputs its biases; dimension mismatch throws") {
  MLPModel m = MLPModel::init({2, 3, 2}, 1);
  for (auto& w : m.weights) w.setZero();
  m.biases[0].setZero();
  m.biases[1] << 0.5, -1.5;
  VecX x(2);
  x << 3.0, -4.0;
  const VecX y = m.forward(x);
  CHECK(y[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(y[1] == doctest::Approx(-1.5).epsilon(1e-15));
  VecX bad(3);
  bad.setZero();
  CHECK_THROWS_AS(m.forward(bad), DomainError);
}

TEST_CASE("gradient check: backprop vs finite differences") {
  const MLPModel m = MLPModel::init({4, 8, 6, 3}, 9);
  Rng rng(5);
  VecX x(4), y(3);
  for (int i = 0; i < 4; ++i) x[i] = rng.uniform(-0.8, 0.8);
  for (int i = 0; i < 3; ++i) y[i] = rng.uniform(-0.8, 0.8);
  CHECK(gradient_check(m, x, y) < 1e-6);
}

TEST_CASE("training a linear task reaches near-zero loss; seeded runs identical") {
  std::vector<VecX> xs, ys;
  make_linear_task(100, 3, xs, ys);
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.learning_rate = 0.01;
  cfg.seed = 17;
  auto train_once = [&]() {
    MLPModel m = MLPModel::init({3, 16, 2}, cfg.seed);
    return std::make_pair(m, mlp_train(m, xs, ys, xs, ys, cfg));
  };
  auto [m1, log1] = train_once();
  auto [m2, log2] = train_once();
  CHECK(log1.test_mse.back() < 1e-3);
  REQUIRE(log1.train_mse.size() == log2.train_mse.size());
  for (std::size_t i = 0; i < log1.train_mse.size(); ++i)
    CHECK(log1.train_mse[i] == log2.train_mse[i]);
  for (std::size_t l = 0; l < m1.weights.size(); ++l)
    CHECK((m1.weights[l] - m2.weights[l]).norm() == 0.0);
}

TEST_CASE("training rejects empty data") {
  std::vector<VecX> none;
  MLPModel m = MLPModel::init({2, 2}, 0);
  CHECK_THROWS(mlp_train(m, none, none, none, none, TrainConfig{}));
}

TEST_CASE("normalizer round trip is exact and maps the range onto [-1, 1]") {
  std::vector<VecX> xs, ys;
  make_linear_task(50, 8, xs, ys);
  Normalizer norm;
  norm.fit(xs, ys);
  for (const auto& x : xs) {
    const VecX n = norm.normalize_in(x);
    for (int i = 0; i < n.size(); ++i) {
      CHECK(n[i] <= 1.0 + 1e-12);
      CHECK(n[i] >= -1.0 - 1e-12);
    }
  }
  for (const auto& y : ys) {
    const VecX round = norm.denormalize_out(norm.normalize_out(y));
    CHECK((round - y).norm() <= 1e-12 * std::max(1.0, y.norm()));
  }
  // Out-of-range inputs clamp and flag.
  VecX far = xs[0];
  far[0] = 1e6;
  bool clamped = false;
  const VecX n = norm.normalize_in(far, &clamped);
  CHECK(clamped);
  CHECK(n[0] <= 1.0);
}

TEST_CASE("feature sets select the right dimensions") {
  CHECK(feature_dim(FeatureSet::Pose) == 6);
  CHECK(feature_dim(FeatureSet::PoseRate) == 12);
  CHECK(feature_dim(FeatureSet::PoseRateAccel) == 18);
  DatasetRecord r;
  r.pose[0] = 1.0;
  r.rate[0] = 2.0;
  r.accel[0] = 3.0;
  const VecX f = make_features(r, FeatureSet::PoseRateAccel);
  CHECK(f[0] == 1.0);
  CHECK(f[6] == 2.0);
  CHECK(f[12] == 3.0);
}

TEST_CASE("linear baseline recovers an exactly linear map") {
  const Dataset d = linear_dataset(240, 4);
  const LinearRegressor lin = train_linear(d, FeatureSet::PoseRate);
  const EvalMetrics m = evaluate([&](const DatasetRecord& r) { return lin.predict(r); }, d.test);
  for (int i = 0; i < 6; ++i) {
    CHECK(m.mae[i] <= 1e-8);
    CHECK(m.r2[i] == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("KNN with k=1 recalls its own training set exactly") {
  const Dataset d = linear_dataset(90, 12);
  const KnnRegressor knn = train_knn(d, FeatureSet::PoseRate, 1);
  for (const auto& r : d.train) CHECK((knn.predict(r) - VecX(r.wrench)).norm() <= 1e-12);
}

TEST_CASE("evaluate: perfect predictor scores zero error and unit R2") {
  const Dataset d = linear_dataset(120, 5);
  const EvalMetrics m = evaluate([](const DatasetRecord& r) { return VecX(r.wrench); }, d.test);
  CHECK(m.mae.norm() == 0.0);
  for (int i = 0; i < 6; ++i) CHECK(m.r2[i] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.magnitude_mae_n == 0.0);
  CHECK(std::abs(m.hysteresis_area_true - m.hysteresis_area_pred) <= 1e-12);
  CHECK_THROWS(evaluate([](const DatasetRecord& r) { return VecX(r.wrench); }, {}));
}

TEST_CASE("monotone metric contract: uniformly worse predictor has larger MAE") {
  const Dataset d = linear_dataset(120, 6);
  const EvalMetrics good =
      evaluate([](const DatasetRecord& r) { return VecX(r.wrench + 0.1 * Vec6::Ones()); }, d.test);
  const EvalMetrics bad =
      evaluate([](const DatasetRecord& r) { return VecX(r.wrench + 0.5 * Vec6::Ones()); }, d.test);
  for (int i = 0; i < 6; ++i) CHECK(bad.mae[i] > good.mae[i]);
}

TEST_CASE("loop area: shoelace oracle on a unit square") {
  const std::vector<double> x = {0.0, 1.0, 1.0, 0.0};
  const std::vector<double> y = {0.0, 0.0, 1.0, 1.0};
  CHECK(std::abs(loop_area(x, y)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("wrench and kinesthesia architectures match the published shapes") {
  const Dataset d = linear_dataset(60, 9);
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.seed = 2;
  const Regressor w = train_wrench(d, FeatureSet::PoseRate, cfg);
  REQUIRE(w.model.layer_sizes.size() == 5);
  CHECK(w.model.layer_sizes[0] == 12);
  CHECK(w.model.layer_sizes[1] == 1000);
  CHECK(w.model.layer_sizes[2] == 100);
  CHECK(w.model.layer_sizes[3] == 50);
  CHECK(w.model.layer_sizes[4] == 6);

  Dataset dk = d;
  for (auto* split : {&dk.train, &dk.test})
    for (auto& r : *split) r.nodes = VecX::Zero(78);
  const Regressor k = train_kinesthesia(dk, cfg);
  REQUIRE(k.model.layer_sizes.size() >= 5);
  CHECK(k.model.layer_sizes[0] == 6);
  CHECK(k.model.layer_sizes[1] == 150);
  CHECK(k.model.layer_sizes[2] == 200);
  CHECK(k.model.layer_sizes[3] == 150);
  CHECK(k.model.layer_sizes.back() == 78);
}

TEST_CASE("kinesthesia training requires node labels") {
  const Dataset d = linear_dataset(40, 10);  // no node labels attached
  CHECK_THROWS(train_kinesthesia(d, TrainConfig{}));
}
