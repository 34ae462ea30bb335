#include "softnet/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "softnet/rng.hpp"

namespace softnet {

void Normalizer::fit(const std::vector<VecX>& inputs, const std::vector<VecX>& outputs) {
  if (inputs.empty() || outputs.empty()) throw DomainError("Normalizer: empty data");
  const auto fit_one = [](const std::vector<VecX>& data, VecX& lo, VecX& hi) {
    lo = data.front();
    hi = data.front();
    for (const VecX& v : data) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
    for (int i = 0; i < lo.size(); ++i)
      if (hi[i] - lo[i] < 1e-12) hi[i] = lo[i] + 1.0;  // constant channel
  };
  fit_one(inputs, in_min, in_max);
  fit_one(outputs, out_min, out_max);
}

VecX Normalizer::normalize_in(const VecX& x, bool* clamped) const {
  if (clamped) *clamped = false;
  VecX out(x.size());
  for (int i = 0; i < x.size(); ++i) {
    double v = x[i];
    if (v < in_min[i] || v > in_max[i]) {
      v = std::clamp(v, in_min[i], in_max[i]);
      if (clamped) *clamped = true;
    }
    out[i] = 2.0 * (v - in_min[i]) / (in_max[i] - in_min[i]) - 1.0;
  }
  return out;
}

VecX Normalizer::normalize_out(const VecX& y) const {
  VecX out(y.size());
  for (int i = 0; i < y.size(); ++i)
    out[i] = 2.0 * (y[i] - out_min[i]) / (out_max[i] - out_min[i]) - 1.0;
  return out;
}

VecX Normalizer::denormalize_out(const VecX& y) const {
  VecX out(y.size());
  for (int i = 0; i < y.size(); ++i)
    out[i] = out_min[i] + (y[i] + 1.0) * 0.5 * (out_max[i] - out_min[i]);
  return out;
}

MLPModel MLPModel::init(const std::vector<int>& sizes, std::uint64_t seed) {
  if (sizes.size() < 2) throw DomainError("MLP needs at least input and output layers");
  MLPModel m;
  m.layer_sizes = sizes;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const double s = std::sqrt(6.0 / sizes[l]);  // scaled-uniform fan-in
    MatX w(sizes[l + 1], sizes[l]);
    for (int i = 0; i < w.rows(); ++i)
      for (int j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-s, s);
    m.weights.push_back(std::move(w));
    m.biases.push_back(VecX::Zero(sizes[l + 1]));
  }
  return m;
}

std::size_t MLPModel::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

VecX MLPModel::forward(const VecX& input) const {
  if (input.size() != layer_sizes.front()) throw DomainError("MLP forward: input size mismatch");
  VecX a = input;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    a = weights[l] * a + biases[l];
    if (l + 1 < weights.size()) a = a.cwiseMax(0.0);  // ReLU on hidden layers
  }
  return a;
}

void TrainConfig::validate() const {
  if (batch < 1 || learning_rate <= 0.0 || epochs < 1)
    throw ConfigError("TrainConfig: hyperparameters must be positive");
}

namespace {

// Forward with per-layer caches, then backprop of 0.5*||out - target||^2
// accumulated into dw/db.
void backprop(const MLPModel& m, const VecX& input, const VecX& target, std::vector<MatX>& dw,
              std::vector<VecX>& db, double* loss) {
  const std::size_t nl = m.weights.size();
  std::vector<VecX> acts(nl + 1);
  std::vector<VecX> pre(nl);
  acts[0] = input;
  for (std::size_t l = 0; l < nl; ++l) {
    pre[l] = m.weights[l] * acts[l] + m.biases[l];
    acts[l + 1] = (l + 1 < nl) ? pre[l].cwiseMax(0.0).eval() : pre[l];
  }
  const VecX err = acts[nl] - target;
  if (loss) *loss += 0.5 * err.squaredNorm();
  VecX delta = err;
  for (std::size_t l = nl; l-- > 0;) {
    dw[l].noalias() += delta * acts[l].transpose();
    db[l] += delta;
    if (l > 0) {
      delta = m.weights[l].transpose() * delta;
      for (int i = 0; i < delta.size(); ++i)
        if (pre[l - 1][i] <= 0.0) delta[i] = 0.0;
    }
  }
}

double mse(const MLPModel& m, const std::vector<VecX>& x, const std::vector<VecX>& y) {
  if (x.empty()) return 0.0;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) ss += (m.forward(x[i]) - y[i]).squaredNorm();
  return ss / (static_cast<double>(x.size()) * y.front().size());
}

}  // namespace

TrainLog mlp_train(MLPModel& model, const std::vector<VecX>& x_train,
                   const std::vector<VecX>& y_train, const std::vector<VecX>& x_test,
                   const std::vector<VecX>& y_test, const TrainConfig& cfg) {
  cfg.validate();
  if (x_train.empty() || x_train.size() != y_train.size())
    throw DomainError("mlp_train: empty or mismatched training data");

  const std::size_t nl = model.weights.size();
  std::vector<MatX> dw(nl), mw(nl), vw(nl);
  std::vector<VecX> db(nl), mb(nl), vb(nl);
  for (std::size_t l = 0; l < nl; ++l) {
    dw[l] = MatX::Zero(model.weights[l].rows(), model.weights[l].cols());
    mw[l] = dw[l];
    vw[l] = dw[l];
    db[l] = VecX::Zero(model.biases[l].size());
    mb[l] = db[l];
    vb[l] = db[l];
  }

  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(x_train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainLog log;
  MLPModel best = model;
  double best_test = std::numeric_limits<double>::infinity();
  long step = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates with our own RNG so the permutation is stable.
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.integer(i)]);

    double epoch_loss = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      const std::size_t end = std::min(order.size(), start + cfg.batch);
      for (std::size_t l = 0; l < nl; ++l) {
        dw[l].setZero();
        db[l].setZero();
      }
      double batch_loss = 0.0;
      for (std::size_t i = start; i < end; ++i)
        backprop(model, x_train[order[i]], y_train[order[i]], dw, db, &batch_loss);
      const double inv = 1.0 / static_cast<double>(end - start);
      epoch_loss += batch_loss;
      seen += end - start;
      ++step;
      const double corr = std::sqrt(1.0 - std::pow(b2, step)) / (1.0 - std::pow(b1, step));
      for (std::size_t l = 0; l < nl; ++l) {
        mw[l] = b1 * mw[l] + (1.0 - b1) * (dw[l] * inv);
        vw[l] = b2 * vw[l].array().matrix() +
                (1.0 - b2) * (dw[l] * inv).array().square().matrix();
        model.weights[l].array() -=
            cfg.learning_rate * corr * mw[l].array() / (vw[l].array().sqrt() + eps);
        mb[l] = b1 * mb[l] + (1.0 - b1) * (db[l] * inv);
        vb[l] = b2 * vb[l].array().matrix() + (1.0 - b2) * (db[l] * inv).array().square().matrix();
        model.biases[l].array() -=
            cfg.learning_rate * corr * mb[l].array() / (vb[l].array().sqrt() + eps);
      }
    }
    const double train_mse =
        2.0 * epoch_loss / (static_cast<double>(seen) * y_train.front().size());
    if (!std::isfinite(train_mse)) throw FitError("mlp_train: loss diverged to NaN/inf");
    log.train_mse.push_back(train_mse);
    const double test_mse = x_test.empty() ? train_mse : mse(model, x_test, y_test);
    log.test_mse.push_back(test_mse);
    if (test_mse < best_test) {
      best_test = test_mse;
      best = model;
      log.best_epoch = epoch;
    }
  }
  model = best;  // best-on-test snapshot
  return log;
}

double gradient_check(const MLPModel& model, const VecX& input, const VecX& target) {
  const std::size_t nl = model.weights.size();
  std::vector<MatX> dw(nl);
  std::vector<VecX> db(nl);
  for (std::size_t l = 0; l < nl; ++l) {
    dw[l] = MatX::Zero(model.weights[l].rows(), model.weights[l].cols());
    db[l] = VecX::Zero(model.biases[l].size());
  }
  backprop(model, input, target, dw, db, nullptr);

  MLPModel probe = model;
  const double h = 1e-5;
  auto loss_at = [&]() {
    const VecX e = probe.forward(input) - target;
    return 0.5 * e.squaredNorm();
  };
  double max_dev = 0.0;
  auto check = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + h;
    const double lp = loss_at();
    param = saved - h;
    const double lm = loss_at();
    param = saved;
    const double fd = (lp - lm) / (2.0 * h);
    const double denom = std::max({std::abs(fd), std::abs(analytic), 1e-8});
    max_dev = std::max(max_dev, std::abs(fd - analytic) / denom);
  };
  for (std::size_t l = 0; l < nl; ++l) {
    for (int i = 0; i < probe.weights[l].rows(); ++i)
      for (int j = 0; j < probe.weights[l].cols(); ++j) check(probe.weights[l](i, j), dw[l](i, j));
    for (int i = 0; i < probe.biases[l].size(); ++i) check(probe.biases[l][i], db[l][i]);
  }
  return max_dev;
}

VecX Regressor::predict(const DatasetRecord& r) const {
  return normalizer.denormalize_out(model.forward(normalizer.normalize_in(make_features(r, feature_set))));
}

namespace {

void split_features(const std::vector<DatasetRecord>& recs, FeatureSet fs,
                    bool node_labels, std::vector<VecX>& x, std::vector<VecX>& y) {
  for (const auto& r : recs) {
    if (r.warmup) continue;  // velocity undefined before one window
    if (node_labels && r.nodes.size() == 0) throw DomainError("dataset lacks node labels");
    x.push_back(make_features(r, fs));
    y.push_back(node_labels ? r.nodes : VecX(r.wrench));
  }
  if (x.empty()) throw DomainError("no usable records in split");
}

Regressor train_regressor(const Dataset& data, FeatureSet fs, std::vector<int> hidden,
                          bool node_labels, const TrainConfig& cfg) {
  std::vector<VecX> xtr, ytr, xte, yte;
  split_features(data.train, fs, node_labels, xtr, ytr);
  if (!data.test.empty()) split_features(data.test, fs, node_labels, xte, yte);

  Regressor reg;
  reg.feature_set = fs;
  reg.normalizer.fit(xtr, ytr);
  for (auto& v : xtr) v = reg.normalizer.normalize_in(v);
  for (auto& v : ytr) v = reg.normalizer.normalize_out(v);
  for (auto& v : xte) v = reg.normalizer.normalize_in(v);
  for (auto& v : yte) v = reg.normalizer.normalize_out(v);

  std::vector<int> sizes;
  sizes.push_back(static_cast<int>(xtr.front().size()));
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(static_cast<int>(ytr.front().size()));
  reg.model = MLPModel::init(sizes, cfg.seed);
  reg.log = mlp_train(reg.model, xtr, ytr, xte, yte, cfg);
  return reg;
}

}  // namespace

Regressor train_wrench(const Dataset& data, FeatureSet fs, const TrainConfig& cfg) {
  return train_regressor(data, fs, {1000, 100, 50}, false, cfg);
}

Regressor train_kinesthesia(const Dataset& data, const TrainConfig& cfg) {
  return train_regressor(data, FeatureSet::Pose, {150, 200, 150}, true, cfg);
}

double kinesthesia_positional_error(const Regressor& reg, const std::vector<DatasetRecord>& recs) {
  if (recs.empty()) throw DomainError("kinesthesia_positional_error: empty split");
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& r : recs) {
    if (r.nodes.size() == 0) continue;
    const VecX pred = reg.predict(r);
    const int points = static_cast<int>(r.nodes.size() / 3);
    double sum = 0.0;
    for (int i = 0; i < points; ++i)
      sum += (pred.segment<3>(3 * i) - r.nodes.segment<3>(3 * i)).norm();
    total += sum / points;
    ++n;
  }
  if (n == 0) throw DomainError("no node-labelled records");
  return total / static_cast<double>(n);
}

}  // namespace softnet
