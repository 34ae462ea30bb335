#include "softnet/baselines.hpp"

#include <algorithm>

namespace softnet {

namespace {

void collect(const std::vector<DatasetRecord>& recs, FeatureSet fs, std::vector<VecX>& x,
             std::vector<VecX>& y) {
  for (const auto& r : recs) {
    if (r.warmup) continue;
    x.push_back(make_features(r, fs));
    y.push_back(r.wrench);
  }
  if (x.empty()) throw DomainError("baseline: no usable records");
}

}  // namespace

VecX KnnRegressor::predict(const DatasetRecord& r) const {
  if (train_x.empty()) throw DomainError("knn: untrained");
  const VecX q = normalizer.normalize_in(make_features(r, feature_set));
  std::vector<std::pair<double, std::size_t>> dist(train_x.size());
  for (std::size_t i = 0; i < train_x.size(); ++i)
    dist[i] = {(train_x[i] - q).squaredNorm(), i};
  const std::size_t kk = std::min<std::size_t>(k, dist.size());
  std::partial_sort(dist.begin(), dist.begin() + kk, dist.end());
  VecX out = VecX::Zero(train_y.front().size());
  for (std::size_t i = 0; i < kk; ++i) out += train_y[dist[i].second];
  return out / static_cast<double>(kk);
}

KnnRegressor train_knn(const Dataset& data, FeatureSet fs, int k) {
  if (k < 1) throw ConfigError("knn: k must be positive");
  KnnRegressor reg;
  reg.k = k;
  reg.feature_set = fs;
  std::vector<VecX> x, y;
  collect(data.train, fs, x, y);
  reg.normalizer.fit(x, y);
  for (auto& v : x) v = reg.normalizer.normalize_in(v);
  reg.train_x = std::move(x);
  reg.train_y = std::move(y);
  return reg;
}

VecX LinearRegressor::predict(const DatasetRecord& r) const {
  if (coeffs.size() == 0) throw DomainError("linear: untrained");
  const VecX f = make_features(r, feature_set);
  VecX aug(f.size() + 1);
  aug << f, 1.0;
  return coeffs * aug;
}

LinearRegressor train_linear(const Dataset& data, FeatureSet fs, double ridge) {
  std::vector<VecX> x, y;
  collect(data.train, fs, x, y);
  const int din = static_cast<int>(x.front().size()) + 1;
  const int dout = static_cast<int>(y.front().size());
  MatX xtx = MatX::Identity(din, din) * ridge;
  MatX xty = MatX::Zero(din, dout);
  for (std::size_t i = 0; i < x.size(); ++i) {
    VecX aug(din);
    aug << x[i], 1.0;
    xtx.noalias() += aug * aug.transpose();
    xty.noalias() += aug * y[i].transpose();
  }
  LinearRegressor reg;
  reg.feature_set = fs;
  reg.coeffs = xtx.ldlt().solve(xty).transpose();
  return reg;
}

}  // namespace softnet
