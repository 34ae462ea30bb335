#pragma once

#include <vector>

#include "softnet/dataset.hpp"
#include "softnet/mlp.hpp"

namespace softnet {

// k-nearest-neighbour regressor on normalized features (Euclidean,
// uniform mean over the k closest training points).
struct KnnRegressor {
  int k = 5;
  FeatureSet feature_set = FeatureSet::PoseRate;
  Normalizer normalizer;
  std::vector<VecX> train_x;  // normalized
  std::vector<VecX> train_y;  // raw label space

  VecX predict(const DatasetRecord& r) const;
};

KnnRegressor train_knn(const Dataset& data, FeatureSet fs, int k = 5);

// Ordinary least squares with a bias column and a small ridge term for
// conditioning.
struct LinearRegressor {
  FeatureSet feature_set = FeatureSet::PoseRate;
  MatX coeffs;  // (dim_out) x (dim_in + 1)

  VecX predict(const DatasetRecord& r) const;
};

LinearRegressor train_linear(const Dataset& data, FeatureSet fs, double ridge = 1e-8);

}  // namespace softnet
