#pragma once

#include <functional>
#include <vector>

#include "softnet/common.hpp"
#include "softnet/dataset.hpp"

namespace softnet {

// Per-channel [-1, 1] scaling fitted on the training range.
struct Normalizer {
  VecX in_min, in_max, out_min, out_max;

  void fit(const std::vector<VecX>& inputs, const std::vector<VecX>& outputs);
  VecX normalize_in(const VecX& x, bool* clamped = nullptr) const;
  VecX normalize_out(const VecX& y) const;
  VecX denormalize_out(const VecX& y) const;
};

struct MLPModel {
  std::vector<int> layer_sizes;
  std::vector<MatX> weights;  // weights[l]: layer_sizes[l+1] x layer_sizes[l]
  std::vector<VecX> biases;
  std::string activation = "relu";  // hidden layers; identity output

  static MLPModel init(const std::vector<int>& sizes, std::uint64_t seed);
  VecX forward(const VecX& input) const;
  std::size_t parameter_count() const;
};

struct TrainConfig {
  int batch = 32;
  double learning_rate = 0.001;
  int epochs = 60;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainLog {
  std::vector<double> train_mse;
  std::vector<double> test_mse;
  int best_epoch = -1;
};

// Epoch-shuffled minibatch Adam on MSE; keeps the snapshot that performs
// best on the test split. Deterministic under cfg.seed. Throws on empty
// data or NaN loss.
TrainLog mlp_train(MLPModel& model, const std::vector<VecX>& x_train,
                   const std::vector<VecX>& y_train, const std::vector<VecX>& x_test,
                   const std::vector<VecX>& y_test, const TrainConfig& cfg);

// Backprop vs central finite differences (step 1e-5) on one (input,
// target) pair; returns the maximum relative deviation over parameters.
double gradient_check(const MLPModel& model, const VecX& input, const VecX& target);

// A trained regressor with its normalization and feature contract.
struct Regressor {
  MLPModel model;
  Normalizer normalizer;
  FeatureSet feature_set = FeatureSet::PoseRate;
  TrainLog log;

  VecX predict(const DatasetRecord& r) const;
};

// Wrench regressor: features -> 1000 -> 100 -> 50 -> 6.
Regressor train_wrench(const Dataset& data, FeatureSet fs, const TrainConfig& cfg = {});

// Kinesthesia regressor: D (6) -> 150 -> 200 -> 150 -> 78 node coordinates.
Regressor train_kinesthesia(const Dataset& data, const TrainConfig& cfg = {});

// Mean per-sample positional error sum||Ni_hat - Ni||/26 in mm.
double kinesthesia_positional_error(const Regressor& reg, const std::vector<DatasetRecord>& recs);

}  // namespace softnet
