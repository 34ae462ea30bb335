#pragma once

#include <functional>
#include <vector>

#include "softnet/dataset.hpp"

namespace softnet {

// Evaluation summary for a wrench regressor on one split.
struct EvalMetrics {
  Vec6 mae = Vec6::Zero();            // per channel
  Vec6 r2 = Vec6::Zero();             // per channel
  double magnitude_mae_n = 0.0;       // ||F_xy|| error
  double direction_mae_deg = 0.0;     // in-plane angle, where ||F_xy|| > 0.5 N
  double hysteresis_area_true = 0.0;  // loop area, Fy vs probe position
  double hysteresis_area_pred = 0.0;
  std::size_t samples = 0;
};

using Predictor = std::function<VecX(const DatasetRecord&)>;

EvalMetrics evaluate(const Predictor& predict, const std::vector<DatasetRecord>& recs);

// Signed shoelace area of the (position, value) loop.
double loop_area(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace softnet
