#include "softnet/metrics.hpp"

#include <cmath>

namespace softnet {

double loop_area(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) return 0.0;
  double a = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t j = (i + 1) % x.size();
    a += x[i] * y[j] - x[j] * y[i];
  }
  return 0.5 * a;
}

EvalMetrics evaluate(const Predictor& predict, const std::vector<DatasetRecord>& recs) {
  EvalMetrics m;
  Vec6 label_sum = Vec6::Zero();
  std::vector<Vec6> preds, labels;
  std::vector<double> pos, fy_true, fy_pred;
  double dir_sum = 0.0;
  std::size_t dir_n = 0;

  for (const auto& r : recs) {
    if (r.warmup) continue;
    const VecX p = predict(r);
    if (p.size() != 6) throw DomainError("evaluate: predictor must emit a wrench");
    preds.push_back(p);
    labels.push_back(r.wrench);
    m.mae += (p - r.wrench).cwiseAbs();
    label_sum += r.wrench;
    m.magnitude_mae_n += std::abs(p.head<2>().norm() - r.wrench.head<2>().norm());
    if (r.wrench.head<2>().norm() > 0.5) {
      double d = std::atan2(p[1], p[0]) - std::atan2(r.wrench[1], r.wrench[0]);
      while (d > M_PI) d -= 2.0 * M_PI;
      while (d < -M_PI) d += 2.0 * M_PI;
      dir_sum += std::abs(d) * 180.0 / M_PI;
      ++dir_n;
    }
    pos.push_back(r.probe_position_mm);
    fy_true.push_back(r.wrench[1]);
    fy_pred.push_back(p[1]);
  }
  if (preds.empty()) throw DomainError("evaluate: empty split");
  m.samples = preds.size();
  const double n = static_cast<double>(m.samples);
  m.mae /= n;
  m.magnitude_mae_n /= n;
  m.direction_mae_deg = dir_n ? dir_sum / dir_n : 0.0;

  const Vec6 mean = label_sum / n;
  Vec6 ss_res = Vec6::Zero(), ss_tot = Vec6::Zero();
  for (std::size_t i = 0; i < preds.size(); ++i) {
    ss_res += (preds[i] - labels[i]).cwiseAbs2();
    ss_tot += (labels[i] - mean).cwiseAbs2();
  }
  for (int c = 0; c < 6; ++c)
    m.r2[c] = ss_tot[c] > 1e-12 ? 1.0 - ss_res[c] / ss_tot[c] : 0.0;

  m.hysteresis_area_true = std::abs(loop_area(pos, fy_true));
  m.hysteresis_area_pred = std::abs(loop_area(pos, fy_pred));
  return m;
}

}  // namespace softnet
