#include "flexnac/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace flexnac {

MetricsReport compute_metrics(const SimLog& log, double window_begin,
                              double window_end) {
  if (log.n_joints < 1 || log.data.rows() < 1) {
    throw std::invalid_argument("compute_metrics: empty log");
  }
  const Index time_col = log.column("time");
  std::vector<Index> e_cols;
  e_cols.reserve(static_cast<std::size_t>(log.n_joints));
  for (Index j = 0; j < log.n_joints; ++j) {
    e_cols.push_back(log.column("e_" + std::to_string(j)));
  }

  MetricsReport report;
  report.window_begin = window_begin;
  report.window_end = window_end;
  report.per_joint.assign(static_cast<std::size_t>(log.n_joints), {});

  double total_sq = 0.0;
  for (Index r = 0; r < log.data.rows(); ++r) {
    const double t = log.data(r, time_col);
    if (t < window_begin || t >= window_end) continue;
    ++report.samples;
    for (Index j = 0; j < log.n_joints; ++j) {
      const double e = log.data(r, e_cols[static_cast<std::size_t>(j)]);
      auto& jm = report.per_joint[static_cast<std::size_t>(j)];
      jm.l2 += e * e;
      jm.linf = std::max(jm.linf, std::abs(e));
      total_sq += e * e;
    }
  }
  if (report.samples == 0) {
    throw std::invalid_argument("compute_metrics: window contains no samples");
  }
  for (auto& jm : report.per_joint) jm.l2 = std::sqrt(jm.l2);
  report.frobenius = std::sqrt(total_sq);
  return report;
}

} // namespace flexnac
