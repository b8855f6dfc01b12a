#pragma once

#include <vector>

#include "flexnac/scenario.hpp"
#include "flexnac/types.hpp"

namespace flexnac {

struct JointMetrics {
  double l2 = 0.0;   ///< √(Σ_t e²) over the window
  double linf = 0.0; ///< max_t |e|
};

struct MetricsReport {
  double window_begin = 0.0;
  double window_end = 0.0;
  Index samples = 0;
  std::vector<JointMetrics> per_joint;
  double frobenius = 0.0; ///< √(Σ_{j,t} e²), all joints pooled
};

/// Tracking-error metrics from the e_<j> columns over log rows with
/// window_begin ≤ time < window_end. Throws if the window is empty.
MetricsReport compute_metrics(const SimLog& log, double window_begin,
                              double window_end);

} // namespace flexnac
