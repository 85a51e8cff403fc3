// Actions, drift, escape times, torus distance and power-law fits.

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "nlkg/integrators.hpp"

namespace nlkg {

// I_j = |psi_j|^2
std::vector<double> actions(const ModeState& state);

// (sum_j j^{2s} |I_j - I_ref,j|^2)^{1/2}
double weighted_action_difference(const std::vector<double>& I, const std::vector<double>& ref,
                                  double s);

// sup over recorded times of the weighted action difference to t = 0.
double action_drift(const Trajectory& traj, double s);

// Running version for streamed runs.
class DriftTracker {
 public:
  DriftTracker(const ModeState& initial, double s);
  void update(const ModeState& state);
  double value() const noexcept { return drift_; }

 private:
  std::vector<double> ref_;
  double s_;
  double drift_{0.0};
};

struct EscapeResult {
  bool escaped{false};
  double time{0.0};  // escape time, or the horizon when survived
};

EscapeResult escape_time(const Trajectory& traj, double radius, double s);

// (sum_j j^{2 s1} 2 |sqrt(I_j) - sqrt(I_ref,j)|^2)^{1/2}
double torus_distance(const ModeState& state, const std::vector<double>& I_ref, double s1);

struct ScalingFit {
  std::vector<double> xs;  // log x
  std::vector<double> ys;  // log y
  double slope{0.0};
  double intercept{0.0};
  double residual{0.0};  // RMS
};

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points);

}  // namespace nlkg
