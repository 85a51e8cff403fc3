#include "nlkg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nlkg {

std::vector<double> actions(const ModeState& state) {
  std::vector<double> I(state.size());
  for (std::size_t j = 0; j < state.size(); ++j) I[j] = std::norm(state[j]);
  return I;
}

double weighted_action_difference(const std::vector<double>& I, const std::vector<double>& ref,
                                  double s) {
  if (I.size() != ref.size()) throw std::invalid_argument("action difference: length mismatch");
  double acc = 0.0;
  for (std::size_t j = 0; j < I.size(); ++j) {
    const double d = I[j] - ref[j];
    acc += std::pow(static_cast<double>(j + 1), 2.0 * s) * d * d;
  }
  return std::sqrt(acc);
}

double action_drift(const Trajectory& traj, double s) {
  if (traj.states.empty()) return 0.0;
  const auto ref = actions(traj.states.front());
  double worst = 0.0;
  for (const auto& st : traj.states) {
    worst = std::max(worst, weighted_action_difference(actions(st), ref, s));
  }
  return worst;
}

DriftTracker::DriftTracker(const ModeState& initial, double s) : ref_(actions(initial)), s_(s) {}

void DriftTracker::update(const ModeState& state) {
  drift_ = std::max(drift_, weighted_action_difference(actions(state), ref_, s_));
}

EscapeResult escape_time(const Trajectory& traj, double radius, double s) {
  if (!(radius > 0.0)) throw std::invalid_argument("escape_time: radius must be positive");
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    if (sobolev_norm(traj.states[i], s) > radius) return {true, traj.times[i]};
  }
  return {false, traj.times.empty() ? 0.0 : traj.times.back()};
}

double torus_distance(const ModeState& state, const std::vector<double>& I_ref, double s1) {
  if (I_ref.size() != state.size()) throw std::invalid_argument("torus_distance: length mismatch");
  double acc = 0.0;
  for (std::size_t j = 0; j < state.size(); ++j) {
    if (I_ref[j] < 0.0) throw std::invalid_argument("torus_distance: negative reference action");
    const double d = std::abs(state[j]) - std::sqrt(I_ref[j]);
    acc += std::pow(static_cast<double>(j + 1), 2.0 * s1) * 2.0 * d * d;
  }
  return std::sqrt(acc);
}

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw std::invalid_argument("fit_scaling: need at least 3 points");
  ScalingFit fit;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw std::invalid_argument("fit_scaling: points must be positive");
    fit.xs.push_back(std::log(x));
    fit.ys.push_back(std::log(y));
  }
  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < fit.xs.size(); ++i) {
    mx += fit.xs[i];
    my += fit.ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < fit.xs.size(); ++i) {
    sxx += (fit.xs[i] - mx) * (fit.xs[i] - mx);
    sxy += (fit.xs[i] - mx) * (fit.ys[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_scaling: all x values coincide");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < fit.xs.size(); ++i) {
    const double e = fit.ys[i] - (fit.intercept + fit.slope * fit.xs[i]);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace nlkg
