// Long-time runs of the Galerkin NLKG: R sweeps, c sweeps and the small-data
// corollary.

#pragma once

#include <cstdint>
#include <vector>

#include "nlkg/diagnostics.hpp"
#include "nlkg/integrators.hpp"

namespace nlkg {

struct IntegratorConfig {
  SplittingScheme scheme{SplittingScheme::yoshida4};
  double dt{0.01};
  // dt(c) = min(dt, dt_scaling c^{-3/2}); the splitting error grows with c.
  double dt_scaling{0.04};
  std::size_t record_every{10};

  double dt_for(double c) const;
};

// Random phases, |psi_j| proportional to j^{-(s+1)}, scaled to ||psi||_s = norm.
ModeState make_initial_state(std::size_t J, double s, double norm, std::uint64_t seed,
                             std::uint64_t index = 0);

struct RunSpec {
  double c{1.0};
  double R{0.1};
  double K{1.0};               // ||psi_0||_s = K R, escape radius 2 K R
  double drift_horizon{1.0};   // action drift and torus distance tracked up to here
  double escape_horizon{1.0};  // run length when no escape happens
  double s{4.0};
  double s1{1.0};
  std::uint64_t seed{0};
  std::uint64_t index{0};
};

struct RunResult {
  RunSpec spec;
  double dt{0.0};
  double drift{0.0};
  double torus_distance{0.0};
  bool escaped{false};
  double escape_time{0.0};  // horizon when not escaped
  double max_norm{0.0};     // sup ||psi(t)||_s over the run
  double initial_norm{0.0};
  double energy_drift{0.0};  // relative
  std::size_t steps{0};
};

RunResult run_experiment(const PotentialSpec& pot, const NonlinearitySpec& nl, std::size_t J,
                         const RunSpec& spec, const IntegratorConfig& integrator);

// Independent runs in parallel; results in input order.
std::vector<RunResult> run_batch(const PotentialSpec& pot, const NonlinearitySpec& nl,
                                 std::size_t J, const std::vector<RunSpec>& specs,
                                 const IntegratorConfig& integrator);

// min(cap, R^{-(r+1/2)})
double theorem_horizon(double R, unsigned r, double cap);

struct CorollaryRow {
  double c{1.0};
  double radius{0.0};  // K / c^alpha
  double horizon{0.0};
  double max_norm{0.0};
  double bound{0.0};  // 2 K / c^alpha
  bool passed{false};
  double violation_time{-1.0};
  double energy_drift{0.0};
  double dt{0.0};
};

struct CorollaryConfig {
  double alpha{1.0};
  std::vector<double> c_list;
  double K{0.1};
  unsigned r{1};
  double horizon_cap{1e4};
  double s{4.0};
  std::uint64_t seed{0};
};

std::vector<CorollaryRow> corollary_experiment(const CorollaryConfig& cfg, const PotentialSpec& pot,
                                               const NonlinearitySpec& nl, std::size_t J,
                                               const IntegratorConfig& integrator);

}  // namespace nlkg
