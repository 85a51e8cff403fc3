#include "nlkg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nlkg/parallel.hpp"
#include "nlkg/rng.hpp"

namespace nlkg {

double IntegratorConfig::dt_for(double c) const {
  if (!(dt > 0.0)) throw std::invalid_argument("integrator: dt must be positive");
  if (dt_scaling <= 0.0) return dt;
  return std::min(dt, dt_scaling * std::pow(c, -1.5));
}

ModeState make_initial_state(std::size_t J, double s, double norm, std::uint64_t seed,
                             std::uint64_t index) {
  if (J < 1) throw std::invalid_argument("initial state: J must be >= 1");
  if (!(norm >= 0.0)) throw std::invalid_argument("initial state: norm must be >= 0");
  RandomStream rng = seeded_rng(seed, "initial_state").substream(index);
  ModeState x(J);
  for (std::size_t j = 0; j < J; ++j) {
    const double phase = 2.0 * std::numbers::pi * rng.uniform();
    x[j] = std::polar(std::pow(static_cast<double>(j + 1), -(s + 1.0)), phase);
  }
  const double n = sobolev_norm(x, s);
  for (auto& v : x.psi) v *= norm / n;
  return x;
}

double theorem_horizon(double R, unsigned r, double cap) {
  return std::min(cap, std::pow(R, -(static_cast<double>(r) + 0.5)));
}

RunResult run_experiment(const PotentialSpec& pot, const NonlinearitySpec& nl, std::size_t J,
                         const RunSpec& spec, const IntegratorConfig& integrator) {
  if (!(spec.R > 0.0)) throw std::invalid_argument("experiment: R must be positive");
  if (!(spec.K > 0.0)) throw std::invalid_argument("experiment: K must be positive");
  if (!(spec.escape_horizon >= spec.drift_horizon)) {
    throw std::invalid_argument("experiment: escape horizon shorter than drift horizon");
  }
  RunResult out;
  out.spec = spec;
  out.dt = integrator.dt_for(spec.c);
  const ModeState psi0 = make_initial_state(J, spec.s, spec.K * spec.R, spec.seed, spec.index);
  out.initial_norm = sobolev_norm(psi0, spec.s);
  const double radius = 2.0 * spec.K * spec.R;
  const auto I0 = actions(psi0);
  DriftTracker drift(psi0, spec.s);
  out.escape_time = spec.escape_horizon;

  NlkgOptions opt{out.dt, spec.escape_horizon, integrator.scheme, integrator.record_every};
  const NlkgSummary summary = run_nlkg(psi0, pot, spec.c, nl, J, opt,
                                       [&](double t, const ModeState& st, double) {
    const double norm = sobolev_norm(st, spec.s);
    out.max_norm = std::max(out.max_norm, norm);
    if (t <= spec.drift_horizon) {
      drift.update(st);
      out.torus_distance = std::max(out.torus_distance, torus_distance(st, I0, spec.s1));
    }
    if (!out.escaped && norm > radius) {
      out.escaped = true;
      out.escape_time = t;
    }
    return !(out.escaped && t >= spec.drift_horizon);
  });
  out.drift = drift.value();
  out.energy_drift = summary.max_relative_energy_drift;
  out.steps = summary.steps;
  return out;
}

std::vector<RunResult> run_batch(const PotentialSpec& pot, const NonlinearitySpec& nl,
                                 std::size_t J, const std::vector<RunSpec>& specs,
                                 const IntegratorConfig& integrator) {
  std::vector<RunResult> out(specs.size());
  parallel_for(specs.size(),
               [&](std::size_t i) { out[i] = run_experiment(pot, nl, J, specs[i], integrator); });
  return out;
}

std::vector<CorollaryRow> corollary_experiment(const CorollaryConfig& cfg, const PotentialSpec& pot,
                                               const NonlinearitySpec& nl, std::size_t J,
                                               const IntegratorConfig& integrator) {
  if (!(cfg.alpha > 0.0)) throw std::invalid_argument("corollary: alpha must be positive");
  if (!(cfg.K > 0.0)) throw std::invalid_argument("corollary: K must be positive");
  if (cfg.c_list.empty()) throw std::invalid_argument("corollary: empty c list");
  for (double c : cfg.c_list) {
    if (!(c >= 1.0)) throw std::invalid_argument("corollary: every c must be >= 1");
  }
  std::vector<CorollaryRow> rows(cfg.c_list.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    CorollaryRow& row = rows[i];
    row.c = cfg.c_list[i];
    row.radius = cfg.K * std::pow(row.c, -cfg.alpha);
    row.bound = 2.0 * row.radius;
    row.horizon =
        std::min(cfg.horizon_cap, std::pow(row.c, cfg.alpha * (static_cast<double>(cfg.r) + 0.5)));
    row.dt = integrator.dt_for(row.c);
    const ModeState psi0 = make_initial_state(J, cfg.s, row.radius, cfg.seed, i);
    NlkgOptions opt{row.dt, row.horizon, integrator.scheme, integrator.record_every};
    const NlkgSummary summary =
        run_nlkg(psi0, pot, row.c, nl, J, opt, [&](double t, const ModeState& st, double) {
          const double norm = sobolev_norm(st, cfg.s);
          row.max_norm = std::max(row.max_norm, norm);
          if (norm > row.bound) {
            row.violation_time = t;
            return false;
          }
          return true;
        });
    row.energy_drift = summary.max_relative_energy_drift;
    row.passed = row.violation_time < 0.0;
  });
  return rows;
}

}  // namespace nlkg
