// Time integration of the Galerkin-truncated NLKG and of polynomial
// Hamiltonians in the psi coordinates.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nlkg/nonlinearity.hpp"
#include "nlkg/poly.hpp"

namespace nlkg {

// Symmetric compositions of R(h/2) K(h) R(h/2), R the exact linear rotation
// and K the exact nonlinear kick.
enum class SplittingScheme { strang, yoshida4, yoshida6 };

SplittingScheme parse_scheme(const std::string& name);
const char* scheme_name(SplittingScheme scheme);
int scheme_order(SplittingScheme scheme);

struct TrajectoryMeta {
  double c{1.0};
  std::uint64_t pot_hash{0};
  std::string integrator;
  double dt{0.0};
  std::size_t J{0};
};

struct Trajectory {
  std::vector<double> times;
  std::vector<ModeState> states;
  std::vector<double> energy;  // H at each recorded time
  TrajectoryMeta meta;

  // max_t |H(t) - H(0)| / |H(0)|
  double max_relative_energy_drift() const;
};

struct NlkgOptions {
  double dt{0.01};
  double T{1.0};
  SplittingScheme scheme{SplittingScheme::strang};
  std::size_t record_every{10};  // steps between observer calls
};

struct NlkgSummary {
  std::size_t steps{0};
  double final_time{0.0};
  bool stopped{false};  // observer asked to stop
  double max_relative_energy_drift{0.0};
  ModeState final_state;
};

// Observer sees (t, state, H); returning false stops the run.
using NlkgObserver = std::function<bool(double, const ModeState&, double)>;

std::uint64_t potential_hash(const PotentialSpec& pot);

// Streaming integration; the observer is called at t = 0, every record_every
// steps and at the final time. Throws NumericalError on NaN or overflow.
NlkgSummary run_nlkg(const ModeState& state0, const PotentialSpec& pot, double c,
                     const NonlinearitySpec& nl, std::size_t J, const NlkgOptions& options,
                     const NlkgObserver& observer);

Trajectory integrate_nlkg(const ModeState& state0, const PotentialSpec& pot, double c,
                          const NonlinearitySpec& nl, double dt, double T, std::size_t J,
                          SplittingScheme scheme = SplittingScheme::strang,
                          std::size_t record_every = 10);

// H(psi) = H_0 + N evaluated exactly.
double nlkg_energy(const ModeState& state, const FrequencySet& freqs,
                   const SpectralNonlinearity& nonlinear);

// psidot = X_H(psi) with an embedded Runge-Kutta-Fehlberg 7(8) pair under
// step control; states recorded every dt up to T (T may be negative).
Trajectory integrate_poly(const PolyHamiltonian& H, const ModeState& state0, double dt, double T,
                          double tolerance = 1e-12);

// Endpoint of the flow of H at time t.
ModeState flow_poly(const PolyHamiltonian& H, const ModeState& state0, double t,
                    double tolerance = 1e-12);

}  // namespace nlkg
