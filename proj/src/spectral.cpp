#include "nlkg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nlkg {

PotentialSpec PotentialSpec::make(double s, double M, std::vector<double> vprime) {
  PotentialSpec pot{s, M, std::move(vprime)};
  pot.validate();
  return pot;
}

PotentialSpec PotentialSpec::zero(std::size_t J, double s, double M) {
  return make(s, M, std::vector<double>(J, 0.0));
}

void PotentialSpec::validate() const {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw std::invalid_argument("potential: s must be a positive finite number");
  }
  // M < 1 keeps lambda_j = j^2 + v_j positive because |v_j| <= M/2.
  if (!(M > 0.0) || !(M < 1.0)) {
    throw std::invalid_argument("potential: M must lie in (0, 1)");
  }
  if (vprime.empty()) {
    throw std::invalid_argument("potential: at least one mode is required");
  }
  for (std::size_t i = 0; i < vprime.size(); ++i) {
    const double v = vprime[i];
    if (!std::isfinite(v) || v < -0.5 || v > 0.5) {
      throw std::invalid_argument("potential: vprime[" + std::to_string(i) +
                                  "] outside [-1/2, 1/2]");
    }
  }
}

double PotentialSpec::coefficient(std::size_t mode) const {
  if (mode < 1 || mode > vprime.size()) {
    throw std::out_of_range("potential: mode index out of range");
  }
  return M * std::pow(static_cast<double>(mode), -s) * vprime[mode - 1];
}

void RealState::validate() const {
  if (u.size() != ut.size()) {
    throw std::invalid_argument("real state: u and u_t must have the same length");
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!std::isfinite(u[i]) || !std::isfinite(ut[i])) {
      throw std::invalid_argument("real state: non-finite entry");
    }
  }
}

std::vector<double> eigenvalues(const PotentialSpec& pot) {
  pot.validate();
  std::vector<double> lambda(pot.size());
  for (std::size_t j = 1; j <= pot.size(); ++j) {
    lambda[j - 1] = static_cast<double>(j * j) + pot.coefficient(j);
  }
  return lambda;
}

FrequencySet frequencies(std::span<const double> lambda, double c) {
  if (!(c >= 1.0) || !std::isfinite(c)) {
    throw std::invalid_argument("frequencies: c must be >= 1");
  }
  FrequencySet fs;
  fs.c = c;
  fs.lambda.assign(lambda.begin(), lambda.end());
  fs.offset.resize(lambda.size());
  fs.omega.resize(lambda.size());
  const double c2 = c * c;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const double lam = lambda[i];
    if (!(lam >= 0.0) || !std::isfinite(lam)) {
      throw std::invalid_argument("frequencies: eigenvalues must be nonnegative");
    }
    double off = lam / (1.0 + std::sqrt(1.0 + lam / c2));
    // The exact offset lies in [lam/2 - lam^2/(8c^2), lam/2]; clamping only
    // removes round-off.
    const double upper = lam / 2;
    const double lower = lam / 2 - lam * lam / (8 * c * c);
    off = std::min(std::max(off, lower), upper);
    fs.offset[i] = off;
    fs.omega[i] = c * c + off;
  }
  for (std::size_t i = 1; i < fs.omega.size(); ++i) {
    if (!(fs.omega[i] > fs.omega[i - 1])) {
      throw std::invalid_argument("frequencies: eigenvalues must be strictly increasing");
    }
  }
  return fs;
}

FrequencySet frequencies(const PotentialSpec& pot, double c) {
  const auto lambda = eigenvalues(pot);
  return frequencies(lambda, c);
}

double linear_multiplier(double lambda, double c, double power) {
  const double ratio = 1.0 + lambda / (c * c);  // (c^2 + lambda)/c^2
  if (power == 1.0) return ratio;
  if (power == 0.5) return std::sqrt(ratio);
  if (power == -0.5) return 1.0 / std::sqrt(ratio);
  if (power == 0.25) return std::sqrt(std::sqrt(ratio));
  if (power == -0.25) return 1.0 / std::sqrt(std::sqrt(ratio));
  throw std::invalid_argument("apply_linear_op: unsupported power " + std::to_string(power));
}

ModeState apply_linear_op(const ModeState& state, const PotentialSpec& pot, double c,
                          double power) {
  if (!(c >= 1.0)) throw std::invalid_argument("apply_linear_op: c must be >= 1");
  const auto lambda = eigenvalues(pot);
  if (lambda.size() != state.size()) {
    throw std::invalid_argument("apply_linear_op: state and potential sizes differ");
  }
  ModeState out(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    out[i] = state[i] * linear_multiplier(lambda[i], c, power);
  }
  return out;
}

// psi = (a u - i b p)/sqrt(2), a = ((c^2+lambda)^{1/2}/c)^{1/2}, b = 1/a, p = u_t/c^2.
ModeState to_psi(const RealState& rs, const PotentialSpec& pot, double c) {
  rs.validate();
  if (!(c >= 1.0)) throw std::invalid_argument("to_psi: c must be >= 1");
  const auto lambda = eigenvalues(pot);
  if (lambda.size() != rs.size()) {
    throw std::invalid_argument("to_psi: state and potential sizes differ");
  }
  const double c2 = c * c;
  ModeState out(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const double a = linear_multiplier(lambda[i], c, 0.25);
    const double b = linear_multiplier(lambda[i], c, -0.25);
    out[i] = cplx{a * rs.u[i], -b * rs.ut[i] / c2} * M_SQRT1_2;
  }
  return out;
}

RealState from_psi(const ModeState& state, const PotentialSpec& pot, double c) {
  if (!(c >= 1.0)) throw std::invalid_argument("from_psi: c must be >= 1");
  const auto lambda = eigenvalues(pot);
  if (lambda.size() != state.size()) {
    throw std::invalid_argument("from_psi: state and potential sizes differ");
  }
  const double c2 = c * c;
  RealState rs;
  rs.u.resize(state.size());
  rs.ut.resize(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double a = linear_multiplier(lambda[i], c, 0.25);
    const double b = linear_multiplier(lambda[i], c, -0.25);
    rs.u[i] = M_SQRT2 * state[i].real() / a;
    rs.ut[i] = -M_SQRT2 * state[i].imag() / b * c2;
  }
  return rs;
}

double sobolev_norm(std::span<const cplx> psi, double s) {
  if (s < 0.0) throw std::invalid_argument("sobolev_norm: s must be >= 0");
  double acc = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double w = std::pow(static_cast<double>(i + 1), s);
    acc += w * w * std::norm(psi[i]);
  }
  return std::sqrt(acc);
}

double sobolev_norm(const ModeState& state, double s) { return sobolev_norm(state.psi, s); }

double quadratic_energy(const ModeState& state, const FrequencySet& freqs) {
  if (state.size() > freqs.size()) {
    throw std::invalid_argument("quadratic_energy: state longer than frequency set");
  }
  double h = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) h += freqs.omega[i] * std::norm(state[i]);
  return h;
}

}  // namespace nlkg
