// Dirichlet sine-basis representation of the Klein-Gordon field with a
// convolution potential.
//
// Mode j (1-based) corresponds to e_j(x) = sqrt(2/pi) sin(jx) on [0, pi] and is
// stored at index j-1 of every per-mode vector in this library.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace nlkg {

using cplx = std::complex<double>;

// Random convolution potential V = sum_j v_j cos(jx) with v_j = M j^{-s} v'_j.
struct PotentialSpec {
  double s{1.0};
  double M{0.5};
  std::vector<double> vprime;

  // Validating constructor: s > 0, 0 < M < 1, J >= 1, every v'_j in [-1/2, 1/2].
  static PotentialSpec make(double s, double M, std::vector<double> vprime);
  // v' = 0 for all J modes.
  static PotentialSpec zero(std::size_t J, double s = 2.0, double M = 0.5);

  std::size_t size() const noexcept { return vprime.size(); }
  // v_j for the 1-based mode j.
  double coefficient(std::size_t mode) const;
  void validate() const;
};

// omega_j = c sqrt(c^2 + lambda_j), stored split as c^2 + offset_j.
struct FrequencySet {
  double c{1.0};
  std::vector<double> lambda;
  std::vector<double> offset;  // omega_j - c^2
  std::vector<double> omega;

  std::size_t size() const noexcept { return omega.size(); }
  double c2() const noexcept { return c * c; }
};

struct ModeState {
  std::vector<cplx> psi;

  ModeState() = default;
  explicit ModeState(std::size_t J) : psi(J, cplx{0.0, 0.0}) {}
  explicit ModeState(std::vector<cplx> values) : psi(std::move(values)) {}

  std::size_t size() const noexcept { return psi.size(); }
  cplx& operator[](std::size_t i) { return psi[i]; }
  const cplx& operator[](std::size_t i) const { return psi[i]; }
};

// Sine coefficients of u and of its time derivative u_t.
struct RealState {
  std::vector<double> u;
  std::vector<double> ut;

  std::size_t size() const noexcept { return u.size(); }
  void validate() const;
};

// lambda_j = j^2 + M j^{-s} v'_j.
std::vector<double> eigenvalues(const PotentialSpec& pot);

// Frequencies via omega - c^2 = lambda/(1 + sqrt(1 + lambda/c^2)); throws for c < 1.
FrequencySet frequencies(std::span<const double> lambda, double c);
FrequencySet frequencies(const PotentialSpec& pot, double c);

// Multiplier ((c^2 + lambda_j)/c^2)^power. power = -1/4 is the smoothing
// operator (c/(c^2 - Delta + V)^{1/2})^{1/2}. Supported powers:
// -1/2, -1/4, 1/4, 1/2, 1.
double linear_multiplier(double lambda, double c, double power);
ModeState apply_linear_op(const ModeState& state, const PotentialSpec& pot, double c,
                          double power);

ModeState to_psi(const RealState& rs, const PotentialSpec& pot, double c);
RealState from_psi(const ModeState& state, const PotentialSpec& pot, double c);

// (sum_j j^{2s} |psi_j|^2)^{1/2}
double sobolev_norm(const ModeState& state, double s);
double sobolev_norm(std::span<const cplx> psi, double s);

// H_0 = sum_j omega_j |psi_j|^2
double quadratic_energy(const ModeState& state, const FrequencySet& freqs);

}  // namespace nlkg
