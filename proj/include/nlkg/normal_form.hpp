// Iterative Birkhoff normalization of H_0 + N on the Galerkin truncation.
//
// Degree d = m + 3 is normalized at step m, so after r steps the normal form
// holds every degree 4..r+3 and the transformed Hamiltonian is
//   H o T = H_0 + Z + quasi_resonant + remainder_N + remainder_T.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlkg/poly.hpp"

namespace nlkg {

struct NormalFormParams {
  unsigned r{1};
  double gamma{0.0};
  double tau{6.0};
  unsigned N{1};
  double R{0.1};
  double s{4.0};

  unsigned degree_cap() const noexcept { return r + 3; }
  // Degrees up to extended_cap are kept explicitly in remainder_T.
  unsigned extended_cap() const noexcept { return r + 4; }
  double threshold() const;
};

struct HomologicalResult {
  PolyHamiltonian chi;
  PolyHamiltonian Z;               // action monomials of f
  PolyHamiltonian quasi_resonant;  // divisor below gamma / N^tau
  double min_divisor{0.0};         // smallest divisor that was inverted
};

// Solves {H_0, chi} + Z + quasi_resonant = f. Requires every monomial of f to
// carry at most two factors with mode > N.
HomologicalResult solve_homological(const FrequencySet& freqs, const PolyHamiltonian& f,
                                    double gamma, double tau, unsigned N);

// max coefficient of |{H_0, chi} + Z + quasi_resonant - f|
double homological_residual(const FrequencySet& freqs, const PolyHamiltonian& f,
                            const HomologicalResult& h);

// H o Phi^1_chi = sum_l g_l with g_0 = H, g_l = {chi, g_{l-1}} / l.
CappedPoly lie_transform(const PolyHamiltonian& H, const PolyHamiltonian& chi,
                         unsigned degree_cap);

struct StageLog {
  unsigned m{0};
  unsigned degree{0};
  std::size_t chi_terms{0};
  std::size_t z_terms{0};
  std::size_t quasi_terms{0};
  std::size_t high_terms{0};  // sent to remainder_N
  double min_divisor{0.0};
  double homological_residual{0.0};
  // |degree-d part of the transformed Hamiltonian - (Z_d + quasi_d + high_d)|
  double stage_residual{0.0};
};

struct NormalFormResult {
  FrequencySet freqs;
  NormalFormParams params;
  PolyHamiltonian Z;
  std::vector<PolyHamiltonian> chis;
  PolyHamiltonian quasi_resonant;
  PolyHamiltonian remainder_N;  // terms with more than two high modes
  PolyHamiltonian remainder_T;  // degrees above the cap, up to extended_cap
  double spill{0.0};
  std::vector<StageLog> stages;
};

NormalFormResult normalize(const FrequencySet& freqs, const PolyHamiltonian& N1,
                           const NormalFormParams& params);

struct ParameterChoice {
  unsigned N{1};
  double a{0.0};
  double s_min{0.0};
};

// a = 1/(2 tau (r+2)), N = ceil(R^-a) clamped to [1, J], s_min = 2 tau r (r+2) + 1.
ParameterChoice select_parameters(double R, unsigned r, double tau, std::size_t J);

struct ActionReport {
  std::vector<Monomial> violations;
  bool passed() const noexcept { return violations.empty(); }
};

ActionReport verify_action_dependence(const PolyHamiltonian& Z, unsigned N);

struct RemainderReport {
  double r_T{0.0};
  double r_N{0.0};
  double comparator_T{0.0};  // R^{r+3/2}
  double comparator_N{0.0};  // R^2 / N^{s-1}
  double spill_bound{0.0};
  int samples{0};
};

// Sampled sup over ||psi||_s = R/3 of the remainder vector fields.
RemainderReport remainder_report(const NormalFormResult& result, int samples = 256,
                                 std::uint64_t seed = 0);

// T(psi) = Phi_1 o ... o Phi_r (psi) with Phi_m the time-1 flow of chi_m,
// or its inverse.
ModeState apply_transform(const NormalFormResult& result, const ModeState& state,
                          bool inverse = false, double tolerance = 1e-12);

}  // namespace nlkg
