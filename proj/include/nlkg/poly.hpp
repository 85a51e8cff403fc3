// Sparse polynomials in the complex modes (psi, psibar).
//
// A monomial psi^j psibar^l is stored as the sorted multiset of its variables.
// Variable index: 2*(mode-1) for psi_mode, 2*(mode-1)+1 for psibar_mode.

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "nlkg/spectral.hpp"

namespace nlkg {

using VarIndex = std::uint8_t;

constexpr VarIndex psi_var(unsigned mode) { return static_cast<VarIndex>(2 * (mode - 1)); }
constexpr VarIndex psibar_var(unsigned mode) { return static_cast<VarIndex>(2 * (mode - 1) + 1); }
constexpr unsigned var_mode(VarIndex v) { return v / 2u + 1u; }
constexpr bool var_is_conjugate(VarIndex v) { return (v & 1u) != 0; }
constexpr VarIndex var_partner(VarIndex v) { return static_cast<VarIndex>(v ^ 1u); }

// (mode, exponent) pairs, modes strictly increasing.
using ExponentList = std::vector<std::pair<unsigned, unsigned>>;

class Monomial {
 public:
  static constexpr std::size_t kMaxDegree = 14;
  static constexpr unsigned kMaxMode = 127;

  Monomial() = default;
  explicit Monomial(std::span<const VarIndex> vars);
  static Monomial from_exponents(const ExponentList& psi_exps, const ExponentList& psibar_exps);

  unsigned degree() const noexcept { return degree_; }
  std::span<const VarIndex> vars() const noexcept { return {vars_.data(), degree_}; }
  unsigned exponent(VarIndex v) const noexcept;
  unsigned max_mode() const noexcept;

  // Removes one occurrence of v (which must be present).
  Monomial without(VarIndex v) const;
  Monomial operator*(const Monomial& other) const;
  // Swaps psi and psibar in every factor.
  Monomial conjugate() const;

  ExponentList psi_exponents() const;
  ExponentList psibar_exponents() const;
  // j - l as (mode, signed exponent) pairs with nonzero entries only.
  std::vector<std::pair<unsigned, int>> exponent_difference() const;

  bool is_action() const noexcept;  // j == l
  // Total exponent carried by modes > N.
  unsigned high_degree(unsigned N) const noexcept;
  // True if j == l restricted to modes <= N.
  bool is_action_on_low_modes(unsigned N) const noexcept;

  cplx evaluate(std::span<const cplx> psi) const;

  auto operator<=>(const Monomial&) const = default;
  bool operator==(const Monomial&) const = default;

 private:
  std::uint8_t degree_{0};
  std::array<VarIndex, kMaxDegree> vars_{};
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept;
};

class PolyHamiltonian {
 public:
  using TermMap = std::map<Monomial, cplx>;

  PolyHamiltonian() = default;
  PolyHamiltonian(std::size_t mode_cutoff, unsigned degree_cap);

  std::size_t mode_cutoff() const noexcept { return mode_cutoff_; }
  unsigned degree_cap() const noexcept { return degree_cap_; }
  PolyHamiltonian empty_like() const { return {mode_cutoff_, degree_cap_}; }
  PolyHamiltonian with_degree_cap(unsigned cap) const;

  // Accumulates coef into the monomial; throws above the cap or outside the
  // mode range. Entries that cancel to exactly zero are erased.
  void add(const Monomial& m, cplx coef);
  // Same, but terms above the cap are dropped and |coef| is returned as spill.
  double add_capped(const Monomial& m, cplx coef);

  cplx coefficient(const Monomial& m) const;
  const TermMap& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }

  unsigned min_degree() const noexcept;
  unsigned max_degree() const noexcept;
  bool is_homogeneous() const noexcept;
  std::vector<unsigned> degrees() const;
  PolyHamiltonian homogeneous_part(unsigned degree) const;
  // Terms with degree in [lo, hi].
  PolyHamiltonian degree_range(unsigned lo, unsigned hi) const;

  // max over terms of |c(j,l) - conj(c(l,j))|.
  double reality_defect() const;
  double coefficient_l1() const;
  double max_abs_coefficient() const;
  // Value at (psi, conj(psi)).
  cplx evaluate(std::span<const cplx> psi) const;
  cplx evaluate(const ModeState& state) const { return evaluate(state.psi); }

  PolyHamiltonian& operator+=(const PolyHamiltonian& other);
  PolyHamiltonian& operator-=(const PolyHamiltonian& other);
  PolyHamiltonian& operator*=(cplx scale);
  friend PolyHamiltonian operator+(PolyHamiltonian a, const PolyHamiltonian& b) { return a += b; }
  friend PolyHamiltonian operator-(PolyHamiltonian a, const PolyHamiltonian& b) { return a -= b; }
  friend PolyHamiltonian operator*(cplx s, PolyHamiltonian a) { return a *= s; }

 private:
  void check_compatible(const PolyHamiltonian& other) const;

  std::size_t mode_cutoff_{0};
  unsigned degree_cap_{0};
  TermMap terms_;
};

struct CappedPoly {
  PolyHamiltonian poly;
  double spill{0.0};  // sum of |coefficient| of the products dropped above the cap
};

// sum_k omega_k psi_k psibar_k
PolyHamiltonian quadratic_hamiltonian(const FrequencySet& freqs, std::size_t J,
                                      unsigned degree_cap);
// I_k = psi_k psibar_k
PolyHamiltonian action_monomial(unsigned mode, std::size_t J, unsigned degree_cap);

// {f, g} = i sum_k (df/dpsibar_k dg/dpsi_k - df/dpsi_k dg/dpsibar_k).
// With this sign the flow psidot = i grad_psibar chi satisfies
// d/dt g(Phi^t_chi) = {chi, g}, and {H0, psi^j psibar^l} = i omega.(j-l) psi^j psibar^l.
CappedPoly poisson_bracket(const PolyHamiltonian& f, const PolyHamiltonian& g, unsigned degree_cap);
CappedPoly poisson_bracket(const PolyHamiltonian& f, const PolyHamiltonian& g);

// Every coefficient replaced by its absolute value.
PolyHamiltonian modulus(const PolyHamiltonian& f);

// X_f(psi)_k = i df/dpsibar_k.
ModeState vector_field_eval(const PolyHamiltonian& f, const ModeState& state);
// (df/dpsi_k, df/dpsibar_k) at (psi, conj(psi)).
std::pair<std::vector<cplx>, std::vector<cplx>> gradient_eval(const PolyHamiltonian& f,
                                                              const ModeState& state);

// Fourier projection onto modes 1..N and its complement.
std::pair<ModeState, ModeState> project_split(const ModeState& state, std::size_t N);

// kept: terms whose exponent on modes > N totals at most max_high_degree.
std::pair<PolyHamiltonian, PolyHamiltonian> high_degree_filter(const PolyHamiltonian& f,
                                                               unsigned N,
                                                               unsigned max_high_degree);

}  // namespace nlkg
