// Tame norms of polynomial Hamiltonians.
//
// A multivector phi = (phi_1, ..., phi_r) is a list of ModeStates, each read as
// the pair (phi_i, conj(phi_i)). Pair norms count both components.

#pragma once

#include <cstdint>
#include <vector>

#include "nlkg/poly.hpp"

namespace nlkg {

struct MultiVector {
  std::vector<ModeState> parts;

  std::size_t size() const noexcept { return parts.size(); }
  void validate() const;
};

// Components of a vector field on H^s + H^s.
struct FieldPair {
  ModeState psi;
  ModeState psibar;
};

// (||a||_s^2 + ||b||_s^2)^{1/2}
double pair_norm(const FieldPair& field, double s);
// Pair norm of (phi, conj(phi)), i.e. sqrt(2) ||phi||_s.
double pair_norm(const ModeState& phi, double s);

// (1/r) sum_l ||phi_l||_s prod_{i != l} ||phi_i||_1, with pair norms.
double s1_norm(const MultiVector& phi, double s);

// Symmetric r-linear form of the Hamiltonian field of f (degree r+1) at phi.
// The psi component is i df/dpsibar, the psibar component -i df/dpsi.
FieldPair multilinear_field(const PolyHamiltonian& f, const MultiVector& phi);

// Certified upper bound on |f|_s for homogeneous f: Schur bound on the
// operator norm of the weighted coefficient matrix of the modulus field.
double tame_norm_upper(const PolyHamiltonian& f, double s);

// max over sampled multivectors of ||X~_{|f|}(phi)||_s / ||phi||_{s,1}.
double tame_norm_lower(const PolyHamiltonian& f, double s, int samples, std::uint64_t seed);

// sum_m tame_norm_upper(f_m, s) R^{m-1} over the homogeneous parts of f.
double weighted_norm(const PolyHamiltonian& f, double s, double R);

}  // namespace nlkg
