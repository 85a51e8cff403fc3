// Polynomial nonlinearity F(u) = sum_p a_p u^p and its Hamiltonian
// N = int_0^pi F(u) dx with u = Lambda (psi + psibar)/sqrt(2) in the sine basis,
// Lambda the smoothing multiplier (c/sqrt(c^2 + lambda_j))^{1/2}.

#pragma once

#include <map>
#include <vector>

#include "nlkg/poly.hpp"

namespace nlkg {

struct NonlinearitySpec {
  std::map<unsigned, double> coefficients;  // p -> a_p

  static NonlinearitySpec make(std::map<unsigned, double> coefficients);
  static NonlinearitySpec quartic(double a4) { return make({{4u, a4}}); }
  static NonlinearitySpec none() { return {}; }

  void validate() const;
  bool is_zero() const noexcept;
  unsigned max_power() const noexcept;
  double potential(double u) const noexcept;  // F(u)
  double force(double u) const noexcept;      // F'(u)
};

struct TaylorSplit {
  PolyHamiltonian n1;                // degrees <= degree_cap
  std::vector<unsigned> tail_powers;  // powers p > degree_cap left in the tail
};

// Exact coefficients from the closed-form integral of e^{imx} over [0, pi].
TaylorSplit taylor_nonlinearity(const NonlinearitySpec& nl, const PotentialSpec& pot, double c,
                                std::size_t J, unsigned degree_cap);

// int_0^pi prod_i e_{modes[i]}(x) dx
double sine_product_integral(std::span<const unsigned> modes);

// Exact evaluation of int F(u) and int F'(u) e_j for a sine polynomial u of
// degree J: samples on a uniform periodic grid fine enough that the discrete
// Fourier coefficients of F(u) are exact.
class SpectralNonlinearity {
 public:
  SpectralNonlinearity(const NonlinearitySpec& nl, const PotentialSpec& pot, double c,
                       std::size_t J);

  std::size_t size() const noexcept { return J_; }
  std::size_t grid_size() const noexcept { return M_; }
  bool is_zero() const noexcept { return nl_.is_zero(); }

  // u_j = Lambda_j sqrt(2) Re psi_j
  std::vector<double> field_coefficients(const ModeState& state) const;
  // int_0^pi F(u) dx
  double energy(const ModeState& state) const;
  // psi_j += i h Lambda_j / sqrt(2) int F'(u) e_j dx; leaves u unchanged.
  void kick(ModeState& state, double h) const;
  // int_0^pi F'(u) e_j dx for the given sine coefficients
  std::vector<double> force_projection(std::span<const double> u) const;

 private:
  void sample_field(std::span<const double> u, std::vector<double>& values) const;

  NonlinearitySpec nl_;
  std::size_t J_;
  std::size_t M_;
  std::vector<double> lambda_mult_;  // Lambda_j
  std::vector<double> basis_;        // e_j(x_k), row k
  std::vector<double> force_w_;      // row j: weights for int g e_j
  std::vector<double> energy_w_;     // weights for int g
};

}  // namespace nlkg
