#include "nlkg/tame.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <stdexcept>

#include "nlkg/parallel.hpp"
#include "nlkg/rng.hpp"

namespace nlkg {

namespace {

constexpr cplx kI{0.0, 1.0};

cplx slot_value(const ModeState& phi, VarIndex v) {
  const cplx z = phi[var_mode(v) - 1];
  return var_is_conjugate(v) ? std::conj(z) : z;
}

void require_homogeneous(const PolyHamiltonian& f, const char* who) {
  if (!f.empty() && !f.is_homogeneous()) {
    throw std::invalid_argument(std::string(who) + ": polynomial must be homogeneous");
  }
}

}  // namespace

void MultiVector::validate() const {
  if (parts.empty()) throw std::invalid_argument("multivector: at least one entry required");
  for (const auto& p : parts) {
    if (p.size() != parts.front().size()) {
      throw std::invalid_argument("multivector: entries have different lengths");
    }
  }
}

double pair_norm(const FieldPair& field, double s) {
  const double a = sobolev_norm(field.psi, s);
  const double b = sobolev_norm(field.psibar, s);
  return std::hypot(a, b);
}

double pair_norm(const ModeState& phi, double s) { return std::sqrt(2.0) * sobolev_norm(phi, s); }

double s1_norm(const MultiVector& phi, double s) {
  phi.validate();
  const std::size_t r = phi.size();
  std::vector<double> ns(r), n1(r);
  for (std::size_t i = 0; i < r; ++i) {
    ns[i] = pair_norm(phi.parts[i], s);
    n1[i] = pair_norm(phi.parts[i], 1.0);
  }
  double acc = 0.0;
  for (std::size_t l = 0; l < r; ++l) {
    double term = ns[l];
    for (std::size_t i = 0; i < r; ++i) {
      if (i != l) term *= n1[i];
    }
    acc += term;
  }
  return acc / static_cast<double>(r);
}

FieldPair multilinear_field(const PolyHamiltonian& f, const MultiVector& phi) {
  require_homogeneous(f, "multilinear_field");
  phi.validate();
  const std::size_t J = phi.parts.front().size();
  if (f.mode_cutoff() > J) throw std::invalid_argument("multilinear_field: multivector too short");
  FieldPair out{ModeState(J), ModeState(J)};
  if (f.empty()) return out;
  const std::size_t r = phi.size();
  if (f.min_degree() != r + 1) {
    throw std::invalid_argument("multilinear_field: multivector length must be degree - 1");
  }

  std::vector<std::size_t> perm(r);
  for (const auto& [m, c] : f.terms()) {
    const auto vars = m.vars();
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (i > 0 && vars[i - 1] == vars[i]) continue;
      const VarIndex v = vars[i];
      const Monomial reduced = m.without(v);
      const auto rv = reduced.vars();
      // permanent of A[slot][position] = phi_slot evaluated at variable rv[position]
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      cplx perm_sum{};
      std::size_t count = 0;
      do {
        cplx prod{1.0, 0.0};
        for (std::size_t p = 0; p < r; ++p) prod *= slot_value(phi.parts[perm[p]], rv[p]);
        perm_sum += prod;
        ++count;
      } while (std::next_permutation(perm.begin(), perm.end()));
      const cplx deriv = c * static_cast<double>(m.exponent(v)) * perm_sum /
                         static_cast<double>(count);
      const std::size_t k = var_mode(v) - 1;
      if (var_is_conjugate(v)) {
        out.psi[k] += kI * deriv;
      } else {
        out.psibar[k] -= kI * deriv;
      }
    }
  }
  return out;
}

double tame_norm_upper(const PolyHamiltonian& f, double s) {
  require_homogeneous(f, "tame_norm_upper");
  if (f.empty()) return 0.0;
  if (f.min_degree() < 2) throw std::invalid_argument("tame_norm_upper: degree must be >= 2");
  const std::size_t nvars = 2 * f.mode_cutoff();
  std::vector<double> row(nvars, 0.0), col(nvars, 0.0);
  for (const auto& [m, c] : f.terms()) {
    const double a = std::abs(c);
    const auto vars = m.vars();
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (i > 0 && vars[i - 1] == vars[i]) continue;
      const VarIndex v = vars[i];
      const VarIndex out = var_partner(v);
      const Monomial reduced = m.without(v);
      const auto rv = reduced.vars();
      // Sorted order puts the highest mode last; it carries the H^s weight.
      const VarIndex u = rv.back();
      double w = a * static_cast<double>(m.exponent(v)) *
                 std::pow(static_cast<double>(var_mode(out)) / var_mode(u), s);
      for (std::size_t q = 0; q + 1 < rv.size(); ++q) w /= var_mode(rv[q]);
      row[out] += w;
      col[u] += w;
    }
  }
  const double rmax = *std::max_element(row.begin(), row.end());
  const double cmax = *std::max_element(col.begin(), col.end());
  return std::sqrt(rmax * cmax);
}

double tame_norm_lower(const PolyHamiltonian& f, double s, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("tame_norm_lower: samples must be >= 1");
  require_homogeneous(f, "tame_norm_lower");
  if (f.empty()) return 0.0;
  const PolyHamiltonian mod = modulus(f);
  const std::size_t J = f.mode_cutoff();
  const std::size_t r = f.min_degree() - 1;
  const RandomStream base = seeded_rng(seed, "tame_norm_lower");

  std::vector<double> ratios(static_cast<std::size_t>(samples), 0.0);
  parallel_for(ratios.size(), [&](std::size_t i) {
    RandomStream rng = base.substream(i);
    MultiVector phi;
    for (std::size_t slot = 0; slot < r; ++slot) {
      ModeState x(J);
      if (rng.uniform() < 0.5) {
        const std::size_t k = std::min(J - 1, static_cast<std::size_t>(rng.uniform() * J));
        x[k] = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
      } else {
        for (std::size_t k = 0; k < J; ++k) {
          x[k] = rng.complex_normal() * std::pow(static_cast<double>(k + 1), -rng.uniform(0.0, s));
        }
      }
      phi.parts.push_back(std::move(x));
    }
    const double denom = s1_norm(phi, s);
    if (denom > 0.0) ratios[i] = pair_norm(multilinear_field(mod, phi), s) / denom;
  });
  return *std::max_element(ratios.begin(), ratios.end());
}

double weighted_norm(const PolyHamiltonian& f, double s, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("weighted_norm: R must be positive");
  double acc = 0.0;
  for (unsigned d : f.degrees()) {
    acc += tame_norm_upper(f.homogeneous_part(d), s) * std::pow(R, static_cast<double>(d) - 1.0);
  }
  return acc;
}

}  // namespace nlkg
