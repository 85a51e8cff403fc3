#include "nlkg/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nlkg/errors.hpp"
#include "nlkg/integrators.hpp"
#include "nlkg/parallel.hpp"
#include "nlkg/rng.hpp"
#include "nlkg/tame.hpp"

namespace nlkg {

namespace {

const cplx kI{0.0, 1.0};

// omega.(j - l) from the split omega = c^2 + offset, so the c^2 parts cancel exactly.
double monomial_divisor(const FrequencySet& freqs, const Monomial& m) {
  long alpha = 0;
  long double acc = 0.0L;
  for (const auto& [mode, d] : m.exponent_difference()) {
    alpha += d;
    acc += static_cast<long double>(d) * freqs.offset[mode - 1];
  }
  acc += static_cast<long double>(alpha) * freqs.c * freqs.c;
  return static_cast<double>(acc);
}

double max_coefficient_gap(const PolyHamiltonian& a, const PolyHamiltonian& b) {
  double worst = 0.0;
  for (const auto& [m, c] : a.terms()) worst = std::max(worst, std::abs(c - b.coefficient(m)));
  for (const auto& [m, c] : b.terms()) {
    if (a.coefficient(m) == cplx{}) worst = std::max(worst, std::abs(c));
  }
  return worst;
}

// sum_{k >= 0} ad_chi^k W / (k+1)!, the contribution of H_0 o Phi - H_0 once
// {chi, H_0} = W is known.
CappedPoly h0_series(const PolyHamiltonian& W, const PolyHamiltonian& chi, unsigned cap) {
  CappedPoly out{W.with_degree_cap(cap), 0.0};
  PolyHamiltonian term = out.poly;
  for (unsigned k = 1; !term.empty(); ++k) {
    CappedPoly next = poisson_bracket(chi, term, cap);
    next.poly *= 1.0 / static_cast<double>(k + 1);
    out.spill += next.spill / static_cast<double>(k + 1);
    out.poly += next.poly;
    term = std::move(next.poly);
  }
  return out;
}

}  // namespace

double NormalFormParams::threshold() const {
  return gamma / std::pow(static_cast<double>(N), tau);
}

HomologicalResult solve_homological(const FrequencySet& freqs, const PolyHamiltonian& f,
                                    double gamma, double tau, unsigned N) {
  if (N < 1) throw std::invalid_argument("solve_homological: N must be >= 1");
  if (f.mode_cutoff() > freqs.size()) {
    throw std::invalid_argument("solve_homological: polynomial has more modes than frequencies");
  }
  const double threshold = gamma / std::pow(static_cast<double>(N), tau);
  HomologicalResult out{f.empty_like(), f.empty_like(), f.empty_like(),
                        std::numeric_limits<double>::infinity()};
  for (const auto& [m, c] : f.terms()) {
    if (m.high_degree(N) > 2) {
      throw std::invalid_argument("solve_homological: monomial with more than two modes above N");
    }
    if (m.is_action()) {
      out.Z.add(m, c);
      continue;
    }
    const double d = monomial_divisor(freqs, m);
    if (std::abs(d) >= threshold && d != 0.0) {
      out.chi.add(m, c / (kI * d));
      out.min_divisor = std::min(out.min_divisor, std::abs(d));
    } else {
      out.quasi_resonant.add(m, c);
    }
  }
  return out;
}

double homological_residual(const FrequencySet& freqs, const PolyHamiltonian& f,
                            const HomologicalResult& h) {
  const unsigned cap = std::max(f.degree_cap(), h.chi.degree_cap());
  const PolyHamiltonian H0 = quadratic_hamiltonian(freqs, f.mode_cutoff(), cap);
  PolyHamiltonian lhs = poisson_bracket(H0, h.chi.with_degree_cap(cap), cap).poly;
  lhs += h.Z.with_degree_cap(cap);
  lhs += h.quasi_resonant.with_degree_cap(cap);
  return max_coefficient_gap(lhs, f.with_degree_cap(cap));
}

CappedPoly lie_transform(const PolyHamiltonian& H, const PolyHamiltonian& chi,
                         unsigned degree_cap) {
  if (!chi.empty() && chi.min_degree() < 3) {
    throw std::invalid_argument("lie_transform: generator must have degree >= 3");
  }
  CappedPoly out{H.with_degree_cap(degree_cap), 0.0};
  for (const auto& [m, c] : H.terms()) {
    if (m.degree() > degree_cap) out.spill += std::abs(c);
  }
  if (chi.empty()) return out;
  PolyHamiltonian g = out.poly;
  for (unsigned l = 1; !g.empty(); ++l) {
    CappedPoly next = poisson_bracket(chi, g, degree_cap);
    next.poly *= 1.0 / static_cast<double>(l);
    out.spill += next.spill / static_cast<double>(l);
    out.poly += next.poly;
    g = std::move(next.poly);
  }
  return out;
}

NormalFormResult normalize(const FrequencySet& freqs, const PolyHamiltonian& N1,
                           const NormalFormParams& params) {
  if (params.r < 1) throw std::invalid_argument("normalize: r must be >= 1");
  if (params.N < 1) throw std::invalid_argument("normalize: N must be >= 1");
  const std::size_t J = N1.mode_cutoff() ? N1.mode_cutoff() : freqs.size();
  const unsigned cap = params.degree_cap();
  const unsigned ext = params.extended_cap();
  if (ext > Monomial::kMaxDegree) throw std::invalid_argument("normalize: r too large");

  NormalFormResult res;
  res.freqs = freqs;
  res.params = params;
  res.Z = PolyHamiltonian(J, cap);
  res.quasi_resonant = PolyHamiltonian(J, cap);
  res.remainder_N = PolyHamiltonian(J, cap);

  // K is the transformed Hamiltonian minus H_0.
  PolyHamiltonian K(J, ext);
  for (const auto& [m, c] : N1.terms()) {
    if (m.degree() < 3) throw std::invalid_argument("normalize: perturbation must start at degree 3");
    res.spill += K.add_capped(m, c);
  }

  for (unsigned m = 1; m <= params.r; ++m) {
    const unsigned d = m + 3;
    StageLog log;
    log.m = m;
    log.degree = d;
    auto [kept, high] = high_degree_filter(K.homogeneous_part(d), params.N, 2);
    HomologicalResult h = solve_homological(freqs, kept, params.gamma, params.tau, params.N);
    log.homological_residual = homological_residual(freqs, kept, h);
    log.min_divisor = h.min_divisor;
    log.chi_terms = h.chi.size();
    log.z_terms = h.Z.size();
    log.quasi_terms = h.quasi_resonant.size();
    log.high_terms = high.size();

    // {chi, H_0} = Z + quasi - kept
    PolyHamiltonian W = h.Z + h.quasi_resonant;
    W -= kept;
    CappedPoly transformed = lie_transform(K, h.chi.with_degree_cap(ext), ext);
    CappedPoly from_h0 = h0_series(W.with_degree_cap(ext), h.chi.with_degree_cap(ext), ext);
    transformed.poly += from_h0.poly;
    res.spill += transformed.spill + from_h0.spill;

    // The degree-d part is known exactly; replace it to drop cancellation noise.
    PolyHamiltonian expected = h.Z + h.quasi_resonant;
    expected += high;
    log.stage_residual = max_coefficient_gap(transformed.poly.homogeneous_part(d),
                                             expected.with_degree_cap(ext));
    K = transformed.poly.degree_range(0, d - 1) + expected.with_degree_cap(ext);
    K += transformed.poly.degree_range(d + 1, ext);

    res.Z += h.Z.with_degree_cap(cap);
    res.quasi_resonant += h.quasi_resonant.with_degree_cap(cap);
    res.remainder_N += high.with_degree_cap(cap);
    res.chis.push_back(h.chi.with_degree_cap(cap));
    res.stages.push_back(log);
  }
  // Degrees below 4 never appear; degrees 4..cap are fully accounted for above.
  res.remainder_T = K.degree_range(cap + 1, ext);
  return res;
}

ParameterChoice select_parameters(double R, unsigned r, double tau, std::size_t J) {
  if (!(R > 0.0) || !(R < 1.0)) throw std::invalid_argument("select_parameters: need 0 < R < 1");
  if (r < 1) throw std::invalid_argument("select_parameters: r must be >= 1");
  if (!(tau > 0.0)) throw std::invalid_argument("select_parameters: tau must be positive");
  if (J < 1) throw std::invalid_argument("select_parameters: J must be >= 1");
  ParameterChoice out;
  out.a = 1.0 / (2.0 * tau * (r + 2.0));
  // the small slack keeps exact integers (R^-a = 2 up to round-off) from rounding up
  const double raw = std::ceil(std::pow(R, -out.a) - 1e-12);
  out.N = static_cast<unsigned>(std::clamp(raw, 1.0, static_cast<double>(J)));
  out.s_min = 2.0 * tau * r * (r + 2.0) + 1.0;
  return out;
}

ActionReport verify_action_dependence(const PolyHamiltonian& Z, unsigned N) {
  ActionReport report;
  for (const auto& [m, c] : Z.terms()) {
    if (!m.is_action_on_low_modes(N) || m.high_degree(N) > 2) report.violations.push_back(m);
  }
  return report;
}

RemainderReport remainder_report(const NormalFormResult& result, int samples,
                                 std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("remainder_report: samples must be >= 1");
  const auto& p = result.params;
  RemainderReport out;
  out.samples = samples;
  out.comparator_T = std::pow(p.R, p.r + 1.5);
  out.comparator_N = p.R * p.R / std::pow(static_cast<double>(p.N), p.s - 1.0);
  const std::size_t J = result.Z.mode_cutoff();
  const double rho = p.R / 3.0;

  // Dropped monomials have degree D > ext and |psi_j| <= rho; each derivative
  // is at most D rho^{D-1} and lands in a mode <= J.
  out.spill_bound = result.spill * Monomial::kMaxDegree *
                    std::pow(rho, static_cast<double>(p.extended_cap())) * std::sqrt(2.0) *
                    std::pow(static_cast<double>(J), p.s);

  PolyHamiltonian rn = result.remainder_N.with_degree_cap(p.extended_cap());
  rn += result.quasi_resonant.with_degree_cap(p.extended_cap());
  const bool t_zero = result.remainder_T.empty();
  const bool n_zero = rn.empty();
  if (t_zero && n_zero) {
    out.r_T = out.spill_bound;
    return out;
  }

  const RandomStream base = seeded_rng(seed, "remainder_report");
  std::vector<double> fT(static_cast<std::size_t>(samples), 0.0), fN(fT.size(), 0.0);
  parallel_for(fT.size(), [&](std::size_t i) {
    RandomStream rng = base.substream(i);
    ModeState x(J);
    for (std::size_t k = 0; k < J; ++k) {
      x[k] = rng.complex_normal() * std::pow(static_cast<double>(k + 1), -p.s);
    }
    const double norm = sobolev_norm(x, p.s);
    if (norm == 0.0) return;
    for (auto& v : x.psi) v *= rho / norm;
    if (!t_zero) fT[i] = pair_norm(vector_field_eval(result.remainder_T, x), p.s);
    if (!n_zero) fN[i] = pair_norm(vector_field_eval(rn, x), p.s);
  });
  out.r_T = *std::max_element(fT.begin(), fT.end()) + out.spill_bound;
  out.r_N = *std::max_element(fN.begin(), fN.end());
  return out;
}

ModeState apply_transform(const NormalFormResult& result, const ModeState& state, bool inverse,
                          double tolerance) {
  ModeState x = state;
  const std::size_t n = result.chis.size();
  for (std::size_t step = 0; step < n; ++step) {
    // forward: chi_r acts first; inverse: undo chi_1 first
    const PolyHamiltonian& chi = inverse ? result.chis[step] : result.chis[n - 1 - step];
    if (chi.empty()) continue;
    x = flow_poly(chi, x, inverse ? -1.0 : 1.0, tolerance);
  }
  return x;
}

}  // namespace nlkg
