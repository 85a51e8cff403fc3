#include "nlkg/nonlinearity.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nlkg {

namespace {

constexpr double kPi = std::numbers::pi;

// int_0^pi e^{imx} dx
cplx exp_integral(long m) {
  if (m == 0) return {kPi, 0.0};
  if (m % 2 == 0) return {};
  return {0.0, 2.0 / static_cast<double>(m)};
}

double binomial(unsigned n, unsigned k) {
  double out = 1.0;
  for (unsigned i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

}  // namespace

NonlinearitySpec NonlinearitySpec::make(std::map<unsigned, double> coefficients) {
  NonlinearitySpec nl{std::move(coefficients)};
  nl.validate();
  return nl;
}

void NonlinearitySpec::validate() const {
  for (const auto& [p, a] : coefficients) {
    if (p < 4) {
      throw std::invalid_argument("nonlinearity: powers must be >= 4 (zero of order four)");
    }
    if (p > Monomial::kMaxDegree) {
      throw std::invalid_argument("nonlinearity: power " + std::to_string(p) + " too large");
    }
    if (!std::isfinite(a)) throw std::invalid_argument("nonlinearity: non-finite coefficient");
  }
}

bool NonlinearitySpec::is_zero() const noexcept {
  for (const auto& [p, a] : coefficients) {
    if (a != 0.0) return false;
  }
  return true;
}

unsigned NonlinearitySpec::max_power() const noexcept {
  unsigned out = 0;
  for (const auto& [p, a] : coefficients) {
    if (a != 0.0) out = std::max(out, p);
  }
  return out;
}

double NonlinearitySpec::potential(double u) const noexcept {
  double acc = 0.0;
  for (const auto& [p, a] : coefficients) acc += a * std::pow(u, static_cast<int>(p));
  return acc;
}

double NonlinearitySpec::force(double u) const noexcept {
  double acc = 0.0;
  for (const auto& [p, a] : coefficients) acc += a * p * std::pow(u, static_cast<int>(p) - 1);
  return acc;
}

double sine_product_integral(std::span<const unsigned> modes) {
  const std::size_t p = modes.size();
  if (p > 20) throw std::invalid_argument("sine_product_integral: too many factors");
  // prod sin(j x) = (2i)^{-p} sum_sigma (prod sigma) e^{i (sigma.j) x}
  cplx acc{};
  for (std::size_t mask = 0; mask < (std::size_t{1} << p); ++mask) {
    long freq = 0;
    int sign = 1;
    for (std::size_t i = 0; i < p; ++i) {
      if (mask & (std::size_t{1} << i)) {
        freq -= static_cast<long>(modes[i]);
        sign = -sign;
      } else {
        freq += static_cast<long>(modes[i]);
      }
    }
    acc += static_cast<double>(sign) * exp_integral(freq);
  }
  acc /= std::pow(cplx{0.0, 2.0}, static_cast<int>(p));
  return acc.real() * std::pow(2.0 / kPi, 0.5 * static_cast<double>(p));
}

TaylorSplit taylor_nonlinearity(const NonlinearitySpec& nl, const PotentialSpec& pot, double c,
                                std::size_t J, unsigned degree_cap) {
  if (nl.coefficients.empty()) {
    throw std::invalid_argument("taylor_nonlinearity: empty nonlinearity specification");
  }
  nl.validate();
  if (J < 1 || J > pot.size()) throw std::invalid_argument("taylor_nonlinearity: bad J");
  const auto lambda = eigenvalues(pot);
  std::vector<double> scale(J);
  for (std::size_t j = 0; j < J; ++j) {
    scale[j] = linear_multiplier(lambda[j], c, -0.25) / std::sqrt(2.0);
  }

  TaylorSplit out{PolyHamiltonian(J, degree_cap), {}};
  for (const auto& [p, a] : nl.coefficients) {
    if (a == 0.0) continue;
    if (p > degree_cap) {
      out.tail_powers.push_back(p);
      continue;
    }
    // nondecreasing mode tuples j_1 <= ... <= j_p
    std::vector<unsigned> tuple(p, 1);
    while (true) {
      const double integral = sine_product_integral(tuple);
      if (integral != 0.0) {
        // distinct modes with multiplicities
        std::vector<std::pair<unsigned, unsigned>> groups;
        for (unsigned j : tuple) {
          if (!groups.empty() && groups.back().first == j) {
            ++groups.back().second;
          } else {
            groups.emplace_back(j, 1u);
          }
        }
        double weight = a * integral;
        double multinomial = 1.0;
        unsigned used = 0;
        for (const auto& [j, mult] : groups) {
          multinomial *= binomial(used + mult, mult);
          used += mult;
          weight *= std::pow(scale[j - 1], static_cast<int>(mult));
        }
        weight *= multinomial;
        // each group contributes (psi_j + psibar_j)^mult
        std::vector<unsigned> q(groups.size(), 0);
        while (true) {
          ExponentList psi_exp, psibar_exp;
          double coef = weight;
          for (std::size_t g = 0; g < groups.size(); ++g) {
            const auto [j, mult] = groups[g];
            coef *= binomial(mult, q[g]);
            if (q[g] > 0) psi_exp.emplace_back(j, q[g]);
            if (mult - q[g] > 0) psibar_exp.emplace_back(j, mult - q[g]);
          }
          out.n1.add(Monomial::from_exponents(psi_exp, psibar_exp), coef);
          std::size_t g = 0;
          while (g < groups.size() && q[g] == groups[g].second) q[g++] = 0;
          if (g == groups.size()) break;
          ++q[g];
        }
      }
      // next nondecreasing tuple
      std::size_t i = p;
      while (i > 0 && tuple[i - 1] == J) --i;
      if (i == 0) break;
      const unsigned next = tuple[i - 1] + 1;
      for (std::size_t k = i - 1; k < p; ++k) tuple[k] = next;
    }
  }
  return out;
}

// ------------------------------------------------------------ spectral

SpectralNonlinearity::SpectralNonlinearity(const NonlinearitySpec& nl, const PotentialSpec& pot,
                                           double c, std::size_t J)
    : nl_(nl), J_(J) {
  nl_.validate();
  if (J < 1 || J > pot.size()) throw std::invalid_argument("spectral nonlinearity: bad J");
  const auto lambda = eigenvalues(pot);
  lambda_mult_.resize(J);
  for (std::size_t j = 0; j < J; ++j) lambda_mult_[j] = linear_multiplier(lambda[j], c, -0.25);

  const std::size_t P = std::max(1u, nl_.max_power());
  const std::size_t D = P * J;  // trigonometric degree of F(u)
  M_ = 2 * D + 1;
  const double norm = std::sqrt(2.0 / kPi);

  basis_.resize(M_ * J);
  for (std::size_t k = 0; k < M_; ++k) {
    const double x = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(M_);
    for (std::size_t j = 0; j < J; ++j) {
      basis_[k * J + j] = norm * std::sin(static_cast<double>(j + 1) * x);
    }
  }

  // g(x) = sum_{|m| <= D} g_m e^{imx}, g_m = (1/M) sum_k g(x_k) e^{-imx_k}; then
  // int_0^pi g w = sum_m g_m int_0^pi e^{imx} w(x) dx.
  const long Dg = static_cast<long>(P > 1 ? (P - 1) * J : J);
  force_w_.assign(J * M_, 0.0);
  energy_w_.assign(M_, 0.0);
  for (std::size_t k = 0; k < M_; ++k) {
    const double x = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(M_);
    double e_acc = 0.0;
    for (long m = -static_cast<long>(D); m <= static_cast<long>(D); ++m) {
      const cplx phase = std::polar(1.0, -static_cast<double>(m) * x);
      e_acc += (phase * exp_integral(m)).real();
    }
    energy_w_[k] = e_acc / static_cast<double>(M_);
    for (std::size_t j = 0; j < J; ++j) {
      const long jj = static_cast<long>(j + 1);
      double acc = 0.0;
      for (long m = -Dg; m <= Dg; ++m) {
        // int_0^pi e^{imx} sin(jx) dx
        const cplx kmj = (exp_integral(m + jj) - exp_integral(m - jj)) / cplx{0.0, 2.0};
        acc += (std::polar(1.0, -static_cast<double>(m) * x) * kmj).real();
      }
      force_w_[j * M_ + k] = norm * acc / static_cast<double>(M_);
    }
  }
}

std::vector<double> SpectralNonlinearity::field_coefficients(const ModeState& state) const {
  if (state.size() != J_) throw std::invalid_argument("spectral nonlinearity: state length");
  std::vector<double> u(J_);
  for (std::size_t j = 0; j < J_; ++j) u[j] = lambda_mult_[j] * std::sqrt(2.0) * state[j].real();
  return u;
}

void SpectralNonlinearity::sample_field(std::span<const double> u,
                                        std::vector<double>& values) const {
  values.assign(M_, 0.0);
  for (std::size_t k = 0; k < M_; ++k) {
    const double* row = &basis_[k * J_];
    double acc = 0.0;
    for (std::size_t j = 0; j < J_; ++j) acc += row[j] * u[j];
    values[k] = acc;
  }
}

double SpectralNonlinearity::energy(const ModeState& state) const {
  if (nl_.is_zero()) return 0.0;
  const auto u = field_coefficients(state);
  std::vector<double> values;
  sample_field(u, values);
  double acc = 0.0;
  for (std::size_t k = 0; k < M_; ++k) acc += energy_w_[k] * nl_.potential(values[k]);
  return acc;
}

std::vector<double> SpectralNonlinearity::force_projection(std::span<const double> u) const {
  if (u.size() != J_) throw std::invalid_argument("spectral nonlinearity: coefficient length");
  std::vector<double> values;
  sample_field(u, values);
  for (auto& v : values) v = nl_.force(v);
  std::vector<double> out(J_, 0.0);
  for (std::size_t j = 0; j < J_; ++j) {
    const double* w = &force_w_[j * M_];
    double acc = 0.0;
    for (std::size_t k = 0; k < M_; ++k) acc += w[k] * values[k];
    out[j] = acc;
  }
  return out;
}

void SpectralNonlinearity::kick(ModeState& state, double h) const {
  if (nl_.is_zero()) return;
  if (state.size() != J_) throw std::invalid_argument("spectral nonlinearity: state length");
  std::vector<double> values(M_);
  double* v = values.data();
  for (std::size_t k = 0; k < M_; ++k) {
    const double* row = &basis_[k * J_];
    double acc = 0.0;
    for (std::size_t j = 0; j < J_; ++j) {
      acc += row[j] * (lambda_mult_[j] * std::sqrt(2.0) * state[j].real());
    }
    v[k] = nl_.force(acc);
  }
  for (std::size_t j = 0; j < J_; ++j) {
    const double* w = &force_w_[j * M_];
    double acc = 0.0;
    for (std::size_t k = 0; k < M_; ++k) acc += w[k] * v[k];
    state[j] += cplx{0.0, h * lambda_mult_[j] / std::sqrt(2.0) * acc};
  }
}

}  // namespace nlkg
