#include "nlkg/poly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace nlkg {

namespace {
constexpr cplx kI{0.0, 1.0};
}

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(std::span<const VarIndex> vars) {
  if (vars.size() > kMaxDegree) {
    throw std::invalid_argument("monomial: degree exceeds " + std::to_string(kMaxDegree));
  }
  degree_ = static_cast<std::uint8_t>(vars.size());
  std::copy(vars.begin(), vars.end(), vars_.begin());
  std::sort(vars_.begin(), vars_.begin() + degree_);
}

Monomial Monomial::from_exponents(const ExponentList& psi_exps, const ExponentList& psibar_exps) {
  std::vector<VarIndex> vars;
  auto push = [&](const ExponentList& list, bool conj) {
    for (const auto& [mode, exp] : list) {
      if (mode < 1 || mode > kMaxMode) throw std::invalid_argument("monomial: bad mode index");
      for (unsigned e = 0; e < exp; ++e) vars.push_back(conj ? psibar_var(mode) : psi_var(mode));
    }
  };
  push(psi_exps, false);
  push(psibar_exps, true);
  return Monomial(vars);
}

unsigned Monomial::exponent(VarIndex v) const noexcept {
  const auto span = vars();
  return static_cast<unsigned>(std::count(span.begin(), span.end(), v));
}

unsigned Monomial::max_mode() const noexcept {
  return degree_ == 0 ? 0u : var_mode(vars_[degree_ - 1]);
}

Monomial Monomial::without(VarIndex v) const {
  Monomial out;
  bool removed = false;
  for (std::size_t i = 0; i < degree_; ++i) {
    if (!removed && vars_[i] == v) {
      removed = true;
      continue;
    }
    out.vars_[out.degree_++] = vars_[i];
  }
  if (!removed) throw std::logic_error("monomial: variable not present");
  return out;
}

Monomial Monomial::operator*(const Monomial& other) const {
  if (degree_ + other.degree_ > kMaxDegree) {
    throw std::invalid_argument("monomial: product degree exceeds limit");
  }
  Monomial out;
  std::merge(vars_.begin(), vars_.begin() + degree_, other.vars_.begin(),
             other.vars_.begin() + other.degree_, out.vars_.begin());
  out.degree_ = static_cast<std::uint8_t>(degree_ + other.degree_);
  return out;
}

Monomial Monomial::conjugate() const {
  Monomial out = *this;
  for (std::size_t i = 0; i < degree_; ++i) out.vars_[i] = var_partner(vars_[i]);
  std::sort(out.vars_.begin(), out.vars_.begin() + degree_);
  return out;
}

ExponentList Monomial::psi_exponents() const {
  ExponentList out;
  for (auto v : vars()) {
    if (var_is_conjugate(v)) continue;
    const unsigned mode = var_mode(v);
    if (!out.empty() && out.back().first == mode) {
      ++out.back().second;
    } else {
      out.emplace_back(mode, 1u);
    }
  }
  return out;
}

ExponentList Monomial::psibar_exponents() const {
  ExponentList out;
  for (auto v : vars()) {
    if (!var_is_conjugate(v)) continue;
    const unsigned mode = var_mode(v);
    if (!out.empty() && out.back().first == mode) {
      ++out.back().second;
    } else {
      out.emplace_back(mode, 1u);
    }
  }
  return out;
}

std::vector<std::pair<unsigned, int>> Monomial::exponent_difference() const {
  std::vector<std::pair<unsigned, int>> out;
  for (auto v : vars()) {
    const unsigned mode = var_mode(v);
    const int delta = var_is_conjugate(v) ? -1 : 1;
    if (!out.empty() && out.back().first == mode) {
      out.back().second += delta;
    } else {
      out.emplace_back(mode, delta);
    }
  }
  std::erase_if(out, [](const auto& p) { return p.second == 0; });
  return out;
}

bool Monomial::is_action() const noexcept {
  // Sorted order places psi_m directly before psibar_m, so equal exponents
  // mean the multiset pairs up.
  if (degree_ % 2 != 0) return false;
  int balance[kMaxMode + 1] = {};
  for (auto v : vars()) balance[var_mode(v)] += var_is_conjugate(v) ? -1 : 1;
  for (auto v : vars()) {
    if (balance[var_mode(v)] != 0) return false;
  }
  return true;
}

unsigned Monomial::high_degree(unsigned N) const noexcept {
  unsigned count = 0;
  for (auto v : vars()) count += var_mode(v) > N ? 1u : 0u;
  return count;
}

bool Monomial::is_action_on_low_modes(unsigned N) const noexcept {
  int balance[kMaxMode + 1] = {};
  for (auto v : vars()) {
    if (var_mode(v) <= N) balance[var_mode(v)] += var_is_conjugate(v) ? -1 : 1;
  }
  for (auto v : vars()) {
    if (var_mode(v) <= N && balance[var_mode(v)] != 0) return false;
  }
  return true;
}

cplx Monomial::evaluate(std::span<const cplx> psi) const {
  cplx acc{1.0, 0.0};
  for (auto v : vars()) {
    const std::size_t idx = var_mode(v) - 1;
    if (idx >= psi.size()) throw std::out_of_range("monomial: mode beyond state length");
    acc *= var_is_conjugate(v) ? std::conj(psi[idx]) : psi[idx];
  }
  return acc;
}

std::size_t MonomialHash::operator()(const Monomial& m) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ m.degree();
  for (auto v : m.vars()) {
    h ^= v;
    h *= 0x100000001b3ULL;
  }
  return static_cast<std::size_t>(h);
}

// ---------------------------------------------------------- PolyHamiltonian

PolyHamiltonian::PolyHamiltonian(std::size_t mode_cutoff, unsigned degree_cap)
    : mode_cutoff_(mode_cutoff), degree_cap_(degree_cap) {
  if (mode_cutoff == 0 || mode_cutoff > Monomial::kMaxMode) {
    throw std::invalid_argument("poly: mode cutoff must lie in [1, 127]");
  }
  if (degree_cap > Monomial::kMaxDegree) {
    throw std::invalid_argument("poly: degree cap exceeds monomial storage");
  }
}

PolyHamiltonian PolyHamiltonian::with_degree_cap(unsigned cap) const {
  PolyHamiltonian out(mode_cutoff_, cap);
  for (const auto& [m, c] : terms_) {
    if (m.degree() <= cap) out.terms_.emplace(m, c);
  }
  return out;
}

void PolyHamiltonian::add(const Monomial& m, cplx coef) {
  if (m.degree() > degree_cap_) {
    throw std::invalid_argument("poly: term of degree " + std::to_string(m.degree()) +
                                " exceeds cap " + std::to_string(degree_cap_));
  }
  if (m.max_mode() > mode_cutoff_) throw std::invalid_argument("poly: mode beyond cutoff");
  if (coef == cplx{}) return;
  auto [it, inserted] = terms_.try_emplace(m, coef);
  if (!inserted) {
    it->second += coef;
    if (it->second == cplx{}) terms_.erase(it);
  }
}

double PolyHamiltonian::add_capped(const Monomial& m, cplx coef) {
  if (m.degree() > degree_cap_) return std::abs(coef);
  add(m, coef);
  return 0.0;
}

cplx PolyHamiltonian::coefficient(const Monomial& m) const {
  const auto it = terms_.find(m);
  return it == terms_.end() ? cplx{} : it->second;
}

unsigned PolyHamiltonian::min_degree() const noexcept {
  return terms_.empty() ? 0u : terms_.begin()->first.degree();
}

unsigned PolyHamiltonian::max_degree() const noexcept {
  return terms_.empty() ? 0u : terms_.rbegin()->first.degree();
}

bool PolyHamiltonian::is_homogeneous() const noexcept { return min_degree() == max_degree(); }

std::vector<unsigned> PolyHamiltonian::degrees() const {
  std::vector<unsigned> out;
  for (const auto& [m, c] : terms_) {
    if (out.empty() || out.back() != m.degree()) out.push_back(m.degree());
  }
  return out;
}

PolyHamiltonian PolyHamiltonian::homogeneous_part(unsigned degree) const {
  return degree_range(degree, degree);
}

PolyHamiltonian PolyHamiltonian::degree_range(unsigned lo, unsigned hi) const {
  PolyHamiltonian out = empty_like();
  for (const auto& [m, c] : terms_) {
    if (m.degree() >= lo && m.degree() <= hi) out.terms_.emplace_hint(out.terms_.end(), m, c);
  }
  return out;
}

double PolyHamiltonian::reality_defect() const {
  double worst = 0.0;
  for (const auto& [m, c] : terms_) {
    worst = std::max(worst, std::abs(c - std::conj(coefficient(m.conjugate()))));
  }
  return worst;
}

double PolyHamiltonian::coefficient_l1() const {
  double acc = 0.0;
  for (const auto& [m, c] : terms_) acc += std::abs(c);
  return acc;
}

double PolyHamiltonian::max_abs_coefficient() const {
  double acc = 0.0;
  for (const auto& [m, c] : terms_) acc = std::max(acc, std::abs(c));
  return acc;
}

cplx PolyHamiltonian::evaluate(std::span<const cplx> psi) const {
  cplx acc{};
  for (const auto& [m, c] : terms_) acc += c * m.evaluate(psi);
  return acc;
}

void PolyHamiltonian::check_compatible(const PolyHamiltonian& other) const {
  if (mode_cutoff_ != other.mode_cutoff_) {
    throw std::invalid_argument("poly: mode cutoff mismatch");
  }
}

PolyHamiltonian& PolyHamiltonian::operator+=(const PolyHamiltonian& other) {
  check_compatible(other);
  for (const auto& [m, c] : other.terms_) add(m, c);
  return *this;
}

PolyHamiltonian& PolyHamiltonian::operator-=(const PolyHamiltonian& other) {
  check_compatible(other);
  for (const auto& [m, c] : other.terms_) add(m, -c);
  return *this;
}

PolyHamiltonian& PolyHamiltonian::operator*=(cplx scale) {
  if (scale == cplx{}) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= scale;
  return *this;
}

// ---------------------------------------------------------------- builders

PolyHamiltonian quadratic_hamiltonian(const FrequencySet& freqs, std::size_t J,
                                      unsigned degree_cap) {
  if (freqs.size() < J) throw std::invalid_argument("quadratic_hamiltonian: too few frequencies");
  PolyHamiltonian h(J, std::max(degree_cap, 2u));
  for (unsigned k = 1; k <= J; ++k) {
    const VarIndex vars[2] = {psi_var(k), psibar_var(k)};
    h.add(Monomial(vars), freqs.omega[k - 1]);
  }
  return h;
}

PolyHamiltonian action_monomial(unsigned mode, std::size_t J, unsigned degree_cap) {
  PolyHamiltonian h(J, std::max(degree_cap, 2u));
  const VarIndex vars[2] = {psi_var(mode), psibar_var(mode)};
  h.add(Monomial(vars), 1.0);
  return h;
}

// ---------------------------------------------------------------- bracket

namespace {

struct TermRef {
  const Monomial* mono;
  cplx coef;
};

// Terms of a polynomial grouped by (degree, variable).
struct VarIndexTable {
  // by_var[v] = terms containing v (each listed once).
  std::vector<std::vector<TermRef>> by_var;
  // weight[deg][v] = sum over terms of degree deg of |c| * exponent(v).
  std::map<unsigned, std::vector<double>> weight;

  VarIndexTable(const PolyHamiltonian& p, std::size_t nvars) : by_var(nvars) {
    for (const auto& [m, c] : p.terms()) {
      auto& w = weight[m.degree()];
      if (w.empty()) w.assign(nvars, 0.0);
      const auto vars = m.vars();
      for (std::size_t i = 0; i < vars.size(); ++i) {
        w[vars[i]] += std::abs(c);
        if (i == 0 || vars[i] != vars[i - 1]) by_var[vars[i]].push_back({&m, c});
      }
    }
  }
};

}  // namespace

CappedPoly poisson_bracket(const PolyHamiltonian& f, const PolyHamiltonian& g, unsigned degree_cap) {
  if (f.mode_cutoff() != g.mode_cutoff()) {
    throw std::invalid_argument("poisson_bracket: mode cutoff mismatch");
  }
  const std::size_t nvars = 2 * f.mode_cutoff();
  CappedPoly out{PolyHamiltonian(f.mode_cutoff(), degree_cap), 0.0};
  if (f.empty() || g.empty()) return out;

  const VarIndexTable ft(f, nvars);
  const VarIndexTable gt(g, nvars);

  // Degree pairs whose bracket exceeds the cap only contribute to the spill;
  // the pairwise |coefficient| sum factorises over the shared variable.
  for (const auto& [df, wf] : ft.weight) {
    for (const auto& [dg, wg] : gt.weight) {
      if (df + dg < 2 || df + dg - 2 <= degree_cap) continue;
      for (std::size_t v = 0; v < nvars; ++v) out.spill += wf[v] * wg[var_partner(static_cast<VarIndex>(v))];
    }
  }

  std::unordered_map<Monomial, cplx, MonomialHash> acc;
  for (const auto& [fm, fc] : f.terms()) {
    const auto fvars = fm.vars();
    for (std::size_t i = 0; i < fvars.size(); ++i) {
      const VarIndex v = fvars[i];
      if (i > 0 && fvars[i - 1] == v) continue;
      const unsigned ev = fm.exponent(v);
      // d/dpsibar_k f * d/dpsi_k g enters with +i, d/dpsi_k f * d/dpsibar_k g with -i.
      const cplx pref = (var_is_conjugate(v) ? kI : -kI) * static_cast<double>(ev) * fc;
      const Monomial freduced = fm.without(v);
      const VarIndex partner = var_partner(v);
      for (const auto& gterm : gt.by_var[partner]) {
        if (freduced.degree() + gterm.mono->degree() - 1 > degree_cap) continue;
        const unsigned ep = gterm.mono->exponent(partner);
        const Monomial prod = freduced * gterm.mono->without(partner);
        acc[prod] += pref * static_cast<double>(ep) * gterm.coef;
      }
    }
  }
  std::vector<std::pair<Monomial, cplx>> sorted(acc.begin(), acc.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [m, c] : sorted) out.poly.add(m, c);
  return out;
}

CappedPoly poisson_bracket(const PolyHamiltonian& f, const PolyHamiltonian& g) {
  return poisson_bracket(f, g, std::max(f.degree_cap(), g.degree_cap()));
}

PolyHamiltonian modulus(const PolyHamiltonian& f) {
  PolyHamiltonian out = f.empty_like();
  for (const auto& [m, c] : f.terms()) out.add(m, std::abs(c));
  return out;
}

// ----------------------------------------------------------- evaluation

std::pair<std::vector<cplx>, std::vector<cplx>> gradient_eval(const PolyHamiltonian& f,
                                                              const ModeState& state) {
  const std::size_t J = state.size();
  if (f.mode_cutoff() > J) throw std::invalid_argument("gradient_eval: state shorter than cutoff");
  std::vector<cplx> dpsi(J), dpsibar(J);
  std::vector<cplx> values(2 * J);
  for (std::size_t k = 0; k < J; ++k) {
    values[2 * k] = state[k];
    values[2 * k + 1] = std::conj(state[k]);
  }
  for (const auto& [m, c] : f.terms()) {
    const auto vars = m.vars();
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (i > 0 && vars[i - 1] == vars[i]) continue;
      // derivative: exponent * product of the remaining factors
      cplx prod = c * static_cast<double>(m.exponent(vars[i]));
      bool skipped = false;
      for (std::size_t q = 0; q < vars.size(); ++q) {
        if (!skipped && vars[q] == vars[i]) {
          skipped = true;
          continue;
        }
        prod *= values[vars[q]];
      }
      const std::size_t k = var_mode(vars[i]) - 1;
      (var_is_conjugate(vars[i]) ? dpsibar : dpsi)[k] += prod;
    }
  }
  return {std::move(dpsi), std::move(dpsibar)};
}

ModeState vector_field_eval(const PolyHamiltonian& f, const ModeState& state) {
  auto [dpsi, dpsibar] = gradient_eval(f, state);
  ModeState out(state.size());
  for (std::size_t k = 0; k < state.size(); ++k) out[k] = kI * dpsibar[k];
  return out;
}

std::pair<ModeState, ModeState> project_split(const ModeState& state, std::size_t N) {
  if (N < 1 || N > state.size()) throw std::invalid_argument("project_split: N out of range");
  ModeState low(state.size()), high(state.size());
  for (std::size_t k = 0; k < state.size(); ++k) (k < N ? low : high)[k] = state[k];
  return {std::move(low), std::move(high)};
}

std::pair<PolyHamiltonian, PolyHamiltonian> high_degree_filter(const PolyHamiltonian& f,
                                                               unsigned N,
                                                               unsigned max_high_degree) {
  PolyHamiltonian kept = f.empty_like(), discarded = f.empty_like();
  for (const auto& [m, c] : f.terms()) {
    (m.high_degree(N) <= max_high_degree ? kept : discarded).add(m, c);
  }
  return {std::move(kept), std::move(discarded)};
}

}  // namespace nlkg
