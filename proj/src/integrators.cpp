#include "nlkg/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "nlkg/errors.hpp"
#include "nlkg/rng.hpp"

namespace nlkg {

SplittingScheme parse_scheme(const std::string& name) {
  if (name == "strang") return SplittingScheme::strang;
  if (name == "yoshida4") return SplittingScheme::yoshida4;
  if (name == "yoshida6") return SplittingScheme::yoshida6;
  throw std::invalid_argument("unknown integrator scheme '" + name + "'");
}

const char* scheme_name(SplittingScheme scheme) {
  switch (scheme) {
    case SplittingScheme::strang:
      return "strang";
    case SplittingScheme::yoshida4:
      return "yoshida4";
    case SplittingScheme::yoshida6:
      return "yoshida6";
  }
  return "?";
}

int scheme_order(SplittingScheme scheme) {
  switch (scheme) {
    case SplittingScheme::strang:
      return 2;
    case SplittingScheme::yoshida4:
      return 4;
    case SplittingScheme::yoshida6:
      return 6;
  }
  return 0;
}

double Trajectory::max_relative_energy_drift() const {
  if (energy.empty()) return 0.0;
  const double h0 = energy.front();
  double worst = 0.0;
  for (double h : energy) worst = std::max(worst, std::abs(h - h0));
  return h0 != 0.0 ? worst / std::abs(h0) : worst;
}

std::uint64_t potential_hash(const PotentialSpec& pot) {
  std::string text;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g;%.17g", pot.s, pot.M);
  text += buf;
  for (double v : pot.vprime) {
    std::snprintf(buf, sizeof buf, ";%.17g", v);
    text += buf;
  }
  return fnv1a64(text);
}

double nlkg_energy(const ModeState& state, const FrequencySet& freqs,
                   const SpectralNonlinearity& nonlinear) {
  // c^2 sum |psi|^2 summed separately keeps the small part visible at large c
  double mass = 0.0, rest = 0.0;
  for (std::size_t j = 0; j < state.size(); ++j) {
    const double a = std::norm(state[j]);
    mass += a;
    rest += freqs.offset[j] * a;
  }
  return freqs.c2() * mass + rest + nonlinear.energy(state);
}

namespace {

// Weights w_i of S(w_1 h) ... S(w_k h).
std::vector<double> composition_weights(SplittingScheme scheme) {
  switch (scheme) {
    case SplittingScheme::strang:
      return {1.0};
    case SplittingScheme::yoshida4: {
      const double cr = std::cbrt(2.0);
      const double w1 = 1.0 / (2.0 - cr);
      return {w1, -cr * w1, w1};
    }
    case SplittingScheme::yoshida6: {
      const double w1 = 0.78451361047755726381949763;
      const double w2 = 0.23557321335935813368479318;
      const double w3 = -1.17767998417887100694641568;
      const double w0 = 1.31518632068391121888424973;
      return {w3, w2, w1, w0, w1, w2, w3};
    }
  }
  return {1.0};
}

bool finite_state(const ModeState& s) {
  for (const auto& v : s.psi) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

// exp(i omega t) with the c^2 t part reduced separately
cplx unit_phase(double c2, double offset, double t) {
  const double a = std::remainder(c2 * t, 2.0 * 3.14159265358979323846);
  const cplx z = std::polar(1.0, a + offset * t);
  return z / std::abs(z);
}

class SplittingStepper {
 public:
  SplittingStepper(const FrequencySet& freqs, const SpectralNonlinearity& nl, double dt,
                   SplittingScheme scheme)
      : nl_(nl) {
    const auto w = composition_weights(scheme);
    const std::size_t J = freqs.size();
    // rotation lengths between kicks: w1/2, (w1+w2)/2, ..., wk/2
    std::vector<double> rot(w.size() + 1, 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) {
      rot[i] += 0.5 * w[i];
      rot[i + 1] += 0.5 * w[i];
    }
    for (double r : rot) {
      std::vector<cplx> f(J);
      for (std::size_t j = 0; j < J; ++j) f[j] = unit_phase(freqs.c2(), freqs.offset[j], r * dt);
      rotations_.push_back(std::move(f));
    }
    for (double wi : w) kicks_.push_back(wi * dt);
  }

  void step(ModeState& s) const {
    rotate(s, 0);
    for (std::size_t i = 0; i < kicks_.size(); ++i) {
      nl_.kick(s, kicks_[i]);
      rotate(s, i + 1);
    }
  }

 private:
  void rotate(ModeState& s, std::size_t which) const {
    const auto& f = rotations_[which];
    for (std::size_t j = 0; j < s.size(); ++j) s[j] *= f[j];
  }

  const SpectralNonlinearity& nl_;
  std::vector<std::vector<cplx>> rotations_;
  std::vector<double> kicks_;
};

}  // namespace

NlkgSummary run_nlkg(const ModeState& state0, const PotentialSpec& pot, double c,
                     const NonlinearitySpec& nl, std::size_t J, const NlkgOptions& opt,
                     const NlkgObserver& observer) {
  if (!(opt.dt > 0.0)) throw std::invalid_argument("integrate_nlkg: dt must be positive");
  if (!(opt.T >= opt.dt)) throw std::invalid_argument("integrate_nlkg: need T >= dt");
  if (c < 1.0) throw std::invalid_argument("integrate_nlkg: c must be >= 1");
  if (state0.size() != J) throw std::invalid_argument("integrate_nlkg: state length != J");
  if (opt.record_every < 1) throw std::invalid_argument("integrate_nlkg: record_every >= 1");
  if (!finite_state(state0)) throw std::invalid_argument("integrate_nlkg: non-finite initial state");
  if (J > pot.size()) throw std::invalid_argument("integrate_nlkg: potential shorter than J");

  PotentialSpec truncated = pot;
  truncated.vprime.resize(J);
  const FrequencySet freqs = frequencies(truncated, c);
  const SpectralNonlinearity nonlinear(nl, truncated, c, J);
  const SplittingStepper stepper(freqs, nonlinear, opt.dt, opt.scheme);

  const auto steps = static_cast<std::size_t>(std::llround(std::ceil(opt.T / opt.dt - 1e-9)));
  NlkgSummary out;
  ModeState state = state0;
  const double h0 = nlkg_energy(state, freqs, nonlinear);
  auto report = [&](double t) {
    const double h = nlkg_energy(state, freqs, nonlinear);
    if (!std::isfinite(h)) {
      throw NumericalError("integrate_nlkg: non-finite energy at t=" + std::to_string(t));
    }
    const double drift = h0 != 0.0 ? std::abs(h - h0) / std::abs(h0) : std::abs(h - h0);
    out.max_relative_energy_drift = std::max(out.max_relative_energy_drift, drift);
    return observer ? observer(t, state, h) : true;
  };

  if (!report(0.0)) {
    out.stopped = true;
    out.final_state = state;
    return out;
  }
  for (std::size_t n = 1; n <= steps; ++n) {
    const double t = static_cast<double>(n) * opt.dt;
    if (nl.is_zero()) {
      // exact linear flow from the initial datum, no accumulated round-off
      for (std::size_t j = 0; j < J; ++j) {
        state[j] = state0[j] * unit_phase(freqs.c2(), freqs.offset[j], t);
      }
    } else {
      stepper.step(state);
    }
    if (n % opt.record_every == 0 || n == steps) {
      if (!finite_state(state)) {
        throw NumericalError("integrate_nlkg: non-finite state at t=" + std::to_string(t));
      }
      out.steps = n;
      out.final_time = t;
      if (!report(t)) {
        out.stopped = true;
        break;
      }
    }
  }
  out.final_state = state;
  return out;
}

Trajectory integrate_nlkg(const ModeState& state0, const PotentialSpec& pot, double c,
                          const NonlinearitySpec& nl, double dt, double T, std::size_t J,
                          SplittingScheme scheme, std::size_t record_every) {
  Trajectory traj;
  traj.meta = {c, potential_hash(pot), scheme_name(scheme), dt, J};
  NlkgOptions opt{dt, T, scheme, record_every};
  run_nlkg(state0, pot, c, nl, J, opt, [&](double t, const ModeState& s, double h) {
    traj.times.push_back(t);
    traj.states.push_back(s);
    traj.energy.push_back(h);
    return true;
  });
  return traj;
}

// ----------------------------------------------------------- polynomial flows

namespace {

// X_H(psi)_k = i dH/dpsibar_k, flattened for repeated evaluation.
class CompiledField {
 public:
  explicit CompiledField(const PolyHamiltonian& H) : J_(H.mode_cutoff()) {
    for (const auto& [m, c] : H.terms()) {
      const auto vars = m.vars();
      for (std::size_t i = 0; i < vars.size(); ++i) {
        const VarIndex v = vars[i];
        if (!var_is_conjugate(v) || (i > 0 && vars[i - 1] == v)) continue;
        Entry e;
        e.target = var_mode(v) - 1;
        e.coef = cplx{0.0, 1.0} * c * static_cast<double>(m.exponent(v));
        e.begin = others_.size();
        const Monomial rest = m.without(v);
        for (VarIndex u : rest.vars()) others_.push_back(u);
        e.end = others_.size();
        entries_.push_back(e);
      }
    }
  }

  std::size_t size() const noexcept { return J_; }

  // x holds (Re psi_1, Im psi_1, Re psi_2, ...)
  void operator()(const std::vector<double>& x, std::vector<double>& dxdt) const {
    thread_local std::vector<cplx> values;
    values.resize(2 * J_);
    for (std::size_t k = 0; k < J_; ++k) {
      values[2 * k] = {x[2 * k], x[2 * k + 1]};
      values[2 * k + 1] = {x[2 * k], -x[2 * k + 1]};
    }
    std::fill(dxdt.begin(), dxdt.end(), 0.0);
    for (const auto& e : entries_) {
      cplx prod = e.coef;
      for (std::size_t q = e.begin; q < e.end; ++q) prod *= values[others_[q]];
      dxdt[2 * e.target] += prod.real();
      dxdt[2 * e.target + 1] += prod.imag();
    }
  }

 private:
  struct Entry {
    std::size_t target;
    cplx coef;
    std::size_t begin, end;
  };
  std::size_t J_;
  std::vector<Entry> entries_;
  std::vector<VarIndex> others_;
};

std::vector<double> pack(const ModeState& s, std::size_t J) {
  if (s.size() < J) throw std::invalid_argument("integrate_poly: state shorter than cutoff");
  std::vector<double> x(2 * s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    x[2 * k] = s[k].real();
    x[2 * k + 1] = s[k].imag();
  }
  return x;
}

ModeState unpack(const std::vector<double>& x) {
  ModeState s(x.size() / 2);
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = {x[2 * k], x[2 * k + 1]};
  return s;
}

using State = std::vector<double>;
using Stepper = boost::numeric::odeint::runge_kutta_fehlberg78<State>;

void check_finite(const State& x, const char* where) {
  for (double v : x) {
    if (!std::isfinite(v)) throw NumericalError(std::string(where) + ": non-finite state");
  }
}

}  // namespace

Trajectory integrate_poly(const PolyHamiltonian& H, const ModeState& state0, double dt, double T,
                          double tolerance) {
  namespace ode = boost::numeric::odeint;
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_poly: dt must be positive");
  if (!(std::abs(T) >= dt)) throw std::invalid_argument("integrate_poly: need |T| >= dt");
  if (!(tolerance > 0.0)) throw std::invalid_argument("integrate_poly: tolerance must be positive");
  const CompiledField field(H);
  // padded states: modes beyond the cutoff do not move
  State x = pack(state0, H.mode_cutoff());
  const std::size_t J = state0.size();
  auto rhs = [&](const State& y, State& dydt, double) {
    std::fill(dydt.begin(), dydt.end(), 0.0);
    State head(y.begin(), y.begin() + 2 * field.size()), dhead(head.size());
    field(head, dhead);
    std::copy(dhead.begin(), dhead.end(), dydt.begin());
  };

  const double sign = T < 0.0 ? -1.0 : 1.0;
  const auto n = static_cast<std::size_t>(std::floor(std::abs(T) / dt + 1e-9));
  std::vector<double> times;
  for (std::size_t i = 0; i <= n; ++i) times.push_back(sign * static_cast<double>(i) * dt);
  if (std::abs(times.back()) < std::abs(T) * (1.0 - 1e-12)) times.push_back(T);

  Trajectory traj;
  traj.meta = {1.0, 0, "rkf78", dt, J};
  try {
    ode::integrate_times(
        ode::make_controlled(tolerance, tolerance, Stepper()), rhs, x, times.begin(), times.end(),
        sign * dt / 4.0, [&](const State& y, double t) {
          check_finite(y, "integrate_poly");
          traj.times.push_back(t);
          traj.states.push_back(unpack(y));
          traj.energy.push_back(H.evaluate(traj.states.back()).real());
        });
  } catch (const NumericalError&) {
    throw;
  } catch (const std::exception& e) {
    throw NumericalError(std::string("integrate_poly: step control failed: ") + e.what());
  }
  if (sign < 0.0) {
    // keep times increasing in the record
    std::reverse(traj.times.begin(), traj.times.end());
    std::reverse(traj.states.begin(), traj.states.end());
    std::reverse(traj.energy.begin(), traj.energy.end());
  }
  return traj;
}

ModeState flow_poly(const PolyHamiltonian& H, const ModeState& state0, double t,
                    double tolerance) {
  namespace ode = boost::numeric::odeint;
  if (t == 0.0 || H.empty()) return state0;
  const CompiledField field(H);
  State x = pack(state0, H.mode_cutoff());
  auto rhs = [&](const State& y, State& dydt, double) {
    std::fill(dydt.begin(), dydt.end(), 0.0);
    State head(y.begin(), y.begin() + 2 * field.size()), dhead(head.size());
    field(head, dhead);
    std::copy(dhead.begin(), dhead.end(), dydt.begin());
  };
  try {
    ode::integrate_adaptive(ode::make_controlled(tolerance, tolerance, Stepper()), rhs, x, 0.0, t,
                            t / 16.0);
  } catch (const std::exception& e) {
    throw NumericalError(std::string("flow_poly: step control failed: ") + e.what());
  }
  check_finite(x, "flow_poly");
  return unpack(x);
}

}  // namespace nlkg
