// Acceptance run: one PASS/FAIL line per criterion with the measured values.
//
//   acceptance [criterion ...] [--allow-red id ...]
//
// Without arguments every criterion runs. A red listed with --allow-red is
// still printed as FAIL but does not make the exit status nonzero.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "nlkg/diagnostics.hpp"
#include "nlkg/experiments.hpp"
#include "nlkg/integrators.hpp"
#include "nlkg/nonlinearity.hpp"
#include "nlkg/nonresonance.hpp"
#include "nlkg/normal_form.hpp"
#include "nlkg/rng.hpp"
#include "nlkg/tame.hpp"

using namespace nlkg;
namespace fs = std::filesystem;
using big = boost::multiprecision::cpp_bin_float_50;

namespace {

struct Verdict {
  std::string id;  // "9a", "9b" or the plain number
  bool pass{false};
  std::string detail;
};

struct Criterion {
  int number;
  std::string title;
  double limit_s;
  std::function<std::vector<Verdict>()> run;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}
std::string g3(double x) { return fmt("%.3g", x); }

// ---------------------------------------------------------------- shared setup

constexpr std::size_t kJ = 16;
constexpr double kS = 4.0;
constexpr unsigned kR = 1;
constexpr double kGamma = 1e-3;
constexpr double kTau = 6.0;
constexpr std::uint64_t kSeed = 2024;

PotentialSpec seeded_potential(std::size_t J, std::uint64_t seed, const char* label) {
  RandomStream rng(seed, label);
  std::vector<double> v(J);
  for (auto& x : v) x = rng.uniform(-0.5, 0.5);
  return PotentialSpec::make(2.0, 0.5, v);
}

const PotentialSpec& sweep_potential() {
  static const PotentialSpec pot = seeded_potential(kJ, kSeed, "acceptance_potential");
  return pot;
}

NonlinearitySpec quartic() { return NonlinearitySpec::quartic(1.0); }

// All three divisor families at the normal-form parameters for one c.
struct CertSummary {
  bool passed{true};
  double worst_margin{std::numeric_limits<double>::infinity()};  // min_divisor / threshold
};

CertSummary certify_all(const PotentialSpec& pot, double c, unsigned r, unsigned N, std::size_t J) {
  const auto f = frequencies(pot, c);
  CertSummary out;
  // monomials up to degree r+3: |k| <= r+3 on low modes, one fewer per high mode
  for (const auto& cert :
       {certify_order0(f, r + 3, N, kGamma, kTau),
        certify_one_tail(f, r + 2, N, kGamma, kTau, static_cast<unsigned>(J), pot.s),
        certify_two_tail(f, r + 1, N, kGamma, kTau, static_cast<unsigned>(J), static_cast<unsigned>(J),
                         pot.s)}) {
    out.passed = out.passed && cert.passed;
    out.worst_margin = std::min(out.worst_margin, cert.min_divisor / cert.threshold);
  }
  return out;
}

double max_gap(const ModeState& a, const ModeState& b) {
  double worst = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
  return worst;
}

double max_abs(const ModeState& a) {
  double worst = 0.0;
  for (const auto& v : a.psi) worst = std::max(worst, std::abs(v));
  return worst;
}

PolyHamiltonian random_poly(std::size_t J, unsigned degree, std::size_t terms, RandomStream& rng,
                            bool real_, unsigned cap) {
  PolyHamiltonian f(J, cap);
  for (std::size_t t = 0; t < terms; ++t) {
    std::vector<VarIndex> vars;
    for (unsigned d = 0; d < degree; ++d) {
      vars.push_back(static_cast<VarIndex>(std::min<std::size_t>(2 * J - 1, rng.uniform() * 2 * J)));
    }
    std::sort(vars.begin(), vars.end());
    const Monomial m(vars);
    const cplx c = rng.complex_normal();
    f.add(m, c);
    if (real_) f.add(m.conjugate(), std::conj(c));
  }
  return f;
}

// ---------------------------------------------------------------- 1

std::vector<Verdict> frequency_correctness() {
  const std::size_t J = 64;
  const auto pot = seeded_potential(J, kSeed, "criterion1");
  const auto lambda = eigenvalues(pot);
  double worst_rel = 0.0;
  std::size_t sandwich_fail = 0;
  for (double c : {1.0, 10.0, 100.0, 1000.0, 1e6}) {
    const auto f = frequencies(lambda, c);
    const big bc = c;
    for (std::size_t j = 0; j < J; ++j) {
      const big exact = bc * sqrt(bc * bc + big(lambda[j]));
      worst_rel = std::max(worst_rel, static_cast<double>(abs((big(f.omega[j]) - exact) / exact)));
      const double lam = lambda[j], c2 = c * c;
      const double lo = lam / 2 - lam * lam / (8 * c2), hi = lam / 2;
      // the offset and omega = c^2 + offset both respect the sandwich in floating point
      if (!(f.offset[j] >= lo && f.offset[j] <= hi)) ++sandwich_fail;
      if (!(f.omega[j] >= c2 + lo && f.omega[j] <= c2 + hi)) ++sandwich_fail;
      // and the sandwich holds for the 50-digit value
      const big blam = lam, bc2 = bc * bc;
      if (!(exact >= bc2 + blam / 2 - blam * blam / (8 * bc2) && exact <= bc2 + blam / 2)) {
        ++sandwich_fail;
      }
    }
  }
  return {{"1", worst_rel <= 1e-12 && sandwich_fail == 0,
           "max rel error " + g3(worst_rel) + " (bar 1e-12), sandwich violations " +
               std::to_string(sandwich_fail)}};
}

// ---------------------------------------------------------------- 2

std::vector<Verdict> round_trip() {
  const std::size_t J = 16;
  const auto pot = seeded_potential(J, kSeed, "criterion2");
  RandomStream rng(kSeed, "criterion2_states");
  double worst = 0.0;
  for (double c : {1.0, 1000.0}) {
    for (int trial = 0; trial < 100; ++trial) {
      ModeState x(J);
      RealState rs{std::vector<double>(J), std::vector<double>(J)};
      for (std::size_t j = 0; j < J; ++j) {
        x[j] = rng.complex_normal() * std::pow(j + 1.0, -2.0);
        rs.u[j] = rng.normal() * std::pow(j + 1.0, -2.0);
        rs.ut[j] = rng.normal() * c * c * std::pow(j + 1.0, -2.0);
      }
      const auto y = to_psi(from_psi(x, pot, c), pot, c);
      worst = std::max(worst, max_gap(x, y) / max_abs(x));
      const auto back = from_psi(to_psi(rs, pot, c), pot, c);
      double du = 0.0, nu = 0.0, dv = 0.0, nv = 0.0;
      for (std::size_t j = 0; j < J; ++j) {
        du = std::max(du, std::abs(back.u[j] - rs.u[j]));
        nu = std::max(nu, std::abs(rs.u[j]));
        dv = std::max(dv, std::abs(back.ut[j] - rs.ut[j]));
        nv = std::max(nv, std::abs(rs.ut[j]));
      }
      worst = std::max({worst, du / nu, dv / nv});
    }
  }
  return {{"2", worst <= 1e-12, "max rel round-trip error " + g3(worst) + " over 400 maps (bar 1e-12)"}};
}

// ---------------------------------------------------------------- 3

std::vector<std::vector<int>> naive_ks(unsigned r, unsigned N) {
  std::vector<std::vector<int>> out;
  const int ri = static_cast<int>(r);
  std::vector<int> k(N, -ri);
  while (true) {
    int norm = 0;
    for (int x : k) norm += std::abs(x);
    if (norm > 0 && norm <= ri) out.push_back(k);
    std::size_t i = 0;
    while (i < N && k[i] == ri) k[i++] = -ri;
    if (i == N) break;
    ++k[i];
  }
  return out;
}

std::vector<Verdict> divisor_oracle() {
  const unsigned lm = 40;
  RandomStream rng(kSeed, "criterion3");
  std::size_t mismatches = 0, witness_bad = 0, checks = 0;
  const unsigned Ns[] = {2, 4, 6};
  for (int i = 0; i < 20; ++i) {
    const double c = rng.uniform(1.0, 20.0);
    const auto pot = seeded_potential(lm, kSeed + i, "criterion3_potential");
    const auto f = frequencies(pot, c);
    const unsigned r = 1 + i % 3, N = Ns[(i / 3) % 3];
    const auto ks = naive_ks(r, N);
    double o0 = std::numeric_limits<double>::infinity(), o1 = o0, o2 = o0;
    for (const auto& k : ks) {
      double base = 0.0;
      for (std::size_t j = 0; j < N; ++j) base += k[j] * f.omega[j];
      for (long n = -std::lround(base) - 2; n <= -std::lround(base) + 2; ++n) {
        o0 = std::min(o0, divisor_value(f, DivisorQuery{k, {}, n}));
      }
      for (unsigned l = N; l <= lm; ++l) {
        for (int s1 : {-1, 1}) {
          // k + s e_l = 0 is the zero function, not a divisor
          bool zero = l <= N;
          for (std::size_t j = 0; j < N && zero; ++j) zero = k[j] + (j + 1 == l ? s1 : 0) == 0;
          if (!zero) o1 = std::min(o1, divisor_value(f, DivisorQuery{k, {{l, s1}}, 0}));
          for (unsigned m = l + 1; m <= lm; ++m) {
            for (int s2 : {-1, 1}) o2 = std::min(o2, divisor_value(f, DivisorQuery{k, {{l, s1}, {m, s2}}, 0}));
          }
        }
      }
    }
    const Certificate certs[] = {certify_order0(f, r, N, kGamma, kTau),
                                 certify_one_tail(f, r, N, kGamma, kTau, lm),
                                 certify_two_tail(f, r, N, kGamma, kTau, lm, lm)};
    const double oracle[] = {o0, o1, o2};
    for (int fam = 0; fam < 3; ++fam) {
      ++checks;
      if (certs[fam].min_divisor != oracle[fam]) ++mismatches;
      if (divisor_value(f, certs[fam].witness) != certs[fam].min_divisor) ++witness_bad;
    }
  }
  return {{"3", mismatches == 0 && witness_bad == 0,
           std::to_string(checks) + " certificates vs naive scan: " + std::to_string(mismatches) +
               " minimum mismatches, " + std::to_string(witness_bad) + " witnesses off the minimum"}};
}

// ---------------------------------------------------------------- 4

std::vector<Verdict> measure_scaling() {
  MeasureConfig cfg;
  cfg.family = MeasureFamily::all;
  cfg.estimator = MeasureEstimator::conditional;
  cfg.c_floor = 1;
  cfg.J = 8;
  cfg.r = 1;
  cfg.N = 4;
  cfg.tau = 6.0;
  cfg.samples = 10000;
  cfg.seed = kSeed;
  for (int i = 0; i <= 8; ++i) cfg.gamma_list.push_back(std::pow(10.0, -3.0 + 0.25 * i));
  const auto rows = estimate_resonant_measure(cfg);
  std::vector<std::pair<double, double>> pts;
  std::string fr;
  for (const auto& row : rows) {
    if (row.fraction > 0.0) pts.emplace_back(row.gamma, row.fraction);
    fr += (fr.empty() ? "" : " ") + g3(row.fraction);
  }
  if (pts.size() < 3) return {{"4", false, "fewer than three nonzero fractions: " + fr}};
  const double slope = fit_scaling(pts).slope;
  return {{"4", std::abs(slope - 1.0) <= 0.3,
           "log-log slope " + fmt("%.3f", slope) + " (target 1.0 +- 0.3); fractions " + fr}};
}

// ---------------------------------------------------------------- 5

std::vector<Verdict> homological_residual_check() {
  const std::size_t J = 8;
  const auto f = frequencies(seeded_potential(J, kSeed, "criterion5"), 1.37);
  RandomStream rng(kSeed, "criterion5_polys");
  double worst = 0.0;
  std::size_t quasi = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = random_poly(J, 4, 40, rng, trial % 2 == 0, 4);
    const auto h = solve_homological(f, g, kGamma, kTau, J);
    quasi += h.quasi_resonant.size();
    worst = std::max(worst, homological_residual(f, g, h));
  }
  return {{"5", worst <= 1e-10,
           "max coefficient residual " + g3(worst) + " over 50 polynomials (bar 1e-10), " +
               std::to_string(quasi) + " quasi-resonant terms"}};
}

// ---------------------------------------------------------------- 6

std::vector<Verdict> normal_form_structure() {
  const std::size_t J = 8;
  const double c = 1.0, R = 0.05;
  const auto pot = seeded_potential(J, kSeed, "acceptance_potential");
  const auto f = frequencies(pot, c);
  bool ok = true;
  std::string detail;
  for (unsigned r : {1u, 2u}) {
    const unsigned N = 4;
    const auto cert = certify_all(pot, c, r, N, J);
    NormalFormParams p{r, kGamma, kTau, N, R, kS};
    const auto N1 = taylor_nonlinearity(quartic(), pot, c, J, p.extended_cap()).n1;
    const auto res = normalize(f, N1, p);
    const auto rep = verify_action_dependence(res.Z, N);
    const auto x = make_initial_state(J, kS, R, kSeed, r);
    const auto I0 = actions(x);
    const auto traj = integrate_poly(res.Z, x, 10.0, 1000.0);
    double drift = 0.0;
    for (const auto& st : traj.states) {
      const auto I = actions(st);
      for (std::size_t j = 0; j < N; ++j) drift = std::max(drift, std::abs(I[j] - I0[j]));
    }
    const bool pass = cert.passed && res.quasi_resonant.empty() && rep.passed() && drift <= 1e-10;
    ok = ok && pass;
    detail += (detail.empty() ? "" : "; ") + std::string("r=") + std::to_string(r) +
              ": certified " + (cert.passed ? "yes" : "NO") + ", Z " + std::to_string(res.Z.size()) +
              " terms, violations " + std::to_string(rep.violations.size()) + ", quasi " +
              std::to_string(res.quasi_resonant.size()) + ", low-mode action drift " + g3(drift);
  }
  return {{"6", ok, detail}};
}

// ---------------------------------------------------------------- 7

std::vector<Verdict> tame_bracket() {
  RandomStream rng(kSeed, "criterion7");
  std::size_t violations = 0, evaluated = 0;
  double worst_ratio = 0.0;
  for (int pair = 0; pair < 100; ++pair) {
    const std::size_t J = 2 + pair % 5;
    const unsigned df = 2 + pair % 3, dg = 2 + (pair / 3) % 3;
    const double s = 1.0 + (pair % 4);
    const auto f = random_poly(J, df, 1 + pair % 4, rng, pair % 2 == 0, 8);
    const auto g = random_poly(J, dg, 1 + (pair / 2) % 4, rng, pair % 2 == 0, 8);
    const auto b = poisson_bracket(f, g, 8).poly;
    const double bound_const = (df - 1 + dg - 1) * tame_norm_upper(f, s) * tame_norm_upper(g, s);
    if (b.empty()) continue;
    // only homogeneous brackets of one degree occur here
    const auto mod = modulus(b);
    for (int k = 0; k < 100; ++k) {
      MultiVector phi;
      for (unsigned q = 0; q + 1 < mod.max_degree(); ++q) {
        ModeState x(J);
        const double decay = (k % 3) * 1.5;
        for (std::size_t j = 0; j < J; ++j) x[j] = rng.complex_normal() * std::pow(j + 1.0, -decay);
        phi.parts.push_back(x);
      }
      const double lhs = pair_norm(multilinear_field(mod, phi), s);
      const double rhs = bound_const * s1_norm(phi, s);
      ++evaluated;
      worst_ratio = std::max(worst_ratio, lhs / rhs);
      // a relative 1e-12 allowance for rounding in both evaluations
      if (lhs > rhs * (1 + 1e-12)) ++violations;
    }
  }
  return {{"7", violations == 0 && evaluated >= 5000,
           std::to_string(evaluated) + " evaluations, " + std::to_string(violations) +
               " violations, max lhs/rhs " + g3(worst_ratio)}};
}

// ---------------------------------------------------------------- 8

std::vector<Verdict> integrator_quality() {
  const std::size_t J = kJ;
  const auto& pot = sweep_potential();
  const IntegratorConfig cfg;
  // linear flow
  double lin = 0.0;
  const auto x = make_initial_state(J, kS, 0.1, kSeed, 0);
  for (double c : {1.0, 64.0}) {
    for (double dt : {0.5, 0.01}) {
      const auto traj = integrate_nlkg(x, pot, c, NonlinearitySpec::none(), dt, 10.0, J, cfg.scheme, 1);
      for (const auto& st : traj.states) {
        for (std::size_t j = 0; j < J; ++j) {
          lin = std::max(lin, std::abs(std::abs(st[j]) - std::abs(x[j])) / std::abs(x[j]));
        }
      }
    }
  }
  // quartic energy drift, T = 100
  std::string edetail;
  double worst_energy = 0.0;
  for (double c : {1.0, 4.0, 16.0, 64.0}) {
    const double dt = cfg.dt_for(c);
    NlkgOptions opt{dt, 100.0, cfg.scheme, cfg.record_every};
    const auto sum = run_nlkg(x, pot, c, quartic(), J, opt, [](double, const ModeState&, double) { return true; });
    worst_energy = std::max(worst_energy, sum.max_relative_energy_drift);
    edetail += (edetail.empty() ? "" : ", ") + std::string("c=") + g3(c) + ": " +
               g3(sum.max_relative_energy_drift);
  }
  // order by dt halving against a fine reference
  const auto y = make_initial_state(J, kS, 0.5, kSeed, 1);
  const double T = 1.0;
  const auto ref = integrate_nlkg(y, pot, 1.0, quartic(), 1e-3, T, J, SplittingScheme::yoshida6, 1000000);
  std::string odetail;
  bool order_ok = true;
  for (auto scheme : {SplittingScheme::strang, SplittingScheme::yoshida4}) {
    const double dt = scheme == SplittingScheme::strang ? 0.02 : 0.1;
    const double p2 = std::pow(2.0, scheme_order(scheme));
    const double e1 =
        max_gap(integrate_nlkg(y, pot, 1.0, quartic(), dt, T, J, scheme, 1000000).states.back(), ref.states.back());
    const double e2 = max_gap(integrate_nlkg(y, pot, 1.0, quartic(), dt / 2, T, J, scheme, 1000000).states.back(),
                              ref.states.back());
    const double ratio = e1 / e2;
    order_ok = order_ok && std::abs(ratio / p2 - 1.0) <= 0.2;
    odetail += (odetail.empty() ? "" : ", ") + std::string(scheme_name(scheme)) + " ratio " +
               fmt("%.2f", ratio) + " vs " + g3(p2);
  }
  return {{"8", lin <= 1e-13 && worst_energy <= 1e-8 && order_ok,
           "linear |psi_j| deviation " + g3(lin) + " (bar 1e-13); quartic H drift " + edetail +
               " (bar 1e-8); " + odetail}};
}

// ---------------------------------------------------------------- 9, 10

const std::vector<double> kRs{0.1, 0.05, 0.025};

struct SweepAtC {
  double c;
  std::vector<RunResult> runs;
  CertSummary cert;
};

SweepAtC sweep(double c, bool with_escape) {
  SweepAtC out{c, {}, certify_all(sweep_potential(), c, kR, select_parameters(kRs.back(), kR, kTau, kJ).N, kJ)};
  std::vector<RunSpec> specs;
  for (std::size_t i = 0; i < kRs.size(); ++i) {
    RunSpec s;
    s.c = c;
    s.R = kRs[i];
    s.K = 1.0;
    s.drift_horizon = theorem_horizon(s.R, kR, 1e4);
    s.escape_horizon = with_escape ? 1e4 : s.drift_horizon;
    s.s = kS;
    s.s1 = 1.0;
    s.seed = kSeed;
    s.index = i;
    specs.push_back(s);
  }
  out.runs = run_batch(sweep_potential(), quartic(), kJ, specs, IntegratorConfig{});
  return out;
}

// C from the largest R; every R must satisfy drift <= factor * C R^3.
struct DriftCheck {
  double C{0.0};
  double worst_factor{0.0};  // max_i (d_i / R_i^3) / C
  double slope{0.0};
  double max_energy{0.0};
  double spread{0.0};  // max_i C_i / min_i C_i, informational
};

DriftCheck drift_check(const std::vector<RunResult>& runs, double C) {
  DriftCheck d{C, 0.0, 0.0, 0.0, 0.0};
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : runs) {
    d.worst_factor = std::max(d.worst_factor, r.drift / std::pow(r.spec.R, 3.0) / C);
    d.max_energy = std::max(d.max_energy, r.energy_drift);
    pts.emplace_back(r.spec.R, r.drift);
  }
  d.slope = fit_scaling(pts).slope;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : runs) {
    lo = std::min(lo, r.drift / std::pow(r.spec.R, 3.0));
    hi = std::max(hi, r.drift / std::pow(r.spec.R, 3.0));
  }
  d.spread = hi / lo;
  return d;
}

const SweepAtC& sweep_c1() {
  static const SweepAtC s = sweep(1.0, true);
  return s;
}

std::string drift_list(const std::vector<RunResult>& runs) {
  std::string out;
  for (const auto& r : runs) out += (out.empty() ? "" : ", ") + ("R=" + g3(r.spec.R) + ": " + g3(r.drift));
  return out;
}

std::vector<Verdict> theorem_sweep() {
  const auto& s = sweep_c1();
  const auto& top = s.runs.front();
  const double C = top.drift / std::pow(top.spec.R, 3.0);
  const auto d = drift_check(s.runs, C);
  std::vector<Verdict> out;
  out.push_back({"9a", s.cert.passed && d.worst_factor <= 3.0 && d.max_energy <= 1e-8,
                 "certified " + std::string(s.cert.passed ? "yes" : "NO") + "; drift " +
                     drift_list(s.runs) + "; C = " + g3(C) + ", worst d/(C R^3) = " +
                     g3(d.worst_factor) + " (bar 3), spread of d/R^3 " + g3(d.spread) +
                     ", drift slope " + fmt("%.2f", d.slope) +
                     ", max H drift " + g3(d.max_energy)});
  std::vector<std::pair<double, double>> pts;
  std::string times;
  bool all_escaped = true, monotone = true;
  for (std::size_t i = 0; i < s.runs.size(); ++i) {
    const auto& r = s.runs[i];
    pts.emplace_back(r.spec.R, r.escape_time);
    all_escaped = all_escaped && r.escaped;
    if (i && r.escape_time < s.runs[i - 1].escape_time) monotone = false;
    times += (times.empty() ? "" : ", ") + ("R=" + g3(r.spec.R) + ": " +
                                            (r.escaped ? g3(r.escape_time) : ">" + g3(r.escape_time)) +
                                            " (max norm/KR " + fmt("%.3f", r.max_norm / r.spec.R) + ")");
  }
  if (!all_escaped) {
    out.push_back({"9b", false,
                   "censored: escape times " + times +
                       "; no slope is measurable when runs survive the 1e4 horizon; monotone " +
                       (monotone ? "yes" : "no")});
  } else {
    const double slope = fit_scaling(pts).slope;
    out.push_back({"9b", slope <= -1.0 && monotone,
                   "escape times " + times + "; slope " + fmt("%.2f", slope) + " (bar <= -1.0)"});
  }
  return out;
}

std::vector<Verdict> uniformity_in_c() {
  const auto& base = sweep_c1();
  const auto& top = base.runs.front();
  const double C1 = top.drift / std::pow(top.spec.R, 3.0);
  bool ok = base.cert.passed;
  std::string detail = "C_1 = " + g3(C1);
  double worst = 0.0, max_energy = 0.0;
  for (double c : {4.0, 16.0, 64.0}) {
    const auto s = sweep(c, false);
    const auto d = drift_check(s.runs, C1);
    worst = std::max(worst, d.worst_factor);
    max_energy = std::max(max_energy, d.max_energy);
    ok = ok && s.cert.passed;
    detail += "; c=" + g3(c) + (s.cert.passed ? "" : " (NOT certified)") + ": " + drift_list(s.runs) +
              ", worst d/(C_1 R^3) " + g3(d.worst_factor);
  }
  worst = std::max(worst, drift_check(base.runs, C1).worst_factor);
  return {{"10", ok && worst <= 10.0 && max_energy <= 1e-8,
           detail + "; overall worst " + g3(worst) + " (bar 10), max H drift " + g3(max_energy)}};
}

// ---------------------------------------------------------------- 11

std::vector<Verdict> corollary() {
  CorollaryConfig cfg;
  cfg.alpha = 1.0;
  cfg.c_list = {4.0, 16.0, 64.0};
  cfg.K = 1.0;
  cfg.r = 1;
  cfg.horizon_cap = 1e4;
  cfg.s = kS;
  cfg.seed = kSeed;
  const auto rows = corollary_experiment(cfg, sweep_potential(), quartic(), kJ, IntegratorConfig{});
  bool ok = true;
  std::string detail;
  for (const auto& r : rows) {
    ok = ok && r.passed && r.energy_drift <= 1e-8;
    detail += (detail.empty() ? "" : "; ") +
              ("c=" + g3(r.c) + ": max norm " + g3(r.max_norm) + " vs bound " + g3(r.bound) +
               " up to t=" + g3(r.horizon) + ", H drift " + g3(r.energy_drift));
  }
  return {{"11", ok, detail}};
}

// ---------------------------------------------------------------- 12

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Verdict> determinism() {
  const fs::path root = fs::path(NLKG_ACCEPT_DIR) / "determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string common =
      R"("seed": 77, "J": 8, "potential": {"s": 2, "M": 0.5, "seed": 5}, "nonlinearity": {"4": 1.0},
         "r": 1, "gamma": 1e-3, "tau": 6, "s": 4)";
  const std::vector<std::pair<std::string, std::string>> scenarios{
      {"freq", R"({"seed": 77, "J": 8, "potential": {"s": 2, "M": 0.5, "seed": 5}, "c_list": [1, 10, 1000]})"},
      {"certify", "{" + common + R"(, "c": 1.37, "N": 3})"},
      {"measure", R"({"seed": 77, "J": 6, "potential": {"s": 2, "M": 0.5, "seed": 5}, "c_interval": 1,
                      "r": 1, "N": 3, "tau": 6, "measure": {"samples": 400, "gamma_list": [0.001, 0.01, 0.1]}})"},
      {"normalform", "{" + common + R"(, "c": 1.37, "R": 0.05, "N": 4, "remainder_samples": 32})"},
      {"simulate", "{" + common + R"(, "c": 4, "R": 0.1, "integrator": {"T": 3}})"},
      {"scaling", "{" + common + R"(, "c_list": [1, 2], "R_list": [0.2, 0.1, 0.05], "experiment": {"horizon_cap": 4}})"},
      {"corollary", "{" + common + R"(, "c_list": [2, 3], "experiment": {"K": 0.5, "horizon_cap": 3}})"},
  };
  std::size_t compared = 0, differing = 0, failures = 0;
  for (const auto& [sub, body] : scenarios) {
    const fs::path scen = root / (sub + ".json");
    std::ofstream(scen) << body;
    std::vector<fs::path> outs;
    for (const char* threads : {"1", "2", "4", "1"}) {
      const fs::path out = root / (sub + "_t" + threads + "_" + std::to_string(outs.size()));
      const std::string cmd = std::string("NLKG_THREADS=") + threads + " " + NLKG_EXE + " " + sub +
                              " --scenario " + scen.string() + " --out " + out.string() + " >/dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) ++failures;
      outs.push_back(out);
    }
    if (!fs::is_directory(outs[0])) continue;
    for (const auto& entry : fs::directory_iterator(outs[0])) {
      const std::string ref = slurp(entry.path());
      for (std::size_t k = 1; k < outs.size(); ++k) {
        ++compared;
        if (slurp(outs[k] / entry.path().filename()) != ref) ++differing;
      }
    }
  }
  return {{"12", failures == 0 && differing == 0 && compared > 0,
           "7 subcommands x 4 runs (threads 1, 2, 4, 1): " + std::to_string(compared) +
               " file comparisons, " + std::to_string(differing) + " differ, " +
               std::to_string(failures) + " failed runs"}};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  std::set<std::string> allowed_red;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--allow-red" && i + 1 < argc) {
      allowed_red.insert(argv[++i]);
    } else {
      only.insert(std::atoi(a.c_str()));
    }
  }
  const std::vector<Criterion> all{
      {1, "frequency correctness", 1.0, frequency_correctness},
      {2, "coordinate round trip", 1.0, round_trip},
      {3, "small-divisor oracle equivalence", 60.0, divisor_oracle},
      {4, "measure scaling", 300.0, measure_scaling},
      {5, "homological residual", 10.0, homological_residual_check},
      {6, "normal-form structure", 60.0, normal_form_structure},
      {7, "tame-bracket inequality", 60.0, tame_bracket},
      {8, "integrator quality", 120.0, integrator_quality},
      {9, "theorem-rate sweep", 1800.0, theorem_sweep},
      {10, "uniformity in c", 1800.0, uniformity_in_c},
      {11, "corollary check", 900.0, corollary},
      {12, "determinism", 600.0, determinism},
  };
  int unexpected = 0, passed = 0, total = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.number)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Verdict> verdicts;
    try {
      verdicts = c.run();
    } catch (const std::exception& e) {
      verdicts = {{std::to_string(c.number), false, std::string("exception: ") + e.what()}};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_s;
    for (auto& v : verdicts) {
      const bool pass = v.pass && in_time;
      ++total;
      passed += pass;
      const bool allowed = !pass && allowed_red.count(v.id);
      if (!pass && !allowed) ++unexpected;
      std::printf("%s criterion %-3s %s: %s [%.1f s, limit %.0f s%s]%s\n", pass ? "PASS" : "FAIL",
                  v.id.c_str(), c.title.c_str(), v.detail.c_str(), secs, c.limit_s,
                  in_time ? "" : ", OVER LIMIT", allowed ? " (known red, see README)" : "");
      std::fflush(stdout);
    }
  }
  std::printf("%d/%d criteria passed\n", passed, total);
  return unexpected == 0 ? 0 : 1;
}
