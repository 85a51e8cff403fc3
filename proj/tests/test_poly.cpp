#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nlkg/nonlinearity.hpp"
#include "nlkg/poly.hpp"
#include "nlkg/rng.hpp"
#include "nlkg/tame.hpp"

using namespace nlkg;

namespace {

const cplx I{0.0, 1.0};

Monomial mono(ExponentList j, ExponentList l) { return Monomial::from_exponents(j, l); }

// random polynomial of the given degree; with real_ the conjugate terms are added
PolyHamiltonian random_poly(std::size_t J, unsigned degree, std::size_t terms, RandomStream& rng,
                            bool real_ = false, unsigned cap = 8) {
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

// evaluation with psi and psibar independent
cplx eval_free(const PolyHamiltonian& f, const std::vector<cplx>& z, const std::vector<cplx>& w) {
  cplx acc{};
  for (const auto& [m, c] : f.terms()) {
    cplx p = c;
    for (VarIndex v : m.vars()) p *= var_is_conjugate(v) ? w[var_mode(v) - 1] : z[var_mode(v) - 1];
    acc += p;
  }
  return acc;
}

// Wirtinger derivative by central differences in one independent variable.
cplx fd_partial(const PolyHamiltonian& f, std::vector<cplx> z, std::vector<cplx> w, std::size_t k,
                bool conj_var) {
  const double h = 1e-5;
  auto& x = conj_var ? w : z;
  const cplx x0 = x[k];
  x[k] = x0 + h;
  const cplx fp = eval_free(f, z, w);
  x[k] = x0 - h;
  const cplx fm = eval_free(f, z, w);
  return (fp - fm) / (2.0 * h);
}

double max_gap(const PolyHamiltonian& a, const PolyHamiltonian& b) {
  double worst = 0.0;
  for (const auto& [m, c] : a.terms()) worst = std::max(worst, std::abs(c - b.coefficient(m)));
  for (const auto& [m, c] : b.terms()) worst = std::max(worst, std::abs(c - a.coefficient(m)));
  return worst;
}

FrequencySet test_freqs(std::size_t J, double c = 1.0) {
  std::vector<double> lambda(J);
  for (std::size_t j = 0; j < J; ++j) lambda[j] = static_cast<double>((j + 1) * (j + 1));
  return frequencies(lambda, c);
}

}  // namespace

TEST_CASE("actions commute with H0") {
  const auto f = test_freqs(4);
  const auto H0 = quadratic_hamiltonian(f, 4, 6);
  for (unsigned k = 1; k <= 4; ++k) {
    CHECK(poisson_bracket(action_monomial(k, 4, 6), H0).poly.empty());
  }
}

TEST_CASE("bracket of H0 with psi_k psibar_m, hand expansion") {
  const auto f = test_freqs(2);
  const auto H0 = quadratic_hamiltonian(f, 2, 4);
  PolyHamiltonian g(2, 4);
  const Monomial m = mono({{1, 1}}, {{2, 1}});
  g.add(m, 1.0);
  const auto b = poisson_bracket(H0, g).poly;
  REQUIRE(b.size() == 1);
  // i (omega_1 - omega_2) psi_1 psibar_2
  const cplx expected = I * (std::sqrt(2.0) - std::sqrt(5.0));
  CHECK(std::abs(b.coefficient(m) - expected) < 1e-15);
}

TEST_CASE("bracket matches finite-difference Wirtinger derivatives") {
  RandomStream rng(1, "bracket_fd");
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = random_poly(3, 3, 5, rng);
    const auto g = random_poly(3, 2 + trial % 3, 5, rng);
    const auto b = poisson_bracket(f, g).poly;
    std::vector<cplx> z(3), w(3);
    for (auto& v : z) v = 0.5 * rng.complex_normal();
    for (auto& v : w) v = 0.5 * rng.complex_normal();
    cplx oracle{};
    for (std::size_t k = 0; k < 3; ++k) {
      oracle += I * (fd_partial(f, z, w, k, true) * fd_partial(g, z, w, k, false) -
                     fd_partial(f, z, w, k, false) * fd_partial(g, z, w, k, true));
    }
    CHECK(std::abs(eval_free(b, z, w) - oracle) <= 1e-6 * (1.0 + std::abs(oracle)));
  }
}

TEST_CASE("bracket is bilinear and antisymmetric, Jacobi holds") {
  RandomStream rng(2, "algebra");
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = random_poly(4, 3, 6, rng, true, 12);
    const auto g = random_poly(4, 3, 6, rng, true, 12);
    const auto h = random_poly(4, 4, 6, rng, true, 12);
    CHECK(max_gap(poisson_bracket(f, g).poly, -1.0 * poisson_bracket(g, f).poly) <= 1e-13);
    const auto lhs = poisson_bracket(f + 2.0 * h, g).poly;
    const auto rhs = poisson_bracket(f, g).poly + 2.0 * poisson_bracket(h, g).poly;
    CHECK(max_gap(lhs, rhs) <= 1e-12);
    PolyHamiltonian jac = poisson_bracket(f, poisson_bracket(g, h).poly).poly;
    jac += poisson_bracket(g, poisson_bracket(h, f).poly).poly;
    jac += poisson_bracket(h, poisson_bracket(f, g).poly).poly;
    CHECK(jac.max_abs_coefficient() <= 1e-10);
  }
}

TEST_CASE("bracket above the cap goes to spill") {
  PolyHamiltonian f(2, 4), g(2, 4);
  f.add(mono({{1, 2}}, {{2, 1}}), 2.0);
  g.add(mono({{2, 2}}, {{1, 2}}), 3.0);
  const auto b = poisson_bracket(f, g, 4);  // degree 5 > 4
  CHECK(b.poly.empty());
  CHECK(b.spill > 0.0);
  CHECK(poisson_bracket(f, g, 5).spill == 0.0);
  PolyHamiltonian other(3, 4);
  CHECK_THROWS(poisson_bracket(f, other));
}

TEST_CASE("modulus") {
  PolyHamiltonian f(2, 4);
  const Monomial a = mono({{1, 1}}, {{1, 1}}), b = mono({{1, 2}}, {});
  f.add(a, 2.0);
  f.add(b, -3.0 * I);
  const auto m = modulus(f);
  CHECK(m.coefficient(a) == cplx{2.0});
  CHECK(m.coefficient(b) == cplx{3.0});
  CHECK(max_gap(modulus(m), m) == 0.0);
  RandomStream rng(3, "modulus");
  const auto g = random_poly(3, 3, 10, rng), h = random_poly(3, 3, 10, rng);
  const auto sum = modulus(g + h), parts = modulus(g) + modulus(h);
  for (const auto& [mm, c] : sum.terms()) CHECK(c.real() <= parts.coefficient(mm).real() + 1e-15);
}

TEST_CASE("tame norm bounds") {
  PolyHamiltonian f(1, 4);
  f.add(mono({{1, 1}}, {{1, 1}}), 1.0);
  // linear field psi -> i psi has operator norm 1
  CHECK(tame_norm_upper(f, 4.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(tame_norm_upper(PolyHamiltonian(3, 4), 2.0) == 0.0);
  CHECK(tame_norm_lower(PolyHamiltonian(3, 4), 2.0, 10, 1) == 0.0);
  RandomStream rng(4, "tame");
  for (int trial = 0; trial < 5; ++trial) {
    const auto g = random_poly(4, 3 + trial % 2, 1, rng);
    CHECK(tame_norm_upper(3.5 * g, 2.0) == doctest::Approx(3.5 * tame_norm_upper(g, 2.0)).epsilon(1e-14));
    CHECK(tame_norm_lower(g, 2.0, 200, trial) <= tame_norm_upper(g, 2.0) * (1 + 1e-12));
  }
  CHECK_THROWS(tame_norm_upper(random_poly(3, 3, 3, rng) + random_poly(3, 4, 3, rng), 1.0));
}

TEST_CASE("sampled lower bound converges for a diagonal quadratic") {
  // X(phi)_j = i a_j phi_j: the operator norm is max a_j
  PolyHamiltonian f(4, 4);
  const double a[] = {0.3, 1.7, 0.9, 1.1};
  for (unsigned j = 1; j <= 4; ++j) f.add(mono({{j, 1}}, {{j, 1}}), a[j - 1]);
  const double exact = 1.7;
  CHECK(tame_norm_upper(f, 3.0) == doctest::Approx(exact).epsilon(1e-14));
  const double lower = tame_norm_lower(f, 3.0, 10000, 5);
  CHECK(lower <= exact * (1 + 1e-12));
  CHECK(lower >= 0.95 * exact);
}

TEST_CASE("weighted norm") {
  CHECK(weighted_norm(PolyHamiltonian(2, 4), 2.0, 0.5) == 0.0);
  RandomStream rng(6, "weighted");
  const auto g = random_poly(3, 3, 4, rng);
  CHECK(weighted_norm(g, 2.0, 0.3) == doctest::Approx(tame_norm_upper(g, 2.0) * 0.09).epsilon(1e-14));
  const auto h = g + random_poly(3, 4, 4, rng);
  CHECK(weighted_norm(h, 2.0, 0.2) <= weighted_norm(h, 2.0, 0.4));
}

TEST_CASE("tame bracket inequality on samples") {
  RandomStream rng(7, "bracket_tame");
  const double s = 2.0;
  for (int trial = 0; trial < 20; ++trial) {
    const unsigned df = 2 + trial % 3, dg = 2 + (trial / 3) % 3;
    const auto f = random_poly(4, df, 3, rng), g = random_poly(4, dg, 3, rng);
    const auto b = modulus(poisson_bracket(f, g, 12).poly);
    if (b.empty()) continue;
    const unsigned n = df - 1, m = dg - 1;
    const double bound = (n + m) * tame_norm_upper(f, s) * tame_norm_upper(g, s);
    for (int k = 0; k < 20; ++k) {
      MultiVector phi;
      for (unsigned q = 0; q + 1 < b.max_degree(); ++q) {
        ModeState x(4);
        for (auto& v : x.psi) v = rng.complex_normal();
        phi.parts.push_back(x);
      }
      CHECK(pair_norm(multilinear_field(b, phi), s) <= bound * s1_norm(phi, s) * (1 + 1e-12));
    }
  }
}

TEST_CASE("Lie series terms obey the Cauchy estimate") {
  RandomStream rng(8, "lie_bound");
  const double s = 2.0, R = 1.0, d = 0.5;
  for (int trial = 0; trial < 5; ++trial) {
    const auto chi = 0.05 * random_poly(4, 3, 4, rng, false, 12);
    const auto g = random_poly(4, 3, 4, rng, false, 12);
    const double base = weighted_norm(g, s, R), q = std::exp(1.0) * weighted_norm(chi, s, R) / d;
    PolyHamiltonian gl = g;
    for (int l = 1; l <= 4; ++l) {
      gl = poisson_bracket(chi, gl, 12).poly;
      gl *= 1.0 / l;
      if (gl.empty()) break;
      CHECK(weighted_norm(gl, s, R - d) <= base * std::pow(q, l) * (1 + 1e-12));
    }
  }
}

TEST_CASE("projection splits exactly") {
  ModeState x(std::vector<cplx>{1.0, 2.0, 3.0});
  auto [lo, hi] = project_split(x, 1);
  CHECK(lo[0] == cplx{1.0});
  CHECK(lo[1] == cplx{0.0});
  CHECK(hi[0] == cplx{0.0});
  CHECK(hi[2] == cplx{3.0});
  auto [all, none] = project_split(x, 3);
  CHECK(sobolev_norm(none, 1.0) == 0.0);
  CHECK(all[2] == x[2]);
  const double n2 = std::pow(sobolev_norm(x, 2.0), 2);
  CHECK(n2 == doctest::Approx(std::pow(sobolev_norm(lo, 2.0), 2) + std::pow(sobolev_norm(hi, 2.0), 2)));
  CHECK_THROWS(project_split(x, 0));
  CHECK_THROWS(project_split(x, 4));
}

TEST_CASE("high-degree filter") {
  PolyHamiltonian low(6, 4);
  low.add(mono({{1, 2}}, {{2, 2}}), 1.0);
  auto [k1, d1] = high_degree_filter(low, 3, 2);
  CHECK(k1.size() == 1);
  CHECK(d1.empty());
  PolyHamiltonian cube(6, 4);
  cube.add(mono({{4, 3}}, {}), 1.0);
  auto [k2, d2] = high_degree_filter(cube, 3, 2);
  CHECK(k2.empty());
  CHECK(d2.size() == 1);
}

TEST_CASE("discarded high part is small on the ball") {
  // J = 8, N = 4, s = 4: sup ||X_disc||_s on B_s(R) against weighted_norm / N^{s-1}
  RandomStream rng(9, "tameest");
  const double s = 4.0, R = 0.5;
  const unsigned N = 4;
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = random_poly(8, 4, 40, rng, true);
    auto [kept, disc] = high_degree_filter(f, N, 2);
    if (disc.empty()) continue;
    const double rhs = weighted_norm(f, s, R) / std::pow(N, s - 1.0);
    for (int k = 0; k < 50; ++k) {
      ModeState x(8);
      for (std::size_t j = 0; j < 8; ++j) x[j] = rng.complex_normal() * std::pow(j + 1.0, -s);
      const double n = sobolev_norm(x, s);
      for (auto& v : x.psi) v *= R / n;
      CHECK(pair_norm(vector_field_eval(disc, x), s) <= rhs);
    }
  }
}

TEST_CASE("vector field of H0 and finite-difference gradient") {
  const auto f = test_freqs(3);
  const auto H0 = quadratic_hamiltonian(f, 3, 4);
  ModeState x(std::vector<cplx>{{1, 2}, {0.5, -1}, {0, 3}});
  const auto X = vector_field_eval(H0, x);
  for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(X[j] - I * f.omega[j] * x[j]) < 1e-14);
  CHECK(sobolev_norm(vector_field_eval(PolyHamiltonian(3, 4), x), 0.0) == 0.0);

  RandomStream rng(10, "gradient");
  const auto g = random_poly(3, 4, 8, rng, true);
  ModeState y(3), dir(3);
  for (auto& v : y.psi) v = rng.complex_normal();
  for (auto& v : dir.psi) v = rng.complex_normal();
  auto [dpsi, dpsibar] = gradient_eval(g, y);
  cplx directional{};
  for (std::size_t k = 0; k < 3; ++k) directional += dpsi[k] * dir[k] + dpsibar[k] * std::conj(dir[k]);
  const double h = 1e-6;
  ModeState yp = y, ym = y;
  for (std::size_t k = 0; k < 3; ++k) {
    yp[k] += h * dir[k];
    ym[k] -= h * dir[k];
  }
  const cplx fd = (g.evaluate(yp) - g.evaluate(ym)) / (2 * h);
  CHECK(std::abs(fd - directional) <= 1e-6 * std::abs(directional));
}

TEST_CASE("nonlinearity coefficients against quadrature") {
  auto quad = [](const NonlinearitySpec& nl, const PotentialSpec& pot, double c,
                 const ModeState& x) {
    const auto lambda = eigenvalues(pot);
    auto u = [&](double t) {
      double acc = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) {
        acc += linear_multiplier(lambda[j], c, -0.25) * std::sqrt(2.0) * x[j].real() *
               std::sqrt(2.0 / std::numbers::pi) * std::sin((j + 1.0) * t);
      }
      return nl.potential(acc);
    };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(u, 0.0, std::numbers::pi,
                                                                         10, 1e-14);
  };
  RandomStream rng(11, "taylor");
  for (unsigned p : {4u, 5u}) {
    const auto nl = NonlinearitySpec::make({{p, 0.7}});
    const auto pot = PotentialSpec::make(2.0, 0.5, {0.3, -0.2, 0.1});
    const double c = 1.7;
    const auto split = taylor_nonlinearity(nl, pot, c, 3, p);
    CHECK(split.n1.reality_defect() <= 1e-15);
    for (int trial = 0; trial < 5; ++trial) {
      ModeState x(3);
      for (auto& v : x.psi) v = rng.complex_normal();
      const cplx val = split.n1.evaluate(x);
      const double ref = quad(nl, pot, c, x);
      CHECK(std::abs(val.imag()) <= 1e-12 * std::abs(ref));
      CHECK(val.real() == doctest::Approx(ref).epsilon(1e-10));
    }
  }
  // single mode, a_4 = 1, c = 1, v = 0: (1/4) Lambda^4 int e_1^4 (psi+psibar)^4 / 4
  const auto pot0 = PotentialSpec::make(2.0, 0.5, {0.0});
  const auto single = taylor_nonlinearity(NonlinearitySpec::quartic(1.0), pot0, 1.0, 1, 4);
  const double L4 = 0.5;  // Lambda^4 = c^2/(c^2 + 1)
  const double int_e4 = 3.0 / (2.0 * std::numbers::pi);
  const Monomial m22 = mono({{1, 2}}, {{1, 2}});
  CHECK(single.n1.coefficient(m22).real() == doctest::Approx(L4 * int_e4 * 6.0 / 4.0).epsilon(1e-14));
  CHECK_THROWS(taylor_nonlinearity(NonlinearitySpec::none(), pot0, 1.0, 1, 4));
}

TEST_CASE("spectral nonlinearity matches the polynomial") {
  RandomStream rng(12, "spectral_nl");
  const auto pot = PotentialSpec::make(2.0, 0.5, {0.3, -0.2, 0.1, 0.4});
  const auto nl = NonlinearitySpec::make({{4u, 1.0}, {6u, -0.3}});
  const double c = 2.0;
  const auto split = taylor_nonlinearity(nl, pot, c, 4, 6);
  const SpectralNonlinearity spec(nl, pot, c, 4);
  ModeState x(4);
  for (auto& v : x.psi) v = 0.3 * rng.complex_normal();
  CHECK(spec.energy(x) == doctest::Approx(split.n1.evaluate(x).real()).epsilon(1e-12));
  // kick = exact flow of the nonlinear part (which does not move u)
  const auto X = vector_field_eval(split.n1, x);
  ModeState y = x;
  spec.kick(y, 1e-3);
  for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs((y[j] - x[j]) / 1e-3 - X[j]) <= 1e-10);
}
