#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nlkg/nonresonance.hpp"
#include "nlkg/parallel.hpp"
#include "nlkg/rng.hpp"

namespace nlkg {

MeasureFamily parse_measure_family(const std::string& name) {
  if (name == "order0") return MeasureFamily::order0;
  if (name == "one_tail") return MeasureFamily::one_tail;
  if (name == "two_tail") return MeasureFamily::two_tail;
  if (name == "all") return MeasureFamily::all;
  throw std::invalid_argument("unknown divisor family '" + name + "'");
}

MeasureEstimator parse_measure_estimator(const std::string& name) {
  if (name == "hit_count") return MeasureEstimator::hit_count;
  if (name == "conditional") return MeasureEstimator::conditional;
  throw std::invalid_argument("unknown measure estimator '" + name + "'");
}

const char* measure_family_name(MeasureFamily family) {
  switch (family) {
    case MeasureFamily::order0:
      return "order0";
    case MeasureFamily::one_tail:
      return "one_tail";
    case MeasureFamily::two_tail:
      return "two_tail";
    case MeasureFamily::all:
      return "all";
  }
  return "?";
}

const char* measure_estimator_name(MeasureEstimator estimator) {
  return estimator == MeasureEstimator::hit_count ? "hit_count" : "conditional";
}

namespace {

bool uses(MeasureFamily selected, MeasureFamily family) {
  return selected == MeasureFamily::all || selected == family;
}

// p(c) = sum_j coef_j omega_j(c) + n as a function of c with lambda fixed.
struct DivisorCurve {
  std::vector<std::pair<std::size_t, int>> coef;  // (index, coefficient)
  long alpha{0};
  long n{0};

  double value(const std::vector<double>& lambda, double c) const {
    const double c2 = c * c;
    double acc = static_cast<double>(alpha) * c2 + static_cast<double>(n);
    for (const auto& [j, k] : coef) {
      const double lam = lambda[j];
      acc += k * lam / (1.0 + std::sqrt(1.0 + lam / c2));
    }
    return acc;
  }

  // Bound on |p'| over [.., c]; omega_j' = (2c^2 + lambda)/sqrt(c^2 + lambda) increases.
  double lipschitz(const std::vector<double>& lambda, double c) const {
    double acc = 0.0;
    for (const auto& [j, k] : coef) {
      acc += std::abs(k) * (2.0 * c * c + lambda[j]) / std::sqrt(c * c + lambda[j]);
    }
    return acc;
  }
};

using Interval = std::pair<double, double>;

// Collects {c in [a, b] : |p(c)| < eps} by bisection with Lipschitz pruning;
// cells below the width tolerance are resolved by linear interpolation.
void resonant_cells(const DivisorCurve& p, const std::vector<double>& lambda, double a, double b,
                    double pa, double pb, double eps, double tol, int depth,
                    std::vector<Interval>& out) {
  const double K = p.lipschitz(lambda, b) * (b - a);
  const double fa = std::abs(pa), fb = std::abs(pb);
  if ((fa + fb - K) / 2.0 >= eps) return;
  if ((fa + fb + K) / 2.0 <= eps) {
    out.emplace_back(a, b);
    return;
  }
  if (b - a <= tol || depth > 60) {
    // |pa + t (pb - pa)| < eps for t in an interval of [0, 1]
    const double d = pb - pa;
    if (d == 0.0) {
      if (fa < eps) out.emplace_back(a, b);
      return;
    }
    double t0 = (-eps - pa) / d, t1 = (eps - pa) / d;
    if (t0 > t1) std::swap(t0, t1);
    t0 = std::max(t0, 0.0);
    t1 = std::min(t1, 1.0);
    if (t1 > t0) out.emplace_back(a + t0 * (b - a), a + t1 * (b - a));
    return;
  }
  const double mid = 0.5 * (a + b);
  const double pm = p.value(lambda, mid);
  resonant_cells(p, lambda, a, mid, pa, pm, eps, tol, depth + 1, out);
  resonant_cells(p, lambda, mid, b, pm, pb, eps, tol, depth + 1, out);
}

double union_length(std::vector<Interval>& cells) {
  if (cells.empty()) return 0.0;
  std::sort(cells.begin(), cells.end());
  double total = 0.0;
  double lo = cells.front().first, hi = cells.front().second;
  for (const auto& [a, b] : cells) {
    if (a > hi) {
      total += hi - lo;
      lo = a;
      hi = b;
    } else {
      hi = std::max(hi, b);
    }
  }
  return total + (hi - lo);
}

std::vector<DivisorCurve> build_curves(const MeasureConfig& cfg, unsigned l_max, unsigned m_max,
                                       const std::vector<double>& lambda, double c_lo,
                                       double c_hi) {
  std::vector<DivisorCurve> curves;
  const auto ks = enumerate_k(cfg.r, cfg.N);
  auto with_tails = [&](const std::vector<int>& k, std::vector<TailTerm> tails) {
    std::vector<int> total(std::max<std::size_t>(k.size(), m_max), 0);
    std::copy(k.begin(), k.end(), total.begin());
    for (const auto& t : tails) total[t.index - 1] += t.sigma;
    DivisorCurve curve;
    for (std::size_t j = 0; j < total.size(); ++j) {
      if (total[j] != 0) {
        curve.coef.emplace_back(j, total[j]);
        curve.alpha += total[j];
      }
    }
    return curve;
  };
  for (const auto& k : ks) {
    if (uses(cfg.family, MeasureFamily::order0)) {
      DivisorCurve base = with_tails(k, {});
      // omega_j increases with c, so omega.k over [c_lo, c_hi] lies in [lo, hi].
      double lo = 0.0, hi = 0.0;
      for (const auto& [j, kj] : base.coef) {
        const double w_lo = c_lo * std::sqrt(c_lo * c_lo + lambda[j]);
        const double w_hi = c_hi * std::sqrt(c_hi * c_hi + lambda[j]);
        lo += kj > 0 ? kj * w_lo : kj * w_hi;
        hi += kj > 0 ? kj * w_hi : kj * w_lo;
      }
      for (long n = static_cast<long>(std::ceil(-hi - 1.0)); n <= static_cast<long>(std::floor(-lo + 1.0));
           ++n) {
        DivisorCurve curve = base;
        curve.n = n;
        curves.push_back(std::move(curve));
      }
    }
    if (uses(cfg.family, MeasureFamily::one_tail)) {
      for (unsigned l = cfg.N; l <= l_max; ++l) {
        for (int sigma : {-1, 1}) {
          DivisorQuery q{k, {{l, sigma}}, 0};
          if (q.is_trivial()) continue;
          curves.push_back(with_tails(k, q.tails));
        }
      }
    }
    if (uses(cfg.family, MeasureFamily::two_tail)) {
      for (unsigned l = cfg.N; l <= l_max; ++l) {
        for (unsigned m = l + 1; m <= m_max; ++m) {
          for (int s1 : {-1, 1}) {
            for (int s2 : {-1, 1}) curves.push_back(with_tails(k, {{l, s1}, {m, s2}}));
          }
        }
      }
    }
  }
  return curves;
}

double min_divisor(const MeasureConfig& cfg, const FrequencySet& freqs, unsigned l_max,
                   unsigned m_max) {
  double best = std::numeric_limits<double>::infinity();
  if (uses(cfg.family, MeasureFamily::order0)) {
    best = std::min(best, certify_order0(freqs, cfg.r, cfg.N, 0.0, cfg.tau).min_divisor);
  }
  if (uses(cfg.family, MeasureFamily::one_tail)) {
    best = std::min(best,
                    certify_one_tail(freqs, cfg.r, cfg.N, 0.0, cfg.tau, l_max, cfg.s).min_divisor);
  }
  if (uses(cfg.family, MeasureFamily::two_tail)) {
    best = std::min(best, certify_two_tail(freqs, cfg.r, cfg.N, 0.0, cfg.tau, l_max, m_max, cfg.s)
                              .min_divisor);
  }
  return best;
}

}  // namespace

std::vector<MeasureRow> estimate_resonant_measure(const MeasureConfig& cfg) {
  if (cfg.gamma_list.empty()) throw std::invalid_argument("measure: empty gamma list");
  if (cfg.samples < 100) throw std::invalid_argument("measure: at least 100 samples required");
  if (cfg.N < 1 || cfg.N > cfg.J) throw std::invalid_argument("measure: N must lie in [1, J]");
  if (cfg.c_floor < 1) throw std::invalid_argument("measure: c interval must start at >= 1");
  for (double g : cfg.gamma_list) {
    if (!(g >= 0.0)) throw std::invalid_argument("measure: gamma values must be >= 0");
  }
  const unsigned l_max = cfg.l_max ? cfg.l_max : static_cast<unsigned>(cfg.J);
  const unsigned m_max = cfg.m_max ? cfg.m_max : static_cast<unsigned>(cfg.J);
  if (l_max < cfg.N || m_max < l_max) throw std::invalid_argument("measure: need m_max >= l_max >= N");
  const std::size_t modes = std::max<std::size_t>({cfg.J, l_max, m_max});
  const double scale = std::pow(static_cast<double>(cfg.N), cfg.tau);
  const std::size_t G = cfg.gamma_list.size();
  const double c_lo = cfg.c_floor, c_hi = cfg.c_floor + 1.0;
  const RandomStream base = seeded_rng(cfg.seed, "measure");

  // per-sample resonant fraction for every gamma
  std::vector<double> values(cfg.samples * G, 0.0);
  parallel_for(cfg.samples, [&](std::size_t i) {
    RandomStream rng = base.substream(i);
    const double c = cfg.estimator == MeasureEstimator::hit_count ? rng.uniform(c_lo, c_hi) : c_lo;
    std::vector<double> vprime(modes);
    for (auto& v : vprime) v = rng.uniform(-0.5, 0.5);
    const PotentialSpec pot = PotentialSpec::make(cfg.s, cfg.M, std::move(vprime));
    const auto lambda = eigenvalues(pot);
    double* row = &values[i * G];
    if (cfg.estimator == MeasureEstimator::hit_count) {
      const double d = min_divisor(cfg, frequencies(lambda, c), l_max, m_max);
      for (std::size_t g = 0; g < G; ++g) row[g] = d < cfg.gamma_list[g] / scale ? 1.0 : 0.0;
      return;
    }
    const auto curves = build_curves(cfg, l_max, m_max, lambda, c_lo, c_hi);
    for (std::size_t g = 0; g < G; ++g) {
      const double eps = cfg.gamma_list[g] / scale;
      if (eps <= 0.0) continue;
      std::vector<Interval> cells;
      for (const auto& curve : curves) {
        const double tol = 1e-4 * eps / std::max(1.0, curve.lipschitz(lambda, c_hi));
        resonant_cells(curve, lambda, c_lo, c_hi, curve.value(lambda, c_lo),
                       curve.value(lambda, c_hi), eps, tol, 0, cells);
      }
      row[g] = union_length(cells) / (c_hi - c_lo);
    }
  });

  std::vector<MeasureRow> table(G);
  const double n = static_cast<double>(cfg.samples);
  for (std::size_t g = 0; g < G; ++g) {
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < cfg.samples; ++i) {
      const double v = values[i * G + g];
      sum += v;
      sum2 += v * v;
    }
    const double mean = sum / n;
    const double var = std::max(0.0, sum2 / n - mean * mean);
    table[g] = {cfg.gamma_list[g], mean, std::sqrt(var / (n - 1.0))};
  }
  return table;
}

}  // namespace nlkg
