#include "nlkg/nonresonance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "nlkg/parallel.hpp"

namespace nlkg {

const char* family_name(DivisorFamily family) {
  switch (family) {
    case DivisorFamily::order0:
      return "order0";
    case DivisorFamily::one_tail:
      return "one_tail";
    case DivisorFamily::two_tail:
      return "two_tail";
  }
  return "?";
}

DivisorFamily DivisorQuery::family() const {
  switch (tails.size()) {
    case 0:
      return DivisorFamily::order0;
    case 1:
      return DivisorFamily::one_tail;
    case 2:
      return DivisorFamily::two_tail;
    default:
      throw std::invalid_argument("divisor query: at most two tail terms");
  }
}

unsigned DivisorQuery::k_norm() const noexcept {
  unsigned acc = 0;
  for (int v : k) acc += static_cast<unsigned>(std::abs(v));
  return acc;
}

void DivisorQuery::validate(std::size_t available) const {
  if (k.size() > available) throw std::out_of_range("divisor query: k longer than frequency set");
  if (tails.size() > 2) throw std::invalid_argument("divisor query: at most two tail terms");
  for (const auto& t : tails) {
    if (t.index < 1 || t.index > available) {
      throw std::out_of_range("divisor query: tail index out of range");
    }
    if (t.sigma != 1 && t.sigma != -1) throw std::invalid_argument("divisor query: sigma must be +-1");
  }
  if (tails.size() == 2 && tails[1].index <= tails[0].index) {
    throw std::invalid_argument("divisor query: two tails need m > l");
  }
  if (!tails.empty() && n != 0) {
    throw std::invalid_argument("divisor query: integer shift only in the order-0 family");
  }
}

bool DivisorQuery::is_trivial() const {
  std::size_t len = k.size();
  for (const auto& t : tails) len = std::max<std::size_t>(len, t.index);
  std::vector<int> total(len, 0);
  std::copy(k.begin(), k.end(), total.begin());
  for (const auto& t : tails) total[t.index - 1] += t.sigma;
  return std::all_of(total.begin(), total.end(), [](int v) { return v == 0; });
}

std::string DivisorQuery::describe() const {
  std::ostringstream os;
  os << "k=(";
  for (std::size_t i = 0; i < k.size(); ++i) os << (i ? "," : "") << k[i];
  os << ")";
  for (const auto& t : tails) os << (t.sigma > 0 ? " +w" : " -w") << t.index;
  if (n != 0) os << " n=" << n;
  return os.str();
}

namespace {

// sum k_j omega_j + sum sigma omega_l without the integer shift
long double signed_sum(const FrequencySet& freqs, const DivisorQuery& q) {
  long alpha = 0;
  long double acc = 0.0L;
  for (std::size_t j = 0; j < q.k.size(); ++j) {
    if (q.k[j] == 0) continue;
    alpha += q.k[j];
    acc += static_cast<long double>(q.k[j]) * freqs.offset[j];
  }
  for (const auto& t : q.tails) {
    alpha += t.sigma;
    acc += static_cast<long double>(t.sigma) * freqs.offset[t.index - 1];
  }
  const long double c = freqs.c;
  return static_cast<long double>(alpha) * c * c + acc;
}

struct Best {
  double value{std::numeric_limits<double>::infinity()};
  DivisorQuery witness;
  std::size_t count{0};
};

// Parallel scan over k; ties resolve to the earliest query in scan order.
template <class ScanOne>
Best scan_all(const std::vector<std::vector<int>>& ks, ScanOne&& scan_one) {
  std::vector<Best> per_k(ks.size());
  parallel_for(ks.size(), [&](std::size_t i) { per_k[i] = scan_one(ks[i]); });
  Best best;
  for (auto& b : per_k) {
    best.count += b.count;
    if (b.value < best.value) {
      best.value = b.value;
      best.witness = std::move(b.witness);
    }
  }
  return best;
}

void offer(Best& best, const DivisorQuery& q, double value) {
  ++best.count;
  if (value < best.value) {
    best.value = value;
    best.witness = q;
  }
}

double omega_lower(double c, double l) { return c * std::sqrt(c * c + l * l - 0.5); }
double omega_upper(double c, double l) { return c * std::sqrt(c * c + l * l + 0.5); }

Certificate finish(DivisorFamily family, Best best, double gamma, double tau, ScanRanges ranges) {
  Certificate cert;
  cert.family = family;
  cert.min_divisor = best.value;
  cert.witness = std::move(best.witness);
  cert.threshold = gamma / std::pow(static_cast<double>(ranges.N), tau);
  cert.passed = cert.min_divisor >= cert.threshold;
  cert.ranges = ranges;
  cert.queries_scanned = best.count;
  return cert;
}

void check_common(const FrequencySet& freqs, unsigned r, unsigned N, double gamma, double tau) {
  if (r < 1) throw std::invalid_argument("certify: r must be >= 1");
  if (N < 1 || N > freqs.size()) throw std::invalid_argument("certify: N out of range");
  if (!(gamma >= 0.0)) throw std::invalid_argument("certify: gamma must be >= 0");
  if (!(tau > 0.0)) throw std::invalid_argument("certify: tau must be positive");
}

}  // namespace

double divisor_value(const FrequencySet& freqs, const DivisorQuery& q) {
  q.validate(freqs.size());
  return static_cast<double>(std::fabs(signed_sum(freqs, q) + static_cast<long double>(q.n)));
}

std::vector<std::vector<int>> enumerate_k(unsigned r, unsigned N) {
  std::vector<std::vector<int>> out;
  std::vector<int> k(N, 0);
  const int rr = static_cast<int>(r);
  // lexicographic over k_1..k_N with values in [-r, r] and sum |k_j| <= r
  auto rec = [&](auto&& self, std::size_t pos, int budget) -> void {
    if (pos == N) {
      if (budget < rr) out.push_back(k);
      return;
    }
    for (int v = -budget; v <= budget; ++v) {
      k[pos] = v;
      self(self, pos + 1, budget - std::abs(v));
    }
    k[pos] = 0;
  };
  rec(rec, 0, rr);
  return out;
}

Certificate certify_order0(const FrequencySet& freqs, unsigned r, unsigned N, double gamma,
                           double tau) {
  check_common(freqs, r, N, gamma, tau);
  const auto ks = enumerate_k(r, N);
  Best best = scan_all(ks, [&](const std::vector<int>& k) {
    Best b;
    DivisorQuery q{k, {}, 0};
    const long double base = signed_sum(freqs, q);
    q.n = -std::llround(base);
    offer(b, q, static_cast<double>(std::fabs(base + static_cast<long double>(q.n))));
    return b;
  });
  Certificate cert = finish(DivisorFamily::order0, std::move(best), gamma, tau, {N, r, 0, 0});
  cert.tail_bound_holds = true;
  cert.tail_exclusion_note =
      "no tail indices; only the nearest integer n is tested, any other n gives a divisor >= 1/2";
  return cert;
}

Certificate certify_one_tail(const FrequencySet& freqs, unsigned r, unsigned N, double gamma,
                             double tau, unsigned l_max, double potential_s) {
  check_common(freqs, r, N, gamma, tau);
  if (l_max < N) throw std::invalid_argument("certify_one_tail: l_max must be >= N");
  if (l_max > freqs.size()) throw std::invalid_argument("certify_one_tail: l_max beyond frequencies");
  const auto ks = enumerate_k(r, N);
  Best best = scan_all(ks, [&](const std::vector<int>& k) {
    Best b;
    DivisorQuery q{k, {TailTerm{}}, 0};
    for (unsigned l = N; l <= l_max; ++l) {
      for (int sigma : {-1, 1}) {
        q.tails[0] = {l, sigma};
        if (q.is_trivial()) continue;
        offer(b, q, static_cast<double>(std::fabs(signed_sum(freqs, q))));
      }
    }
    return b;
  });
  Certificate cert =
      finish(DivisorFamily::one_tail, std::move(best), gamma, tau, {N, r, l_max, 0});

  const double c = freqs.c;
  const double omega_N = freqs.omega[N - 1];
  const double bound = omega_lower(c, l_max + 1.0) - r * omega_N;
  cert.tail_bound_holds = bound >= cert.threshold;
  const double Nd = N;
  const double l_alpha0 = std::sqrt(3.0) * (Nd * Nd + std::pow(Nd, potential_s)) * r;
  const double c_split = std::sqrt(r * freqs.lambda[N - 1]);
  std::ostringstream os;
  os << "scan covers N <= l <= " << l_max << "; for l > l_max the bound omega_l - r omega_N >= "
     << bound << (cert.tail_bound_holds ? " clears" : " does not clear") << " the threshold. "
     << "Case alpha=0: small only if l^2 <= 3(N^2+N^s)^2 r^2, i.e. l <= " << l_alpha0
     << ", reduced to order0 with N'=" << l_alpha0 << ", r'=" << r + 1 << ". "
     << "Case alpha!=0, c <= sqrt(r lambda_N)=" << c_split << ": small only for l^2 < r N^2"
     << " (order0 with N'=sqrt(r)N). Case alpha>0, c > sqrt(r lambda_N): resonances only near "
     << "c^2 = lambda_l/(alpha(alpha+2)). Case alpha<0, c > sqrt(r lambda_N): order0 with "
     << "N'=sqrt(r)N, r'=r+1. Current regime: c=" << c
     << (c <= c_split ? " <= " : " > ") << "sqrt(r lambda_N).";
  cert.tail_exclusion_note = os.str();
  return cert;
}

Certificate certify_two_tail(const FrequencySet& freqs, unsigned r, unsigned N, double gamma,
                             double tau, unsigned l_max, unsigned m_max, double potential_s) {
  check_common(freqs, r, N, gamma, tau);
  if (l_max < N || m_max < l_max) {
    throw std::invalid_argument("certify_two_tail: need m_max >= l_max >= N");
  }
  if (m_max > freqs.size()) throw std::invalid_argument("certify_two_tail: m_max beyond frequencies");
  const auto ks = enumerate_k(r, N);
  Best best = scan_all(ks, [&](const std::vector<int>& k) {
    Best b;
    DivisorQuery q{k, {TailTerm{}, TailTerm{}}, 0};
    for (unsigned l = N; l <= l_max; ++l) {
      for (unsigned m = l + 1; m <= m_max; ++m) {
        for (int s1 : {-1, 1}) {
          for (int s2 : {-1, 1}) {
            q.tails[0] = {l, s1};
            q.tails[1] = {m, s2};
            offer(b, q, static_cast<double>(std::fabs(signed_sum(freqs, q))));
          }
        }
      }
    }
    return b;
  });
  Certificate cert =
      finish(DivisorFamily::two_tail, std::move(best), gamma, tau, {N, r, l_max, m_max});

  // Beyond the scan, |omega_m - omega_l| is bounded below by consecutive gaps.
  const double c = freqs.c;
  const double r_omega = r * freqs.omega[N - 1];
  const double gap_l = omega_lower(c, l_max + 2.0) - omega_upper(c, l_max + 1.0);
  const double gap_m = omega_lower(c, m_max + 1.0) - omega_upper(c, l_max);
  const double same_sign = omega_lower(c, N) + omega_lower(c, m_max + 1.0) - r_omega;
  const double bound = std::min({gap_l - r_omega, gap_m - r_omega, same_sign});
  cert.tail_bound_holds = bound >= cert.threshold;
  const double delta = 3.5;
  std::ostringstream os;
  os << "scan covers N <= l <= " << l_max << " < m <= " << m_max
     << "; gap bound beyond the scan = " << bound
     << (cert.tail_bound_holds ? " clears" : " does not clear") << " the threshold. "
     << "Fix delta > 3 (here " << delta << "): for m <= N^delta = "
     << std::pow(static_cast<double>(N), delta)
     << " the divisor reduces to the order0 and one_tail families; for l, m > N^delta the "
     << "cases c > lambda_m (reduction to order0 with N' = 2 C N^tau / gamma, r' = r+2) and "
     << "lambda_l^{1/6} <= c <~ lambda_l^{1/2} (divisor bounded away from zero) apply; "
     << "for c < lambda_l^{1/6} differences omega_m - omega_l accumulate at integer multiples "
     << "of c and no lower bound is established. Potential decay s=" << potential_s << ".";
  cert.tail_exclusion_note = os.str();
  return cert;
}

}  // namespace nlkg
