// Small divisors |omega.k + sigma_1 omega_l + sigma_2 omega_m + n| and their
// certification against gamma / N^tau.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlkg/spectral.hpp"

namespace nlkg {

enum class DivisorFamily { order0, one_tail, two_tail };

const char* family_name(DivisorFamily family);

struct TailTerm {
  unsigned index{0};  // 1-based mode l or m
  int sigma{1};       // +1 or -1
};

struct DivisorQuery {
  std::vector<int> k;           // k_j for modes 1..k.size()
  std::vector<TailTerm> tails;  // at most two, strictly increasing indices
  long n{0};

  DivisorFamily family() const;
  unsigned k_norm() const noexcept;  // sum |k_j|
  // Throws if the query is malformed or refers to modes beyond `available`.
  void validate(std::size_t available) const;
  // True if k + sum sigma e_l vanishes, so the divisor is identically n.
  bool is_trivial() const;
  std::string describe() const;
};

// |sum_j omega_j k_j + sum sigma omega_tail + n|, accumulated in long double
// from the split omega = c^2 + offset.
double divisor_value(const FrequencySet& freqs, const DivisorQuery& q);

struct ScanRanges {
  unsigned N{1};
  unsigned r{1};
  unsigned l_max{0};
  unsigned m_max{0};
};

struct Certificate {
  DivisorFamily family{DivisorFamily::order0};
  double min_divisor{0.0};
  DivisorQuery witness;
  double threshold{0.0};
  bool passed{false};
  ScanRanges ranges;
  std::size_t queries_scanned{0};
  // True when a crude lower bound already exceeds the threshold for every
  // tail index beyond the scanned range.
  bool tail_bound_holds{false};
  std::string tail_exclusion_note;
};

// All k in Z^N with 0 < |k| <= r, in the canonical scan order.
std::vector<std::vector<int>> enumerate_k(unsigned r, unsigned N);

Certificate certify_order0(const FrequencySet& freqs, unsigned r, unsigned N, double gamma,
                           double tau);
// potential_s is the decay exponent of the potential, used only for the note.
Certificate certify_one_tail(const FrequencySet& freqs, unsigned r, unsigned N, double gamma,
                             double tau, unsigned l_max, double potential_s = 2.0);
Certificate certify_two_tail(const FrequencySet& freqs, unsigned r, unsigned N, double gamma,
                             double tau, unsigned l_max, unsigned m_max,
                             double potential_s = 2.0);

// ------------------------------------------------------------- measure

enum class MeasureFamily { order0, one_tail, two_tail, all };
enum class MeasureEstimator {
  hit_count,   // fraction of sampled (c, v') failing certification
  conditional  // sampled v', exact c-measure of the failing set on [n, n+1]
};

MeasureFamily parse_measure_family(const std::string& name);
MeasureEstimator parse_measure_estimator(const std::string& name);
const char* measure_family_name(MeasureFamily family);
const char* measure_estimator_name(MeasureEstimator estimator);

struct MeasureConfig {
  MeasureFamily family{MeasureFamily::all};
  MeasureEstimator estimator{MeasureEstimator::hit_count};
  unsigned c_floor{1};  // c ranges over [c_floor, c_floor + 1]
  std::size_t J{8};
  double s{2.0};
  double M{0.5};
  unsigned r{1};
  unsigned N{4};
  double tau{6.0};
  unsigned l_max{0};  // 0 means J
  unsigned m_max{0};  // 0 means J
  std::vector<double> gamma_list;
  std::size_t samples{10000};
  std::uint64_t seed{0};
};

struct MeasureRow {
  double gamma{0.0};
  double fraction{0.0};
  double std_error{0.0};
};

std::vector<MeasureRow> estimate_resonant_measure(const MeasureConfig& config);

}  // namespace nlkg
