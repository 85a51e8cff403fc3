// Scenario files (JSON) and serialization of the library's value types.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlkg/experiments.hpp"
#include "nlkg/nonlinearity.hpp"
#include "nlkg/nonresonance.hpp"
#include "nlkg/poly.hpp"

namespace nlkg {

using json = nlohmann::json;

struct MeasureSettings {
  MeasureFamily family{MeasureFamily::all};
  MeasureEstimator estimator{MeasureEstimator::conditional};
  std::size_t samples{10000};
  std::vector<double> gamma_list;
};

struct ExperimentSettings {
  double K{1.0};
  double horizon_cap{1e4};
  double alpha{1.0};
  unsigned r1{1};
  double s1{1.0};
};

struct Scenario {
  json source;  // as read, used for the hash
  std::uint64_t hash{0};
  std::uint64_t seed{0};

  PotentialSpec potential;
  std::size_t J{8};
  std::vector<double> c_list;  // "c" or "c_list"
  std::optional<unsigned> c_interval;
  NonlinearitySpec nonlinearity;
  unsigned r{1};
  double gamma{0.0};
  double tau{6.0};
  double s{4.0};
  std::vector<double> R_list;  // "R" or "R_list"
  std::optional<unsigned> N;    // derived from R when absent
  unsigned l_max{0};
  unsigned m_max{0};
  MeasureSettings measure;
  IntegratorConfig integrator;
  double T{0.0};  // integrator.T, the simulate horizon
  ExperimentSettings experiment;
  int remainder_samples{256};

  double c() const { return c_list.at(0); }
  double R() const { return R_list.at(0); }
};

// Parses and validates; unknown keys and out-of-range values throw ConfigError
// naming the offending field.
Scenario parse_scenario(const json& doc);
Scenario load_scenario(const std::string& path);

// FNV-1a of the canonical (sorted-key) dump, as 16 hex digits.
std::string hash_hex(std::uint64_t hash);

json to_json(const PotentialSpec& pot);
PotentialSpec potential_from_json(const json& j);
json to_json(const ModeState& state);
ModeState state_from_json(const json& j);
json to_json(const PolyHamiltonian& f);
PolyHamiltonian poly_from_json(const json& j, std::size_t mode_cutoff, unsigned degree_cap);
json to_json(const DivisorQuery& q);
json to_json(const Certificate& cert);

}  // namespace nlkg
