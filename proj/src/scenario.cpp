#include "nlkg/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "nlkg/errors.hpp"
#include "nlkg/rng.hpp"

namespace nlkg {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("scenario field '" + field + "': " + what);
}

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(where.empty() ? "<root>" : where, "must be an object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      fail(where.empty() ? item.key() : where + "." + item.key(), "unknown key");
    }
  }
}

std::string path(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

double get_number(const json& obj, const std::string& where, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_number()) fail(path(where, key), "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path(where, key), "must be finite");
  return x;
}

double number_or(const json& obj, const std::string& where, const std::string& key, double fallback) {
  return obj.contains(key) ? get_number(obj, where, key) : fallback;
}

std::uint64_t get_unsigned(const json& obj, const std::string& where, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0)) {
    fail(path(where, key), "must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::vector<double> get_number_list(const json& obj, const std::string& where,
                                    const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_array() || v.empty()) fail(path(where, key), "must be a nonempty array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number() || !std::isfinite(x.get<double>())) {
      fail(path(where, key), "must contain finite numbers only");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

template <class T>
T wrap(const std::string& field, T (*fn)(const std::string&), const std::string& text) {
  try {
    return fn(text);
  } catch (const std::invalid_argument& e) {
    fail(field, e.what());
  }
}

PotentialSpec parse_potential(const json& p, std::size_t J) {
  reject_unknown(p, "potential", {"s", "M", "vprime", "J", "seed"});
  if (!p.contains("s")) fail("potential.s", "missing");
  if (!p.contains("M")) fail("potential.M", "missing");
  const double s = get_number(p, "potential", "s");
  const double M = get_number(p, "potential", "M");
  std::vector<double> vprime;
  if (p.contains("vprime")) {
    if (p.contains("seed") || p.contains("J")) fail("potential", "give either vprime or J and seed");
    vprime = get_number_list(p, "potential", "vprime");
  } else {
    if (!p.contains("seed")) fail("potential.seed", "missing (or give vprime)");
    const std::size_t n = p.contains("J") ? get_unsigned(p, "potential", "J") : J;
    RandomStream rng = seeded_rng(get_unsigned(p, "potential", "seed"), "potential");
    vprime.resize(n);
    for (auto& v : vprime) v = rng.uniform(-0.5, 0.5);
  }
  if (vprime.size() < J) fail("potential", "fewer coefficients than J");
  vprime.resize(J);
  try {
    return PotentialSpec::make(s, M, std::move(vprime));
  } catch (const std::invalid_argument& e) {
    fail("potential", e.what());
  }
}

}  // namespace

std::string hash_hex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

Scenario parse_scenario(const json& doc) {
  reject_unknown(doc, "",
                 {"seed", "potential", "J", "c", "c_list", "c_interval", "nonlinearity", "r",
                  "gamma", "tau", "s", "R", "R_list", "N", "l_max", "m_max", "measure",
                  "integrator", "experiment", "remainder_samples"});
  Scenario sc;
  sc.source = doc;
  sc.hash = fnv1a64(doc.dump());
  if (doc.contains("seed")) sc.seed = get_unsigned(doc, "", "seed");

  if (!doc.contains("J")) fail("J", "missing");
  sc.J = get_unsigned(doc, "", "J");
  if (sc.J < 1 || sc.J > Monomial::kMaxMode) fail("J", "must lie in [1, 127]");

  if (!doc.contains("potential")) fail("potential", "missing");
  sc.potential = parse_potential(doc.at("potential"), sc.J);

  if (doc.contains("c") && doc.contains("c_list")) fail("c", "give either c or c_list");
  if (doc.contains("c")) sc.c_list = {get_number(doc, "", "c")};
  if (doc.contains("c_list")) sc.c_list = get_number_list(doc, "", "c_list");
  for (double c : sc.c_list) {
    if (!(c >= 1.0)) fail(doc.contains("c") ? "c" : "c_list", "c must be >= 1");
  }
  if (doc.contains("c_interval")) {
    const auto n = get_unsigned(doc, "", "c_interval");
    if (n < 1) fail("c_interval", "interval [n, n+1] needs n >= 1");
    sc.c_interval = static_cast<unsigned>(n);
  }

  if (doc.contains("nonlinearity")) {
    const json& nl = doc.at("nonlinearity");
    if (!nl.is_object()) fail("nonlinearity", "must be an object {\"p\": a_p}");
    std::map<unsigned, double> coeffs;
    for (const auto& item : nl.items()) {
      const std::string field = "nonlinearity." + item.key();
      unsigned p = 0;
      try {
        std::size_t used = 0;
        p = static_cast<unsigned>(std::stoul(item.key(), &used));
        if (used != item.key().size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        fail(field, "key must be the integer power p");
      }
      if (!item.value().is_number()) fail(field, "must be a number");
      coeffs[p] = item.value().get<double>();
    }
    try {
      sc.nonlinearity = NonlinearitySpec::make(std::move(coeffs));
    } catch (const std::invalid_argument& e) {
      fail("nonlinearity", e.what());
    }
  }

  if (doc.contains("r")) {
    const auto r = get_unsigned(doc, "", "r");
    if (r < 1 || r > 8) fail("r", "must lie in [1, 8]");
    sc.r = static_cast<unsigned>(r);
  }
  sc.gamma = number_or(doc, "", "gamma", sc.gamma);
  if (sc.gamma < 0.0) fail("gamma", "must be >= 0");
  sc.tau = number_or(doc, "", "tau", sc.tau);
  if (!(sc.tau > 0.0)) fail("tau", "must be positive");
  sc.s = number_or(doc, "", "s", sc.s);
  if (!(sc.s >= 0.0)) fail("s", "must be >= 0");

  if (doc.contains("R") && doc.contains("R_list")) fail("R", "give either R or R_list");
  if (doc.contains("R")) sc.R_list = {get_number(doc, "", "R")};
  if (doc.contains("R_list")) sc.R_list = get_number_list(doc, "", "R_list");
  for (double R : sc.R_list) {
    if (!(R > 0.0 && R < 1.0)) fail(doc.contains("R") ? "R" : "R_list", "R must lie in (0, 1)");
  }

  if (doc.contains("N")) {
    const auto N = get_unsigned(doc, "", "N");
    if (N < 1 || N > sc.J) fail("N", "must lie in [1, J]");
    sc.N = static_cast<unsigned>(N);
  }
  if (doc.contains("l_max")) sc.l_max = static_cast<unsigned>(get_unsigned(doc, "", "l_max"));
  if (doc.contains("m_max")) sc.m_max = static_cast<unsigned>(get_unsigned(doc, "", "m_max"));
  if (sc.l_max > sc.J) fail("l_max", "must be <= J");
  if (sc.m_max > sc.J) fail("m_max", "must be <= J");

  if (doc.contains("measure")) {
    const json& m = doc.at("measure");
    reject_unknown(m, "measure", {"family", "estimator", "samples", "gamma_list"});
    if (m.contains("family")) {
      if (!m.at("family").is_string()) fail("measure.family", "must be a string");
      sc.measure.family =
          wrap<MeasureFamily>("measure.family", parse_measure_family, m.at("family").get<std::string>());
    }
    if (m.contains("estimator")) {
      if (!m.at("estimator").is_string()) fail("measure.estimator", "must be a string");
      sc.measure.estimator = wrap<MeasureEstimator>("measure.estimator", parse_measure_estimator,
                                                    m.at("estimator").get<std::string>());
    }
    if (m.contains("samples")) sc.measure.samples = get_unsigned(m, "measure", "samples");
    if (sc.measure.samples < 100) fail("measure.samples", "must be >= 100");
    if (m.contains("gamma_list")) sc.measure.gamma_list = get_number_list(m, "measure", "gamma_list");
    for (double g : sc.measure.gamma_list) {
      if (!(g >= 0.0)) fail("measure.gamma_list", "values must be >= 0");
    }
  }

  if (doc.contains("integrator")) {
    const json& in = doc.at("integrator");
    reject_unknown(in, "integrator", {"scheme", "dt", "dt_scaling", "T", "record_interval"});
    if (in.contains("scheme")) {
      if (!in.at("scheme").is_string()) fail("integrator.scheme", "must be a string");
      sc.integrator.scheme =
          wrap<SplittingScheme>("integrator.scheme", parse_scheme, in.at("scheme").get<std::string>());
    }
    sc.integrator.dt = number_or(in, "integrator", "dt", sc.integrator.dt);
    if (!(sc.integrator.dt > 0.0)) fail("integrator.dt", "must be positive");
    sc.integrator.dt_scaling = number_or(in, "integrator", "dt_scaling", sc.integrator.dt_scaling);
    if (sc.integrator.dt_scaling < 0.0) fail("integrator.dt_scaling", "must be >= 0");
    if (in.contains("record_interval")) {
      sc.integrator.record_every = get_unsigned(in, "integrator", "record_interval");
      if (sc.integrator.record_every < 1) fail("integrator.record_interval", "must be >= 1");
    }
    sc.T = number_or(in, "integrator", "T", sc.T);
    if (sc.T < 0.0) fail("integrator.T", "must be >= 0");
  }

  if (doc.contains("experiment")) {
    const json& e = doc.at("experiment");
    reject_unknown(e, "experiment", {"K", "horizon_cap", "alpha", "r1", "s1"});
    sc.experiment.K = number_or(e, "experiment", "K", sc.experiment.K);
    if (!(sc.experiment.K > 0.0)) fail("experiment.K", "must be positive");
    sc.experiment.horizon_cap = number_or(e, "experiment", "horizon_cap", sc.experiment.horizon_cap);
    if (!(sc.experiment.horizon_cap > 0.0)) fail("experiment.horizon_cap", "must be positive");
    sc.experiment.alpha = number_or(e, "experiment", "alpha", sc.experiment.alpha);
    if (!(sc.experiment.alpha > 0.0)) fail("experiment.alpha", "must be positive");
    if (e.contains("r1")) sc.experiment.r1 = static_cast<unsigned>(get_unsigned(e, "experiment", "r1"));
    if (sc.experiment.r1 > sc.r) fail("experiment.r1", "must be <= r");
    sc.experiment.s1 = number_or(e, "experiment", "s1", sc.experiment.s1);
    if (!(sc.experiment.s1 >= 0.0)) fail("experiment.s1", "must be >= 0");
  }
  if (doc.contains("remainder_samples")) {
    const auto n = get_unsigned(doc, "", "remainder_samples");
    if (n < 1 || n > 1000000) fail("remainder_samples", "must lie in [1, 1e6]");
    sc.remainder_samples = static_cast<int>(n);
  }
  return sc;
}

Scenario load_scenario(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open scenario file '" + file + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario '" + file + "' is not valid JSON: " + e.what());
  }
  return parse_scenario(doc);
}

// ------------------------------------------------------------ value types

json to_json(const PotentialSpec& pot) {
  return json{{"s", pot.s}, {"M", pot.M}, {"vprime", pot.vprime}};
}

PotentialSpec potential_from_json(const json& j) {
  reject_unknown(j, "potential", {"s", "M", "vprime"});
  if (!j.contains("vprime")) fail("potential.vprime", "missing");
  const auto vprime = get_number_list(j, "potential", "vprime");
  return parse_potential(j, vprime.size());
}

json to_json(const ModeState& state) {
  json out = json::array();
  for (const auto& v : state.psi) out.push_back({v.real(), v.imag()});
  return out;
}

ModeState state_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("mode state must be an array of [re, im] pairs");
  ModeState s(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) {
    const json& p = j[k];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw ConfigError("mode state entry " + std::to_string(k) + " must be [re, im]");
    }
    s[k] = {p[0].get<double>(), p[1].get<double>()};
  }
  return s;
}

json to_json(const PolyHamiltonian& f) {
  json out = json::array();
  for (const auto& [m, c] : f.terms()) {
    json jl = json::array(), ll = json::array();
    for (const auto& [mode, e] : m.psi_exponents()) jl.push_back({mode, e});
    for (const auto& [mode, e] : m.psibar_exponents()) ll.push_back({mode, e});
    out.push_back({{"j", jl}, {"l", ll}, {"re", c.real()}, {"im", c.imag()}});
  }
  return out;
}

PolyHamiltonian poly_from_json(const json& j, std::size_t mode_cutoff, unsigned degree_cap) {
  if (!j.is_array()) throw ConfigError("polynomial must be an array of terms");
  PolyHamiltonian f(mode_cutoff, degree_cap);
  auto exps = [](const json& list) {
    ExponentList out;
    if (!list.is_array()) throw ConfigError("polynomial exponents must be [[mode, exp], ...]");
    for (const auto& p : list) {
      if (!p.is_array() || p.size() != 2) throw ConfigError("polynomial exponent must be [mode, exp]");
      out.emplace_back(p[0].get<unsigned>(), p[1].get<unsigned>());
    }
    return out;
  };
  for (const auto& term : j) {
    reject_unknown(term, "term", {"j", "l", "re", "im"});
    const Monomial m = Monomial::from_exponents(exps(term.at("j")), exps(term.at("l")));
    f.add(m, {term.at("re").get<double>(), term.at("im").get<double>()});
  }
  return f;
}

json to_json(const DivisorQuery& q) {
  json tails = json::array();
  for (const auto& t : q.tails) tails.push_back({{"index", t.index}, {"sigma", t.sigma}});
  return json{{"k", q.k}, {"tails", tails}, {"n", q.n}, {"text", q.describe()}};
}

json to_json(const Certificate& cert) {
  return json{{"family", family_name(cert.family)},
              {"min_divisor", cert.min_divisor},
              {"witness", to_json(cert.witness)},
              {"threshold", cert.threshold},
              {"passed", cert.passed},
              {"ranges",
               {{"N", cert.ranges.N},
                {"r", cert.ranges.r},
                {"l_max", cert.ranges.l_max},
                {"m_max", cert.ranges.m_max}}},
              {"queries_scanned", cert.queries_scanned},
              {"tail_bound_holds", cert.tail_bound_holds},
              {"tail_exclusion_note", cert.tail_exclusion_note}};
}

}  // namespace nlkg
