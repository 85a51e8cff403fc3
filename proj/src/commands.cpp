#include "nlkg/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nlkg/diagnostics.hpp"
#include "nlkg/errors.hpp"
#include "nlkg/experiments.hpp"
#include "nlkg/nonlinearity.hpp"
#include "nlkg/nonresonance.hpp"
#include "nlkg/normal_form.hpp"
#include "nlkg/tame.hpp"

namespace nlkg {

namespace fs = std::filesystem;

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// RFC 4180 rows; every row ends with scenario_hash and seed.
class CsvWriter {
 public:
  CsvWriter(const std::string& file, const Scenario& sc, std::vector<std::string> header)
      : out_(file, std::ios::binary), tail_("," + hash_hex(sc.hash) + "," + std::to_string(sc.seed)) {
    if (!out_) throw std::runtime_error("cannot write '" + file + "'");
    header.push_back("scenario_hash");
    header.push_back("seed");
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << "\r\n";
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << tail_ << "\r\n";
  }

 private:
  std::ofstream out_;
  std::string tail_;
};

void write_json(const std::string& file, const json& doc) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + file + "'");
  out << doc.dump(2) << "\n";
}

json stamp(const Scenario& sc, json doc) {
  doc["scenario_hash"] = hash_hex(sc.hash);
  doc["seed"] = sc.seed;
  return doc;
}

std::string out_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError("scenario field '" + field + "': " + what);
}

unsigned resolve_N(const Scenario& sc) {
  if (sc.N) return *sc.N;
  require(!sc.R_list.empty(), "N", "missing (give N, or R to derive it)");
  return select_parameters(sc.R(), sc.r, sc.tau, sc.J).N;
}

json frequency_json(const FrequencySet& f) {
  return json{{"c", f.c}, {"omega", f.omega}, {"lambda", f.lambda}, {"offset", f.offset}};
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names{"freq",    "certify", "measure",  "normalform",
                                              "simulate", "scaling", "corollary"};
  return names;
}

json cmd_freq(const Scenario& sc, const std::string& dir) {
  require(!sc.c_list.empty(), "c", "missing");
  json rows = json::array();
  const auto lambda = eigenvalues(sc.potential);
  for (double c : sc.c_list) rows.push_back(frequency_json(frequencies(lambda, c)));
  json doc = stamp(sc, {{"J", sc.J}, {"potential", to_json(sc.potential)}, {"frequencies", rows}});
  write_json(out_path(dir, "freq.json"), doc);
  return doc;
}

json cmd_certify(const Scenario& sc, const std::string& dir) {
  require(!sc.c_list.empty(), "c", "missing");
  const unsigned N = resolve_N(sc);
  const unsigned l_max = sc.l_max ? sc.l_max : static_cast<unsigned>(sc.J);
  const unsigned m_max = sc.m_max ? sc.m_max : static_cast<unsigned>(sc.J);
  require(l_max >= N, "l_max", "must be >= N");
  require(m_max >= l_max, "m_max", "must be >= l_max");
  const auto lambda = eigenvalues(sc.potential);
  json rows = json::array();
  bool all = true;
  for (double c : sc.c_list) {
    const FrequencySet f = frequencies(lambda, c);
    const Certificate c0 = certify_order0(f, sc.r, N, sc.gamma, sc.tau);
    const Certificate c1 = certify_one_tail(f, sc.r, N, sc.gamma, sc.tau, l_max, sc.potential.s);
    const Certificate c2 =
        certify_two_tail(f, sc.r, N, sc.gamma, sc.tau, l_max, m_max, sc.potential.s);
    const bool passed = c0.passed && c1.passed && c2.passed;
    all = all && passed;
    rows.push_back({{"c", c},
                    {"passed", passed},
                    {"order0", to_json(c0)},
                    {"one_tail", to_json(c1)},
                    {"two_tail", to_json(c2)}});
  }
  json doc = stamp(sc, {{"N", N},
                        {"r", sc.r},
                        {"gamma", sc.gamma},
                        {"tau", sc.tau},
                        {"passed", all},
                        {"certificates", rows}});
  write_json(out_path(dir, "certify.json"), doc);
  return doc;
}

json cmd_measure(const Scenario& sc, const std::string& dir) {
  require(!sc.measure.gamma_list.empty(), "measure.gamma_list", "missing");
  MeasureConfig cfg;
  cfg.family = sc.measure.family;
  cfg.estimator = sc.measure.estimator;
  cfg.c_floor = sc.c_interval.value_or(1);
  cfg.J = sc.J;
  cfg.s = sc.potential.s;
  cfg.M = sc.potential.M;
  cfg.r = sc.r;
  cfg.N = resolve_N(sc);
  cfg.tau = sc.tau;
  cfg.l_max = sc.l_max;
  cfg.m_max = sc.m_max;
  cfg.gamma_list = sc.measure.gamma_list;
  cfg.samples = sc.measure.samples;
  cfg.seed = sc.seed;
  const auto table = estimate_resonant_measure(cfg);

  CsvWriter csv(out_path(dir, "measure.csv"), sc, {"gamma", "fraction", "std_error"});
  json rows = json::array();
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : table) {
    csv.row({num(row.gamma), num(row.fraction), num(row.std_error)});
    rows.push_back({{"gamma", row.gamma}, {"fraction", row.fraction}, {"std_error", row.std_error}});
    if (row.gamma > 0.0 && row.fraction > 0.0) pts.emplace_back(row.gamma, row.fraction);
  }
  json doc = stamp(sc, {{"family", measure_family_name(cfg.family)},
                        {"estimator", measure_estimator_name(cfg.estimator)},
                        {"c_interval", {cfg.c_floor, cfg.c_floor + 1}},
                        {"N", cfg.N},
                        {"r", cfg.r},
                        {"tau", cfg.tau},
                        {"samples", cfg.samples},
                        {"table", rows}});
  if (pts.size() >= 3) doc["loglog_slope"] = fit_scaling(pts).slope;
  write_json(out_path(dir, "measure.json"), doc);
  return doc;
}

json cmd_normalform(const Scenario& sc, const std::string& dir) {
  require(!sc.c_list.empty(), "c", "missing");
  require(!sc.R_list.empty(), "R", "missing");
  require(!sc.nonlinearity.is_zero(), "nonlinearity", "missing or zero");
  NormalFormParams p;
  p.r = sc.r;
  p.gamma = sc.gamma;
  p.tau = sc.tau;
  p.N = resolve_N(sc);
  p.R = sc.R();
  p.s = sc.s;
  const FrequencySet f = frequencies(sc.potential, sc.c());
  const TaylorSplit taylor =
      taylor_nonlinearity(sc.nonlinearity, sc.potential, sc.c(), sc.J, p.extended_cap());
  const NormalFormResult res = normalize(f, taylor.n1, p);
  const ActionReport actions = verify_action_dependence(res.Z, p.N);
  const RemainderReport rem = remainder_report(res, sc.remainder_samples, sc.seed);

  json stages = json::array();
  for (const auto& st : res.stages) {
    stages.push_back({{"m", st.m},
                      {"degree", st.degree},
                      {"chi_terms", st.chi_terms},
                      {"z_terms", st.z_terms},
                      {"quasi_terms", st.quasi_terms},
                      {"high_terms", st.high_terms},
                      {"min_divisor", std::isfinite(st.min_divisor) ? json(st.min_divisor) : json()},
                      {"homological_residual", st.homological_residual},
                      {"stage_residual", st.stage_residual}});
  }
  json chis = json::array();
  for (const auto& chi : res.chis) chis.push_back(to_json(chi));
  json violations = json::array();
  for (const auto& m : actions.violations) {
    PolyHamiltonian one(sc.J, m.degree());
    one.add(m, 1.0);
    violations.push_back(to_json(one)[0]);
  }
  json doc = stamp(sc, {{"params",
                         {{"r", p.r},
                          {"N", p.N},
                          {"tau", p.tau},
                          {"gamma", p.gamma},
                          {"R", p.R},
                          {"s", p.s},
                          {"c", sc.c()}}},
                        {"Z", to_json(res.Z)},
                        {"chis", chis},
                        {"quasi_resonant", to_json(res.quasi_resonant)},
                        {"spill", res.spill},
                        {"stages", stages},
                        {"action_dependence", {{"passed", actions.passed()}, {"violations", violations}}},
                        {"remainder",
                         {{"r_T", rem.r_T},
                          {"r_N", rem.r_N},
                          {"comparator_T", rem.comparator_T},
                          {"comparator_N", rem.comparator_N},
                          {"spill_bound", rem.spill_bound},
                          {"samples", rem.samples}}}});
  write_json(out_path(dir, "normalform.json"), doc);

  std::ofstream txt(out_path(dir, "normalform_report.txt"), std::ios::binary);
  txt << "scenario " << hash_hex(sc.hash) << " seed " << sc.seed << "\n";
  txt << "c = " << num(sc.c()) << ", r = " << p.r << ", N = " << p.N << ", R = " << num(p.R)
      << ", threshold gamma/N^tau = " << num(p.threshold()) << "\n";
  for (const auto& st : res.stages) {
    txt << "stage " << st.m << " (degree " << st.degree << "): chi " << st.chi_terms << " terms, Z "
        << st.z_terms << ", quasi-resonant " << st.quasi_terms << ", >2 high modes "
        << st.high_terms << ", homological residual " << num(st.homological_residual) << "\n";
  }
  txt << "Z has " << res.Z.size() << " terms; action dependence "
      << (actions.passed() ? "holds" : "VIOLATED") << " (" << actions.violations.size()
      << " offending monomials)\n";
  txt << "remainder on ||psi||_s = R/3: r_T = " << num(rem.r_T) << " (R^{r+3/2} = "
      << num(rem.comparator_T) << "), r_N = " << num(rem.r_N) << " (R^2/N^{s-1} = "
      << num(rem.comparator_N) << ")\n";
  txt << "spill " << num(res.spill) << "\n";
  return doc;
}

json cmd_simulate(const Scenario& sc, const std::string& dir) {
  require(!sc.c_list.empty(), "c", "missing");
  require(!sc.R_list.empty(), "R", "missing");
  const double c = sc.c(), R = sc.R();
  const double T = sc.T > 0.0 ? sc.T : theorem_horizon(R, sc.r, sc.experiment.horizon_cap);
  const double dt = sc.integrator.dt_for(c);
  const ModeState psi0 = make_initial_state(sc.J, sc.s, sc.experiment.K * R, sc.seed);
  DriftTracker drift(psi0, sc.s);

  CsvWriter csv(out_path(dir, "simulate.csv"), sc, {"time", "norm_s", "H", "action_drift"});
  NlkgOptions opt{dt, T, sc.integrator.scheme, sc.integrator.record_every};
  const NlkgSummary summary =
      run_nlkg(psi0, sc.potential, c, sc.nonlinearity, sc.J, opt,
               [&](double t, const ModeState& st, double H) {
                 drift.update(st);
                 csv.row({num(t), num(sobolev_norm(st, sc.s)), num(H), num(drift.value())});
                 return true;
               });
  json doc = stamp(sc, {{"c", c},
                        {"R", R},
                        {"J", sc.J},
                        {"integrator", scheme_name(sc.integrator.scheme)},
                        {"dt", dt},
                        {"T", T},
                        {"steps", summary.steps},
                        {"pot_hash", hash_hex(potential_hash(sc.potential))},
                        {"initial_state", to_json(psi0)},
                        {"final_state", to_json(summary.final_state)},
                        {"max_relative_energy_drift", summary.max_relative_energy_drift},
                        {"action_drift", drift.value()}});
  write_json(out_path(dir, "simulate.json"), doc);
  return doc;
}

json cmd_scaling(const Scenario& sc, const std::string& dir) {
  require(!sc.c_list.empty(), "c", "missing");
  require(sc.R_list.size() >= 1, "R_list", "missing");
  std::vector<RunSpec> specs;
  for (double c : sc.c_list) {
    for (std::size_t i = 0; i < sc.R_list.size(); ++i) {
      RunSpec s;
      s.c = c;
      s.R = sc.R_list[i];
      s.K = sc.experiment.K;
      s.drift_horizon = theorem_horizon(s.R, sc.r, sc.experiment.horizon_cap);
      s.escape_horizon = sc.experiment.horizon_cap;
      s.s = sc.s;
      s.s1 = sc.experiment.s1;
      s.seed = sc.seed;
      s.index = i;  // same datum shape for every c
      specs.push_back(s);
    }
  }
  const auto results = run_batch(sc.potential, sc.nonlinearity, sc.J, specs, sc.integrator);

  CsvWriter csv(out_path(dir, "scaling.csv"), sc,
                {"c", "R", "dt", "drift_horizon", "action_drift", "torus_distance", "escaped",
                 "escape_time", "max_norm", "energy_drift"});
  json runs = json::array();
  for (const auto& r : results) {
    csv.row({num(r.spec.c), num(r.spec.R), num(r.dt), num(r.spec.drift_horizon), num(r.drift),
             num(r.torus_distance), r.escaped ? "1" : "0", num(r.escape_time), num(r.max_norm),
             num(r.energy_drift)});
    runs.push_back({{"c", r.spec.c},
                    {"R", r.spec.R},
                    {"dt", r.dt},
                    {"drift_horizon", r.spec.drift_horizon},
                    {"action_drift", r.drift},
                    {"torus_distance", r.torus_distance},
                    {"escaped", r.escaped},
                    {"escape_time", r.escape_time},
                    {"max_norm", r.max_norm},
                    {"energy_drift", r.energy_drift}});
  }
  // drift constant fitted at the largest R of each c
  json fits = json::array();
  const std::size_t nR = sc.R_list.size();
  for (std::size_t ci = 0; ci < sc.c_list.size(); ++ci) {
    std::vector<std::pair<double, double>> drift_pts, escape_pts;
    std::size_t ref = ci * nR;
    bool all_escaped = true;
    for (std::size_t i = 0; i < nR; ++i) {
      const auto& r = results[ci * nR + i];
      if (r.spec.R > results[ref].spec.R) ref = ci * nR + i;
      if (r.drift > 0.0) drift_pts.emplace_back(r.spec.R, r.drift);
      escape_pts.emplace_back(r.spec.R, r.escape_time);
      all_escaped = all_escaped && r.escaped;
    }
    const double C = results[ref].drift / std::pow(results[ref].spec.R, 3.0);
    json fit{{"c", sc.c_list[ci]}, {"C_drift", C}, {"all_escaped", all_escaped}};
    if (drift_pts.size() >= 3) fit["drift_slope"] = fit_scaling(drift_pts).slope;
    if (escape_pts.size() >= 3 && all_escaped) fit["escape_slope"] = fit_scaling(escape_pts).slope;
    fits.push_back(fit);
  }
  json doc = stamp(sc, {{"runs", runs},
                        {"fits", fits},
                        {"integrator", scheme_name(sc.integrator.scheme)},
                        {"K", sc.experiment.K},
                        {"horizon_cap", sc.experiment.horizon_cap}});
  write_json(out_path(dir, "scaling.json"), doc);
  return doc;
}

json cmd_corollary(const Scenario& sc, const std::string& dir) {
  require(!sc.c_list.empty(), "c_list", "missing");
  CorollaryConfig cfg;
  cfg.alpha = sc.experiment.alpha;
  cfg.c_list = sc.c_list;
  cfg.K = sc.experiment.K;
  cfg.r = sc.r;
  cfg.horizon_cap = sc.experiment.horizon_cap;
  cfg.s = sc.s;
  cfg.seed = sc.seed;
  const auto rows = corollary_experiment(cfg, sc.potential, sc.nonlinearity, sc.J, sc.integrator);
  CsvWriter csv(out_path(dir, "corollary.csv"), sc,
                {"c", "radius", "bound", "horizon", "max_norm", "passed", "violation_time",
                 "energy_drift", "dt"});
  json out = json::array();
  bool all = true;
  for (const auto& r : rows) {
    all = all && r.passed;
    csv.row({num(r.c), num(r.radius), num(r.bound), num(r.horizon), num(r.max_norm),
             r.passed ? "1" : "0", num(r.violation_time), num(r.energy_drift), num(r.dt)});
    out.push_back({{"c", r.c},
                   {"radius", r.radius},
                   {"bound", r.bound},
                   {"horizon", r.horizon},
                   {"max_norm", r.max_norm},
                   {"margin", r.bound - r.max_norm},
                   {"passed", r.passed},
                   {"violation_time", r.violation_time < 0.0 ? json() : json(r.violation_time)},
                   {"energy_drift", r.energy_drift}});
  }
  json doc = stamp(sc, {{"alpha", cfg.alpha}, {"K", cfg.K}, {"passed", all}, {"rows", out}});
  write_json(out_path(dir, "corollary.json"), doc);
  return doc;
}

json dispatch(const std::string& sub, const Scenario& sc, const std::string& dir) {
  fs::create_directories(dir);
  if (sub == "freq") return cmd_freq(sc, dir);
  if (sub == "certify") return cmd_certify(sc, dir);
  if (sub == "measure") return cmd_measure(sc, dir);
  if (sub == "normalform") return cmd_normalform(sc, dir);
  if (sub == "simulate") return cmd_simulate(sc, dir);
  if (sub == "scaling") return cmd_scaling(sc, dir);
  if (sub == "corollary") return cmd_corollary(sc, dir);
  throw ConfigError("unknown subcommand '" + sub + "'");
}

int run_cli(const std::string& sub, const std::string& scenario_path, const std::string& dir) {
  try {
    const Scenario sc = load_scenario(scenario_path);
    dispatch(sub, sc, dir);
    return 0;
  } catch (const NumericalError& e) {
    std::cerr << "nlkg: numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    // ConfigError and precondition violations from the library
    std::cerr << "nlkg: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "nlkg: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "nlkg: error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace nlkg
