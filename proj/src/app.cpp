#include "vapordet/app.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "vapordet/detector_model.hpp"
#include "vapordet/dynamics.hpp"
#include "vapordet/error.hpp"
#include "vapordet/explorer.hpp"
#include "vapordet/oracle.hpp"
#include "vapordet/readout_mc.hpp"

namespace vapordet {

using nlohmann::json;

namespace {

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json block(const RunConfig& cfg, const char* name) {
  if (!cfg.raw.contains(name)) return json::object();
  const auto& b = cfg.raw.at(name);
  if (!b.is_object()) throw ConfigError(std::string("'") + name + "' must be an object");
  return b;
}

double number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return j.at(key).get<double>();
}

std::uint64_t count(const json& j, const char* key, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

json meta(const RunConfig& cfg, std::string_view command) {
  return {{"version", std::string(kVersion)},
          {"command", std::string(command)},
          {"seed", cfg.seed},
          {"config_hash", config_hash(cfg.raw)},
          {"config", cfg.raw}};
}

std::string csv_preamble(const RunConfig& cfg, std::string_view command) {
  return "# vapordet " + std::string(kVersion) + " command=" + std::string(command) +
         " seed=" + std::to_string(cfg.seed) + " config_hash=" + config_hash(cfg.raw) +
         "\n# config=" + cfg.raw.dump() + "\n";
}

bool want_json(OutputFormat f) { return f == OutputFormat::json || f == OutputFormat::both; }
bool want_csv(OutputFormat f) { return f == OutputFormat::csv || f == OutputFormat::both; }

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

std::string table(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::size_t w = 0;
  for (const auto& [k, v] : rows) w = std::max(w, k.size());
  std::ostringstream os;
  for (const auto& [k, v] : rows) os << "  " << std::left << std::setw(static_cast<int>(w) + 2) << k << v << '\n';
  return os.str();
}

json absorption_json(const AbsorptionResult& r) {
  return {{"beta_re", r.beta_final.real()},
          {"beta_im", r.beta_final.imag()},
          {"p_absorb", r.p_absorb},
          {"p_scatter", r.p_scatter}};
}

PulseShape pulse_from_json(const json& j, double default_duration) {
  if (j.is_null()) return PulseShape::square(default_duration);
  if (!j.is_object()) throw ConfigError("pulse must be an object");
  double duration = default_duration;
  if (j.contains("duration")) duration = number(j, "duration", duration);
  if (j.contains("duration_ns")) duration = number(j, "duration_ns", 0.0) * 1e-9;
  const auto kind = j.value("kind", std::string("square"));
  if (kind == "square") return PulseShape::square(duration);
  if (kind != "sampled") throw ConfigError("pulse kind must be 'square' or 'sampled'");
  if (!j.contains("samples") || !j.at("samples").is_array())
    throw ConfigError("sampled pulse needs a 'samples' array");
  std::vector<cplx> s;
  for (const auto& v : j.at("samples")) {
    if (v.is_number())
      s.emplace_back(v.get<double>(), 0.0);
    else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
      s.emplace_back(v[0].get<double>(), v[1].get<double>());
    else
      throw ConfigError("pulse samples must be numbers or [re, im] pairs");
  }
  try {
    return PulseShape::sampled(duration, std::move(s));
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

std::vector<double> axis_values(const json& a) {
  if (a.contains("values")) {
    if (!a.at("values").is_array()) throw ConfigError("sweep axis 'values' must be an array");
    std::vector<double> v;
    for (const auto& x : a.at("values")) {
      if (!x.is_number()) throw ConfigError("sweep axis values must be numbers");
      v.push_back(x.get<double>());
    }
    return v;
  }
  if (!a.contains("from") || !a.contains("to") || !a.contains("count"))
    throw ConfigError("sweep axis needs 'values' or 'from', 'to', 'count'");
  const double lo = number(a, "from", 0.0);
  const double hi = number(a, "to", 0.0);
  const auto n = count(a, "count", 0);
  const auto scale = a.value("scale", std::string("linear"));
  if (scale != "linear" && scale != "log") throw ConfigError("sweep axis scale must be 'linear' or 'log'");
  if (scale == "log" && !(lo > 0.0 && hi > 0.0)) throw ConfigError("log-scaled axis needs positive bounds");
  std::vector<double> v;
  for (std::uint64_t k = 0; k < n; ++k) {
    const double t = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
    v.push_back(scale == "log" ? lo * std::pow(hi / lo, t) : lo + t * (hi - lo));
  }
  return v;
}

OptimizationProblem problem_from_config(const RunConfig& cfg) {
  const auto b = block(cfg, "optimize");
  OptimizationProblem p;
  p.base = cfg.design;
  if (!b.contains("free") || !b.at("free").is_array())
    throw ConfigError("optimize needs a 'free' array of {field, lo, hi}");
  for (const auto& f : b.at("free")) {
    if (!f.is_object() || !f.contains("field")) throw ConfigError("optimize free entries need 'field'");
    p.free_fields.push_back({f.at("field").get<std::string>(), number(f, "lo", NAN), number(f, "hi", NAN)});
  }
  if (!b.contains("budget")) throw ConfigError("optimize needs 'budget'");
  p.budget = number(b, "budget", 1.0);
  p.probe_points = static_cast<int>(count(b, "probe_points", 5));
  p.max_evaluations = static_cast<int>(count(b, "max_evaluations", 20000));
  validate_problem(p);
  return p;
}

}  // namespace

std::string config_hash(const json& raw) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : raw.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

OutputFormat format_from_string(std::string_view s) {
  if (s == "json") return OutputFormat::json;
  if (s == "csv") return OutputFormat::csv;
  if (s == "both") return OutputFormat::both;
  throw ConfigError("format must be json, csv or both");
}

RunConfig parse_config(std::string_view text, std::optional<std::uint64_t> seed_override,
                       const std::string& base_dir) {
  RunConfig cfg;
  try {
    cfg.raw = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error at " + line_col(text, e.byte) + ": " + e.what());
  }
  if (!cfg.raw.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known{"design", "seed", "output_dir", "description",
                                           "dynamics", "mc", "sweep", "optimize"};
  for (const auto& [k, v] : cfg.raw.items())
    if (!known.contains(k)) throw ConfigError("config: unknown top-level key '" + k + "'");
  if (!cfg.raw.contains("design")) throw ConfigError("config: missing 'design' block");

  if (seed_override) cfg.raw["seed"] = *seed_override;
  cfg.seed = count(cfg.raw, "seed", 0);
  cfg.output_dir = cfg.raw.value("output_dir", std::string());

  json design = cfg.raw.at("design");
  if (design.is_object() && design.contains("species_file")) {
    namespace fs = std::filesystem;
    fs::path path = design.at("species_file").get<std::string>();
    if (path.is_relative()) path = fs::path(base_dir) / path;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open species file '" + path.string() + "'");
    try {
      design["species"] = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("species file '" + path.string() + "': " + e.what());
    }
    design.erase("species_file");
  }
  cfg.design = design_from_json(design);
  const auto violations = validate_units(cfg.design);
  if (!violations.empty()) {
    std::string msg = "invalid design:";
    for (const auto& v : violations) msg += "\n  " + v.field + ": " + v.message;
    throw ConfigError(msg);
  }
  return cfg;
}

CommandOutput cmd_budget(const RunConfig& cfg, OutputFormat f) {
  const auto r = budget_report(cfg.design);
  CommandOutput out;
  json body = to_json(r);
  body["frequency_convention"] = std::string(to_string(cfg.design.convention));
  body["design"] = design_to_json(cfg.design);
  json doc = body;
  doc["meta"] = meta(cfg, "budget");

  out.summary = "efficiency budget (" + std::string(to_string(cfg.design.convention)) + " convention)\n" +
                table({{"eta", fmt(r.budget.eta)},
                       {"loss_scatter", fmt(r.budget.loss_scatter)},
                       {"loss_transmission", fmt(r.budget.loss_transmission)},
                       {"loss_collision", fmt(r.budget.loss_collision)},
                       {"atom_count N", fmt(r.atom_count)},
                       {"tau_col [s]", fmt(r.tau_col)},
                       {"l_abs [m]", fmt(r.l_abs)},
                       {"t_ro [s]", fmt(r.t_ro)},
                       {"zeeman detuning [s^-1]", fmt(r.zeeman_detuning)},
                       {"P_dc", fmt(r.p_dc)},
                       {"net dark (linear)", fmt(r.net_dark.linear)},
                       {"net dark (exact)", fmt(r.net_dark.exact)},
                       {"clamped", r.budget.clamped ? "yes" : "no"},
                       {"far detuned", r.far_detuned ? "yes" : "no"}}) +
                body.dump(2) + "\n";
  if (want_json(f)) out.files.push_back({"budget.json", doc.dump(2) + "\n"});
  if (want_csv(f)) {
    std::ostringstream os;
    os << std::setprecision(17) << csv_preamble(cfg, "budget")
       << "eta,loss_scatter,loss_transmission,loss_collision,atom_count,tau_col_s,l_abs_m,t_ro_s,"
          "zeeman_detuning_per_s,p_dc,net_dark_linear,net_dark_exact,clamped,far_detuned\n"
       << r.budget.eta << ',' << r.budget.loss_scatter << ',' << r.budget.loss_transmission << ','
       << r.budget.loss_collision << ',' << r.atom_count << ',' << r.tau_col << ',' << r.l_abs << ','
       << r.t_ro << ',' << r.zeeman_detuning << ',' << r.p_dc << ',' << r.net_dark.linear << ','
       << r.net_dark.exact << ',' << (r.budget.clamped ? 1 : 0) << ',' << (r.far_detuned ? 1 : 0) << '\n';
    out.files.push_back({"budget.csv", os.str()});
  }
  return out;
}

CommandOutput cmd_dynamics(const RunConfig& cfg, OutputFormat f) {
  const auto b = block(cfg, "dynamics");
  const auto& d = cfg.design;
  const auto escort = pulse_from_json(b.value("escort", json()), d.pulse_duration);
  const auto photon = pulse_from_json(b.value("photon", json()), d.pulse_duration);
  const double drive = number(b, "drive", photon_drive(d));
  MarkovOptions opts;
  opts.trajectory_samples = count(b, "trajectory_samples", 201);
  if (b.contains("tolerance")) {
    opts.tol.atol = number(b.at("tolerance"), "atol", opts.tol.atol);
    opts.tol.rtol = number(b.at("tolerance"), "rtol", opts.tol.rtol);
  }

  const auto numeric = solve_markov_numeric(d, escort, photon, drive, opts);
  json body;
  body["drive_per_s"] = drive;
  body["kappa_per_s"] = markov_damping(d);
  body["numeric"] = absorption_json(numeric);
  body["closed_form"] = nullptr;
  body["agreement"] = nullptr;

  CommandOutput out;
  std::vector<std::pair<std::string, std::string>> rows{
      {"drive [s^-1]", fmt(drive)},
      {"p_absorb (numeric)", fmt(numeric.p_absorb)},
      {"p_scatter (numeric)", fmt(numeric.p_scatter)}};

  std::optional<AbsorptionResult> closed;
  if (escort.kind == PulseShape::Kind::square && photon.kind == PulseShape::Kind::square &&
      escort.duration == photon.duration) {
    DetectorDesign dd = d;
    dd.pulse_duration = escort.duration;
    closed = solve_markov_square(dd, drive, opts.trajectory_samples);
    const double ref = std::abs(closed->beta_final);
    const double diff = std::abs(numeric.beta_final - closed->beta_final);
    const double agreement = ref > 0.0 ? diff / ref : diff;
    body["closed_form"] = absorption_json(*closed);
    body["agreement"] = agreement;
    rows.push_back({"p_absorb (closed form)", fmt(closed->p_absorb)});
    rows.push_back({"agreement (rel. |d beta|)", fmt(agreement)});
    const auto sc = scatter_crosscheck(dd);
    body["scatter_crosscheck"] = {{"budget_term", sc.budget_term},
                                  {"markov_fraction", sc.markov_fraction},
                                  {"ratio", sc.ratio},
                                  {"ratio_squared", sc.ratio_squared}};
  }

  std::optional<MarkovComparison> cmp;
  const bool oracle_on = b.contains("oracle") && !(b.at("oracle").is_boolean() && !b.at("oracle").get<bool>());
  if (oracle_on) {
    const json o = b.at("oracle").is_object() ? b.at("oracle") : json::object();
    DeskOptions desk;
    desk.modes = count(o, "modes", desk.modes);
    desk.atoms = count(o, "atoms", desk.atoms);
    desk.seed = count(o, "seed", cfg.seed);
    desk.revival_factor = number(o, "revival_factor", desk.revival_factor);
    desk.oracle.samples = count(o, "samples", desk.oracle.samples);
    cmp = compare_with_markov(d, desk);
    body["oracle"] = {{"modes", desk.modes},
                      {"atoms", desk.atoms},
                      {"seed", desk.seed},
                      {"oracle_absorb", cmp->oracle_absorb},
                      {"markov_absorb", cmp->markov_absorb},
                      {"relative_difference", cmp->relative_difference},
                      {"norm_drift", cmp->norm_drift},
                      {"conservation_drift", cmp->excitation_drift},
                      {"kappa_T", cmp->kappa_T}};
    rows.push_back({"oracle absorb", fmt(cmp->oracle_absorb)});
    rows.push_back({"markov absorb", fmt(cmp->markov_absorb)});
    rows.push_back({"conservation drift", fmt(cmp->excitation_drift)});
  }

  json doc = body;
  doc["meta"] = meta(cfg, "dynamics");
  out.summary = "single-atom absorption dynamics\n" + table(rows) + body.dump(2) + "\n";
  if (want_json(f)) out.files.push_back({"dynamics.json", doc.dump(2) + "\n"});
  if (want_csv(f)) {
    const auto pre = csv_preamble(cfg, "dynamics");
    out.files.push_back({"trajectory_numeric.csv", pre + trajectory_csv(numeric.trajectory)});
    if (closed) out.files.push_back({"trajectory_closed_form.csv", pre + trajectory_csv(closed->trajectory)});
    if (cmp) out.files.push_back({"oracle_trajectory.csv", pre + oracle_trajectory_csv(cmp->trajectory)});
  }
  return out;
}

CommandOutput cmd_mc(const RunConfig& cfg, OutputFormat f) {
  const auto b = block(cfg, "mc");
  const auto& d = cfg.design;
  double duration = 0.0;
  int given = 0;
  if (b.contains("readout_duration")) duration = number(b, "readout_duration", 0.0), ++given;
  if (b.contains("readout_duration_ms")) duration = number(b, "readout_duration_ms", 0.0) * 1e-3, ++given;
  if (b.contains("readout_duration_tro")) duration = number(b, "readout_duration_tro", 0.0) * readout_time(d), ++given;
  if (given != 1)
    throw ConfigError("mc needs exactly one of readout_duration, readout_duration_ms, readout_duration_tro");
  if (!(duration > 0.0)) throw ConfigError("mc: readout duration must be positive");

  ReadoutScenario sc;
  sc.design = d;
  sc.n_photons_true = static_cast<int>(count(b, "n_photons", 1));
  sc.readout_duration = duration;
  sc.trials = count(b, "trials", 10000);
  sc.rng_seed = cfg.seed;
  if (sc.trials == 0) throw ConfigError("mc: trials must be at least 1");

  ReadoutChain chain = readout_chain(d, duration);
  if (b.contains("chain")) {
    const auto& c = b.at("chain");
    chain.p_absorb = number(c, "p_absorb", chain.p_absorb);
    chain.p_survive = number(c, "p_survive", chain.p_survive);
    chain.p_register = number(c, "p_register", chain.p_register);
    chain.p_dark = number(c, "p_dark", chain.p_dark);
    chain.atoms = count(c, "atoms", chain.atoms);
  }
  const auto outcomes = run_trials(chain, sc.n_photons_true, sc.trials, sc.rng_seed);
  const auto summary = summarize(outcomes, sc.n_photons_true);

  json body;
  body["n_photons"] = sc.n_photons_true;
  body["readout_duration_s"] = duration;
  body["chain"] = to_json(chain);
  body["summary"] = to_json(summary);
  body["photon_count_flagged"] = photon_count_flagged(sc);
  const auto fl = fluorescence_photon_count(d, duration);
  body["fluorescence"] = {{"expected_detected", fl.expected_detected}, {"scatter_rate_per_s", fl.scatter_rate}};

  std::optional<DiscriminationReport> disc;
  if (b.contains("confusion")) {
    const auto& c = b.at("confusion");
    disc = discrimination_report(chain, static_cast<int>(count(c, "n_min", 0)),
                                 static_cast<int>(count(c, "n_max", 5)), count(c, "trials", sc.trials),
                                 cfg.seed);
    body["confusion"] = to_json(*disc);
  }

  CommandOutput out;
  out.summary = "readout Monte Carlo\n" +
                table({{"trials", std::to_string(summary.trials)},
                       {"per-photon efficiency", fmt(chain.per_photon())},
                       {"dark prob per atom", fmt(chain.p_dark)},
                       {"fraction exact", fmt(summary.fraction_exact)},
                       {"fraction with dark", fmt(summary.fraction_any_dark)},
                       {"mean inferred - true", fmt(summary.mean_detected + summary.mean_dark - sc.n_photons_true)}}) +
                body.dump(2) + "\n";
  json doc = body;
  doc["meta"] = meta(cfg, "mc");
  if (want_json(f)) out.files.push_back({"mc_summary.json", doc.dump(2) + "\n"});
  if (want_csv(f)) {
    const auto pre = csv_preamble(cfg, "mc");
    std::ostringstream hist;
    hist << pre << "inferred_n,count\n";
    for (std::size_t m = 0; m < summary.histogram.size(); ++m) hist << m << ',' << summary.histogram[m] << '\n';
    out.files.push_back({"mc_histogram.csv", hist.str()});
    if (b.value("write_trials", false)) {
      std::ostringstream tr;
      tr << pre << "trial,n_absorbed,n_atoms_detected,n_dark_atoms,inferred_n\n";
      for (std::size_t k = 0; k < outcomes.size(); ++k) {
        const auto& o = outcomes[k];
        tr << k << ',' << o.n_absorbed << ',' << o.n_atoms_detected << ',' << o.n_dark_atoms << ','
           << o.inferred_n << '\n';
      }
      out.files.push_back({"mc_trials.csv", tr.str()});
    }
    if (disc) out.files.push_back({"confusion.csv", pre + confusion_csv(*disc)});
  }
  return out;
}

CommandOutput cmd_sweep(const RunConfig& cfg, OutputFormat f) {
  const auto b = block(cfg, "sweep");
  SweepSpec spec;
  spec.base = cfg.design;
  if (!b.contains("axes") || !b.at("axes").is_array() || b.at("axes").empty())
    throw ConfigError("sweep needs a non-empty 'axes' array");
  for (const auto& a : b.at("axes")) {
    if (!a.is_object() || !a.contains("field")) throw ConfigError("sweep axes need 'field'");
    spec.axes.push_back({a.at("field").get<std::string>(), axis_values(a)});
  }
  if (b.contains("outputs")) {
    for (const auto& o : b.at("outputs")) spec.outputs.push_back(o.get<std::string>());
  } else {
    spec.outputs = metric_names();
  }
  validate_sweep(spec);
  const auto t = run_sweep(spec);

  CommandOutput out;
  std::size_t failures = 0;
  for (const auto& r : t.rows) failures += r.error.empty() ? 0 : 1;
  out.summary = "parameter sweep\n" + table({{"grid points", std::to_string(t.rows.size())},
                                            {"failed points", std::to_string(failures)}});
  if (want_json(f)) {
    json doc = to_json(t);
    doc["meta"] = meta(cfg, "sweep");
    out.files.push_back({"sweep.json", doc.dump(2) + "\n"});
  }
  if (want_csv(f)) out.files.push_back({"sweep.csv", csv_preamble(cfg, "sweep") + sweep_csv(t)});
  return out;
}

CommandOutput cmd_optimize(const RunConfig& cfg, OutputFormat f) {
  const auto p = problem_from_config(cfg);
  const auto res = optimize(p);
  const auto b = block(cfg, "optimize");

  json body;
  body["best"] = to_json(res.best, p);
  body["budget"] = to_json(res.budget);
  body["design"] = design_to_json(res.design);
  body["evaluations"] = res.trace.size();
  body["local_improvement"] = local_improvement(p, res.best.x);

  CommandOutput out;
  std::vector<std::pair<std::string, std::string>> rows{{"eta", fmt(res.best.eta)},
                                                        {"net dark (exact)", fmt(res.best.net_dark)},
                                                        {"evaluations", std::to_string(res.trace.size())}};
  for (std::size_t k = 0; k < p.free_fields.size(); ++k)
    rows.push_back({p.free_fields[k].field, fmt(res.best.x[k])});

  json doc = body;
  doc["meta"] = meta(cfg, "optimize");
  out.files.push_back({"optimize.json", doc.dump(2) + "\n"});
  std::ostringstream trace;
  trace << json{{"meta", meta(cfg, "optimize")}}.dump() << '\n';
  for (std::size_t k = 0; k < res.trace.size(); ++k) {
    json line = to_json(res.trace[k], p);
    line["eval"] = k;
    trace << line.dump() << '\n';
  }
  out.files.push_back({"trace.jsonl", trace.str()});

  if (b.contains("pareto_density")) {
    const auto front = pareto_front(p, static_cast<int>(count(b, "pareto_density", 5)));
    rows.push_back({"pareto points", std::to_string(front.size())});
    if (want_json(f)) {
      json arr = json::array();
      for (const auto& pt : front) arr.push_back(to_json(pt, p));
      out.files.push_back({"pareto.json", json{{"meta", meta(cfg, "optimize")}, {"front", arr}}.dump(2) + "\n"});
    }
    if (want_csv(f)) {
      std::ostringstream os;
      os << std::setprecision(17) << csv_preamble(cfg, "optimize") << "eta,net_dark_exact";
      for (const auto& ff : p.free_fields) os << ',' << ff.field << " [" << field_unit(ff.field) << ']';
      os << '\n';
      for (const auto& pt : front) {
        os << pt.eta << ',' << pt.net_dark;
        for (double x : pt.x) os << ',' << x;
        os << '\n';
      }
      out.files.push_back({"pareto.csv", os.str()});
    }
  }
  out.summary = "constrained design optimization\n" + table(rows) + body.dump(2) + "\n";
  return out;
}

CommandOutput run_command(std::string_view command, const RunConfig& cfg, OutputFormat f) {
  if (command == "budget") return cmd_budget(cfg, f);
  if (command == "dynamics") return cmd_dynamics(cfg, f);
  if (command == "mc") return cmd_mc(cfg, f);
  if (command == "sweep") return cmd_sweep(cfg, f);
  if (command == "optimize") return cmd_optimize(cfg, f);
  throw ConfigError("unknown command '" + std::string(command) + "'");
}

}  // namespace vapordet
