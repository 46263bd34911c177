#include "vapordet/explorer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <numeric>
#include <numbers>
#include <sstream>

#include "vapordet/error.hpp"

namespace vapordet {

namespace {

const std::vector<std::pair<std::string, std::string>>& metric_table() {
  static const std::vector<std::pair<std::string, std::string>> t{
      {"eta", "1"},           {"loss_scatter", "1"},   {"loss_transmission", "1"},
      {"loss_collision", "1"}, {"p_dc", "1"},          {"net_dark_linear", "1"},
      {"net_dark_exact", "1"}, {"atom_count", "1"},    {"tau_col", "s"},
      {"l_abs", "m"},          {"t_ro", "s"}};
  return t;
}

bool design_valid(const DetectorDesign& d, const EfficiencyBudget& b) {
  return validate_units(d).empty() && far_detuned(d) && !b.clamped;
}

// Odometer over a grid with `dims` axes of the given sizes; last axis fastest.
void for_each_grid_point(const std::vector<std::size_t>& sizes,
                         const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> idx(sizes.size(), 0);
  for (auto s : sizes)
    if (s == 0) return;
  while (true) {
    fn(idx);
    std::size_t k = sizes.size();
    while (k > 0) {
      --k;
      if (++idx[k] < sizes[k]) break;
      idx[k] = 0;
      if (k == 0) return;
    }
    if (sizes.empty()) return;
  }
}

}  // namespace

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [n, u] : metric_table()) v.push_back(n);
    return v;
  }();
  return names;
}

std::string_view metric_unit(std::string_view metric) {
  for (const auto& [n, u] : metric_table())
    if (n == metric) return u;
  throw ConfigError("unknown metric '" + std::string(metric) + "'");
}

double metric_value(const BudgetReport& r, std::string_view m) {
  if (m == "eta") return r.budget.eta;
  if (m == "loss_scatter") return r.budget.loss_scatter;
  if (m == "loss_transmission") return r.budget.loss_transmission;
  if (m == "loss_collision") return r.budget.loss_collision;
  if (m == "p_dc") return r.p_dc;
  if (m == "net_dark_linear") return r.net_dark.linear;
  if (m == "net_dark_exact") return r.net_dark.exact;
  if (m == "atom_count") return r.atom_count;
  if (m == "tau_col") return r.tau_col;
  if (m == "l_abs") return r.l_abs;
  if (m == "t_ro") return r.t_ro;
  throw ConfigError("unknown metric '" + std::string(m) + "'");
}

void validate_sweep(const SweepSpec& spec) {
  if (spec.axes.empty()) throw ConfigError("sweep: no axes given");
  for (const auto& a : spec.axes) {
    if (!is_design_field(a.field)) throw ConfigError("sweep: unknown axis field '" + a.field + "'");
    if (a.values.empty()) throw ConfigError("sweep: axis '" + a.field + "' has an empty grid");
    for (double v : a.values)
      if (!std::isfinite(v)) throw ConfigError("sweep: axis '" + a.field + "' has non-finite values");
  }
  for (const auto& o : spec.outputs) (void)metric_unit(o);
}

SweepTable run_sweep(const SweepSpec& spec) {
  validate_sweep(spec);
  SweepTable t;
  for (const auto& a : spec.axes) t.axes.push_back(a.field);
  t.outputs = spec.outputs;
  std::vector<std::size_t> sizes;
  for (const auto& a : spec.axes) sizes.push_back(a.values.size());

  for_each_grid_point(sizes, [&](const std::vector<std::size_t>& idx) {
    SweepRow row;
    DetectorDesign d = spec.base;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const double v = spec.axes[k].values[idx[k]];
      row.coords.push_back(v);
      set_field(d, spec.axes[k].field, v);
    }
    row.valid = validate_units(d).empty();
    row.far_detuned = far_detuned(d);
    try {
      const auto r = budget_report(d);
      row.clamped = r.budget.clamped;
      for (const auto& o : spec.outputs) row.metrics.push_back(metric_value(r, o));
    } catch (const std::exception& e) {
      row.error = e.what();
      row.metrics.assign(spec.outputs.size(), std::numeric_limits<double>::quiet_NaN());
    }
    t.rows.push_back(std::move(row));
  });
  return t;
}

std::string sweep_csv(const SweepTable& t) {
  std::ostringstream os;
  os << std::setprecision(17);
  bool first = true;
  auto sep = [&] {
    if (!first) os << ',';
    first = false;
  };
  for (const auto& a : t.axes) {
    sep();
    os << a << " [" << field_unit(a) << ']';
  }
  for (const auto& o : t.outputs) {
    sep();
    os << o << " [" << metric_unit(o) << ']';
  }
  sep();
  os << "valid,far_detuned,clamped,error\n";
  for (const auto& r : t.rows) {
    first = true;
    for (double c : r.coords) {
      sep();
      os << c;
    }
    for (double m : r.metrics) {
      sep();
      os << m;
    }
    sep();
    os << (r.valid ? 1 : 0) << ',' << (r.far_detuned ? 1 : 0) << ',' << (r.clamped ? 1 : 0) << ','
       << '"' << r.error << '"' << '\n';
  }
  return os.str();
}

nlohmann::json to_json(const SweepTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    nlohmann::json j;
    for (std::size_t k = 0; k < t.axes.size(); ++k) j[t.axes[k]] = r.coords[k];
    for (std::size_t k = 0; k < t.outputs.size(); ++k)
      j[t.outputs[k]] = std::isfinite(r.metrics[k]) ? nlohmann::json(r.metrics[k]) : nlohmann::json(nullptr);
    j["valid"] = r.valid;
    j["far_detuned"] = r.far_detuned;
    j["clamped"] = r.clamped;
    if (!r.error.empty()) j["error"] = r.error;
    rows.push_back(std::move(j));
  }
  return {{"axes", t.axes}, {"outputs", t.outputs}, {"rows", rows}};
}

void validate_problem(const OptimizationProblem& p) {
  if (p.free_fields.empty()) throw ConfigError("optimize: no free fields");
  for (const auto& f : p.free_fields) {
    if (!is_design_field(f.field)) throw ConfigError("optimize: unknown free field '" + f.field + "'");
    if (!std::isfinite(f.lo) || !std::isfinite(f.hi) || !(f.lo <= f.hi))
      throw ConfigError("optimize: bounds of '" + f.field + "' must be finite with lo <= hi");
  }
  if (!(p.budget > 0.0 && p.budget <= 1.0)) throw ConfigError("optimize: budget must lie in (0, 1]");
  if (p.probe_points < 2) throw ConfigError("optimize: probe_points must be at least 2");
}

DetectorDesign apply_free(const OptimizationProblem& p, const std::vector<double>& x) {
  DetectorDesign d = p.base;
  for (std::size_t k = 0; k < p.free_fields.size(); ++k) set_field(d, p.free_fields[k].field, x[k]);
  return d;
}

Evaluation evaluate(const OptimizationProblem& p, const std::vector<double>& x) {
  Evaluation e;
  e.x = x;
  const DetectorDesign d = apply_free(p, x);
  try {
    const auto r = budget_report(d);
    e.eta = r.budget.eta;
    e.net_dark = r.net_dark.exact;
    e.valid = design_valid(d, r.budget) && std::isfinite(e.eta) && std::isfinite(e.net_dark);
  } catch (const Error&) {
    e.valid = false;
  }
  if (!e.valid) {
    e.objective = p.penalty;
    return e;
  }
  const double violation = std::max(0.0, e.net_dark - p.budget);
  e.feasible = violation == 0.0;
  e.objective = -e.eta + p.penalty * violation;
  return e;
}

namespace {

class BoxObjective {
 public:
  BoxObjective(const OptimizationProblem& p, std::vector<Evaluation>& trace) : p_(p), trace_(trace) {}

  // Box coordinate u in [0, 1] from the unconstrained search variable v.
  // The map is periodic and smooth, so bound optima sit at interior v and
  // the simplex never collapses onto a face.
  static double to_u(double v) { return 0.5 * (1.0 - std::cos(std::numbers::pi * v)); }
  static double to_v(double u) { return std::acos(1.0 - 2.0 * std::clamp(u, 0.0, 1.0)) / std::numbers::pi; }

  std::vector<double> to_x(const std::vector<double>& v) const {
    std::vector<double> x(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
      const auto& f = p_.free_fields[k];
      x[k] = f.lo + to_u(v[k]) * (f.hi - f.lo);
    }
    return x;
  }

  double operator()(const std::vector<double>& v) {
    trace_.push_back(evaluate(p_, to_x(v)));
    return trace_.back().objective;
  }

 private:
  const OptimizationProblem& p_;
  std::vector<Evaluation>& trace_;
};

// Plain Nelder-Mead in the unconstrained search variable.
std::vector<double> nelder_mead(BoxObjective& f, std::vector<double> start, double xtol,
                                int max_evals, int& evals) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> s(n + 1, start);
  std::vector<double> fv(n + 1);
  for (std::size_t k = 0; k < n; ++k) s[k + 1][k] += 0.1;
  for (std::size_t k = 0; k <= n; ++k) {
    fv[k] = f(s[k]);
    ++evals;
  }
  std::vector<std::size_t> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> s2;
    std::vector<double> f2;
    for (auto i : order) {
      s2.push_back(s[i]);
      f2.push_back(fv[i]);
    }
    s.swap(s2);
    fv.swap(f2);
  };
  while (evals < max_evals) {
    sort_simplex();
    double size = 0.0;
    for (std::size_t k = 1; k <= n; ++k)
      for (std::size_t j = 0; j < n; ++j) size = std::max(size, std::abs(s[k][j] - s[0][j]));
    if (size < xtol) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += s[k][j] / static_cast<double>(n);
    auto along = [&](double coef) {
      std::vector<double> u(n);
      for (std::size_t j = 0; j < n; ++j) u[j] = centroid[j] + coef * (s[n][j] - centroid[j]);
      return u;
    };
    auto xr = along(-1.0);
    const double fr = f(xr);
    ++evals;
    if (fr < fv[0]) {
      auto xe = along(-2.0);
      const double fe = f(xe);
      ++evals;
      if (fe < fr) {
        s[n] = xe;
        fv[n] = fe;
      } else {
        s[n] = xr;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      s[n] = xr;
      fv[n] = fr;
    } else {
      const bool outside = fr < fv[n];
      auto xc = along(outside ? -0.5 : 0.5);
      const double fc = f(xc);
      ++evals;
      if (fc < std::min(fr, fv[n])) {
        s[n] = xc;
        fv[n] = fc;
      } else {
        for (std::size_t k = 1; k <= n; ++k) {
          for (std::size_t j = 0; j < n; ++j) s[k][j] = s[0][j] + 0.5 * (s[k][j] - s[0][j]);
          fv[k] = f(s[k]);
          ++evals;
        }
      }
    }
  }
  sort_simplex();
  return s[0];
}

}  // namespace

OptimizationResult optimize(const OptimizationProblem& p) {
  validate_problem(p);
  OptimizationResult res;
  BoxObjective f(p, res.trace);

  const std::size_t n = p.free_fields.size();
  std::vector<std::size_t> sizes(n, static_cast<std::size_t>(p.probe_points));
  std::vector<double> best_u;
  double best_obj = std::numeric_limits<double>::infinity();
  double least_dark = std::numeric_limits<double>::infinity();
  for_each_grid_point(sizes, [&](const std::vector<std::size_t>& idx) {
    std::vector<double> u(n);
    for (std::size_t k = 0; k < n; ++k)
      u[k] = static_cast<double>(idx[k]) / static_cast<double>(p.probe_points - 1);
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = BoxObjective::to_v(u[k]);
    const double obj = f(v);
    const auto& e = res.trace.back();
    if (e.valid) least_dark = std::min(least_dark, e.net_dark);
    if (e.feasible && obj < best_obj) {
      best_obj = obj;
      best_u = u;
    }
  });
  if (best_u.empty()) {
    std::ostringstream os;
    os << "optimize: infeasible, no probe point satisfies net dark count <= " << p.budget;
    if (std::isfinite(least_dark)) os << " (smallest valid value " << least_dark << ")";
    else os << " (no probe point passes the validity checks)";
    throw InfeasibleError(os.str());
  }

  int evals = static_cast<int>(res.trace.size());
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = BoxObjective::to_v(best_u[k]);
  v = nelder_mead(f, v, p.xtol, p.max_evaluations, evals);
  v = nelder_mead(f, v, p.xtol, p.max_evaluations, evals);  // restart from a fresh simplex

  const Evaluation* best = nullptr;
  for (const auto& e : res.trace)
    if (e.feasible && (!best || e.objective < best->objective)) best = &e;
  // exact re-check at the reported optimum
  res.best = evaluate(p, best->x);
  res.design = apply_free(p, res.best.x);
  res.budget = efficiency_budget(res.design);
  return res;
}

double local_improvement(const OptimizationProblem& p, const std::vector<double>& x) {
  const double base = evaluate(p, x).objective;
  double gain = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < x.size(); ++k) {
    for (double s : {0.99, 1.01}) {
      auto y = x;
      y[k] = std::clamp(x[k] * s, p.free_fields[k].lo, p.free_fields[k].hi);
      gain = std::max(gain, base - evaluate(p, y).objective);
    }
  }
  return gain;
}

std::vector<ParetoPoint> pareto_front(const OptimizationProblem& p, int grid_density) {
  validate_problem(p);
  if (grid_density < 1) throw ConfigError("pareto_front: grid_density must be at least 1");
  const std::size_t n = p.free_fields.size();
  std::vector<ParetoPoint> pts;
  for_each_grid_point(std::vector<std::size_t>(n, static_cast<std::size_t>(grid_density)),
                      [&](const std::vector<std::size_t>& idx) {
                        std::vector<double> x(n);
                        for (std::size_t k = 0; k < n; ++k) {
                          const auto& f = p.free_fields[k];
                          const double t = grid_density == 1 ? 0.0
                                                             : static_cast<double>(idx[k]) /
                                                                   static_cast<double>(grid_density - 1);
                          x[k] = f.lo + t * (f.hi - f.lo);
                        }
                        const auto e = evaluate(p, x);
                        if (!e.valid) return;
                        ParetoPoint pt;
                        pt.eta = e.eta;
                        pt.net_dark = e.net_dark;
                        pt.x = x;
                        pt.design = apply_free(p, x);
                        pts.push_back(std::move(pt));
                      });
  std::stable_sort(pts.begin(), pts.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
    if (a.eta != b.eta) return a.eta > b.eta;
    return a.net_dark < b.net_dark;
  });
  std::vector<ParetoPoint> front;
  double best_dark = std::numeric_limits<double>::infinity();
  for (auto& pt : pts) {
    if (pt.net_dark < best_dark) {
      best_dark = pt.net_dark;
      front.push_back(std::move(pt));
    }
  }
  return front;
}

nlohmann::json to_json(const Evaluation& e, const OptimizationProblem& p) {
  nlohmann::json x;
  for (std::size_t k = 0; k < e.x.size(); ++k) x[p.free_fields[k].field] = e.x[k];
  return {{"x", x},          {"objective", e.objective}, {"eta", e.eta},
          {"net_dark", e.net_dark}, {"valid", e.valid}, {"feasible", e.feasible}};
}

nlohmann::json to_json(const ParetoPoint& pt, const OptimizationProblem& p) {
  nlohmann::json x;
  for (std::size_t k = 0; k < pt.x.size(); ++k) x[p.free_fields[k].field] = pt.x[k];
  return {{"eta", pt.eta}, {"net_dark", pt.net_dark}, {"x", x}, {"design", design_to_json(pt.design)}};
}

}  // namespace vapordet
