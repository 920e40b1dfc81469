#include "critlab/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <json.hpp>
#include <ostream>
#include <set>
#include <sstream>

#include "critlab/asymptotics.hpp"
#include "critlab/branching_model.hpp"
#include "critlab/catalog.hpp"
#include "critlab/error.hpp"
#include "critlab/numeric.hpp"

namespace critlab::harness {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end || !std::isfinite(x))
    throw ConfigError(key, "expected a finite number, got '" + v + "'");
  return x;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  // accept 1e6-style integers too
  std::uint64_t n = 0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, n);
  if (ec == std::errc() && p == end) return n;
  const double x = to_double(key, v);
  if (!(x >= 0.0) || x != std::floor(x) || x > 1.8e19)
    throw ConfigError(key, "expected a non-negative integer, got '" + v + "'");
  return static_cast<std::uint64_t>(x);
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

void check_increasing(const std::string& key, const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) throw ConfigError(key, "values must be strictly increasing");
}

void apply(ExperimentConfig& c, const std::string& key, const std::string& v) {
  if (key == "experiment") {
    if (v.empty() || v.find_first_of(",\"\n") != std::string::npos)
      throw ConfigError(key, "must be non-empty and contain no commas or quotes");
    c.experiment = v;
  } else if (key == "family") {
    c.model.family = family_from_string(v);
  } else if (key == "nu") {
    c.model.nu = to_double(key, v);
  } else if (key == "a0") {
    c.model.a0 = to_double(key, v);
  } else if (key == "t_min") {
    c.t_min = to_double(key, v);
  } else if (key == "t_max") {
    c.t_max = to_double(key, v);
  } else if (key == "t_points") {
    c.t_points = to_uint(key, v);
  } else if (key == "t_list") {
    c.t_list = to_list(key, v);
  } else if (key == "s_list") {
    c.s_list = to_list(key, v);
  } else if (key == "theta_min") {
    c.theta_min = to_double(key, v);
  } else if (key == "theta_max") {
    c.theta_max = to_double(key, v);
  } else if (key == "theta_points") {
    c.theta_points = to_uint(key, v);
  } else if (key == "mc_n") {
    c.mc_n = to_uint(key, v);
  } else if (key == "seed") {
    c.seed = to_uint(key, v);
  } else if (key == "rel_tol") {
    c.solve.rel_tol = to_double(key, v);
  } else if (key == "abs_tol") {
    c.solve.abs_tol = to_double(key, v);
  } else if (key == "max_step") {
    c.solve.max_step = to_double(key, v);
  } else if (key == "method") {
    c.solve.method = v;
  } else if (key == "series_J") {
    c.series_J = to_uint(key, v);
  } else if (key == "jmax") {
    c.jmax = to_uint(key, v);
  } else if (key == "population_cap") {
    c.population_cap = to_uint(key, v);
  } else if (key == "i0") {
    c.i0 = to_uint(key, v);
  } else if (key == "process") {
    if (v == "branching")
      c.process = ProcessKind::Branching;
    else if (v == "qprocess")
      c.process = ProcessKind::QProcess;
    else
      throw ConfigError(key, "expected branching or qprocess, got '" + v + "'");
  } else if (key == "out_dir") {
    c.out_dir = v;
  } else if (key == "dump_trajectories") {
    c.dump_trajectories = to_uint(key, v);
  } else if (key.starts_with("band.") || key.starts_with("t_eval.")) {
    const auto tag = key.substr(key.find('.') + 1);
    if (!tags::known(tag)) throw ConfigError(key, "unknown formula tag '" + tag + "'");
    c.overrides[key] = to_double(key, v);
  } else {
    throw ConfigError(key, "unknown key");
  }
}

}  // namespace

std::vector<double> ExperimentConfig::t_grid() const {
  if (!t_list.empty()) return t_list;
  if (t_points == 1) return {t_min};
  return numeric::log_grid(t_min, t_max, t_points);
}

std::vector<double> ExperimentConfig::theta_grid() const {
  return numeric::log_grid(theta_min, theta_max, theta_points);
}

void ExperimentConfig::validate() const {
  if (model.family != Family::BinarySplitBaseline && !(model.nu > 0.0 && model.nu < 1.0))
    throw ConfigError("nu", "must lie in (0,1)");
  if (!(model.a0 > 0.0)) throw ConfigError("a0", "must be > 0");
  if (t_list.empty()) {
    if (!(t_min > 0.0)) throw ConfigError("t_min", "must be > 0");
    if (t_points == 0) throw ConfigError("t_points", "must be >= 1");
    if (t_points == 1 && t_max != t_min) throw ConfigError("t_points", "a single point needs t_min == t_max");
    if (t_points > 1 && !(t_max > t_min)) throw ConfigError("t_max", "must exceed t_min");
  } else {
    if (!(t_list.front() > 0.0)) throw ConfigError("t_list", "values must be > 0");
    check_increasing("t_list", t_list);
  }
  if (s_list.empty()) throw ConfigError("s_list", "must not be empty");
  check_increasing("s_list", s_list);
  for (double s : s_list)
    if (!(s >= 0.0 && s < 1.0)) throw ConfigError("s_list", "values must lie in [0,1)");
  if (!(theta_min > 0.0)) throw ConfigError("theta_min", "must be > 0");
  if (!(theta_max > theta_min)) throw ConfigError("theta_max", "must exceed theta_min");
  if (theta_points < 2) throw ConfigError("theta_points", "must be >= 2");
  if (mc_n == 0) throw ConfigError("mc_n", "must be >= 1");
  if (i0 == 0) throw ConfigError("i0", "must be >= 1");
  if (jmax == 0) throw ConfigError("jmax", "must be >= 1");
  if (population_cap == 0) throw ConfigError("population_cap", "must be >= 1");
  if (series_J != 0 && series_J < jmax) throw ConfigError("series_J", "must be 0 or >= jmax");
  try {
    solve.validate();
  } catch (const DomainError& e) {
    const std::string what = e.what();
    const std::string field = what.find("max_step") != std::string::npos ? "max_step"
                              : what.find("method") != std::string::npos ? "method"
                              : what.find("abs") != std::string::npos    ? "abs_tol"
                                                                         : "rel_tol";
    throw ConfigError(field, what);
  }
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  ExperimentConfig c;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const auto body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto loc = source + ":" + std::to_string(lineno) + ": ";
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("", loc + "expected 'key = value'");
    const auto key = trim(std::string_view(body).substr(0, eq));
    const auto value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError("", loc + "missing key");
    if (!seen.insert(key).second) throw ConfigError(key, loc + key + ": duplicate key");
    try {
      apply(c, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(key, loc + key + ": " + e.what());
    }
  }
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(e.field(), source + ": " + e.field() + ": " + e.what());
  }
  return c;
}

ExperimentConfig parse_config_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_config(in);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  auto c = parse_config(in, path);
  return c;
}

// --- CSV ----------------------------------------------------------------------

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string opt(const std::optional<double>& x) { return x ? format_double(*x) : std::string(); }

std::string short_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.equation << ',' << format_double(r.t) << ',' << format_double(r.exact) << ','
        << opt(r.predicted) << ',' << opt(r.normalized_error) << ',' << r.method << ',' << opt(r.std_error)
        << '\n';
  }
}

void write_csv_file(const std::string& path, const std::vector<ReportRow>& rows) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("out_dir", "cannot write '" + path + "'");
  write_csv(out, rows);
}

std::vector<ReportRow> read_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader)
    throw ConfigError("csv", source + ": missing or unexpected header");
  std::vector<ReportRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(trim(item));
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 8) throw ConfigError("csv", source + ":" + std::to_string(lineno) + ": expected 8 fields");
    auto num = [&](const std::string& v, const char* col) {
      try {
        return to_double(col, v);
      } catch (const ConfigError& e) {
        throw ConfigError("csv", source + ":" + std::to_string(lineno) + ": " + col + ": " + e.what());
      }
    };
    auto onum = [&](const std::string& v, const char* col) -> std::optional<double> {
      if (v.empty()) return std::nullopt;
      return num(v, col);
    };
    ReportRow r;
    r.experiment = f[0];
    r.equation = f[1];
    r.t = num(f[2], "t");
    r.exact = num(f[3], "exact");
    r.predicted = onum(f[4], "predicted");
    r.normalized_error = onum(f[5], "normalized_error");
    r.method = f[6];
    r.std_error = onum(f[7], "stderr");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ReportSummary> summarize(const std::vector<ReportRow>& rows) {
  std::map<std::tuple<std::string, std::string, std::string>, ReportSummary> acc;
  for (const auto& r : rows) {
    auto& s = acc[{r.experiment, r.equation, r.method}];
    s.experiment = r.experiment;
    s.equation = r.equation;
    s.method = r.method;
    ++s.rows;
    if (r.normalized_error) {
      const double e = *r.normalized_error;
      if (s.with_error == 0) s.min_error = s.max_error = e;
      s.min_error = std::min(s.min_error, e);
      s.max_error = std::max(s.max_error, e);
      ++s.with_error;
    }
  }
  std::vector<ReportSummary> out;
  for (auto& [k, v] : acc) out.push_back(v);
  return out;
}

// --- solve --------------------------------------------------------------------

namespace {

struct Survival {
  double value;
  const char* method;
};

Survival survival(const ScaleFunction& sf, double y, double t, const SolveConfig& cfg) {
  if (t > kOracleHorizon)
    if (auto ex = exact_R_c(sf, y, t)) return {*ex, "oracle"};
  return {solve_R_c(sf, y, t, cfg), "ode"};
}

std::string a0_form(const ScaleFunction& sf, std::string_view log_tag, std::string_view other) {
  return std::string(sf.family() == Family::DeltaEqualsLambda ? log_tag : other);
}

// Predictions need the normalizer, which has no solution while
// (nu t)^{1/nu} is below its scale; the row then carries no prediction.
template <class F>
auto attempt(F&& f) -> std::optional<decltype(f())> {
  try {
    return f();
  } catch (const NumericalError&) {
    return std::nullopt;
  }
}

}  // namespace

std::vector<ReportRow> solve_rows(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto sf = make_scale_function(cfg.model);
  const double nu = sf.nu();
  std::vector<ReportRow> rows;
  for (double t : cfg.t_grid()) {
    for (double s : cfg.s_list) {
      const std::string exp = cfg.experiment + ":s=" + short_num(s);
      const auto R = survival(sf, 1.0 - s, t, cfg.solve);
      ReportRow r{exp, "", t, R.value, {}, {}, R.method, {}};
      if (s == 0.0 && t >= 1.0) {
        r.equation = a0_form(sf, tags::kSurvivalLog, tags::kSurvivalMho);
        if (const auto p = attempt([&] { return predict_q(sf, t, CorrectionForm::Auto, cfg.solve); })) {
          r.predicted = p->value();
          r.normalized_error = p->normalized_error(R.value);
        }
      } else {
        r.equation = tags::kLeadingR;
        if (const auto N = attempt([&] { return solve_normalizer(sf, t); })) {
          const double leading = N->value / std::pow(nu * t, 1.0 / nu);
          r.predicted = leading;
          r.normalized_error = (R.value / leading - 1.0) * t;
        }
      }
      rows.push_back(std::move(r));

      if (s > 0.0) {
        const double G = G_of(sf, s, t, cfg.solve) * p11_scale(sf, t);
        ReportRow g{exp, std::string(tags::kGFunction), t, G, {}, {}, R.method, {}};
        if (t >= 1.0) {
          g.equation = a0_form(sf, tags::kGLog, tags::kGLeading);
          if (const auto p = attempt([&] { return predict_G(sf, s, t); })) {
            g.predicted = p->value();
            g.normalized_error = p->normalized_error(G);
          }
        }
        rows.push_back(std::move(g));
      }
    }
    if (cfg.series_J > 0) {
      const auto st = evolve_series(sf, cfg.series_J, t, cfg.solve);
      const double P11 = st.coeffs[1] * p11_scale(sf, t);
      ReportRow r{cfg.experiment + ":P11", std::string(tags::kConvolution), t, P11, {}, {}, "ode", {}};
      if (t >= 1.0) {
        r.equation = a0_form(sf, tags::kP11Log, tags::kP11Mho);
        if (const auto p = attempt([&] { return predict_p11(sf, t, CorrectionForm::Auto, cfg.solve); })) {
          r.predicted = p->value();
          r.normalized_error = p->normalized_error(P11);
        }
      }
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

// --- simulate -----------------------------------------------------------------

std::vector<ReportRow> simulate_rows(const ExperimentConfig& cfg, std::ostream* trajectories) {
  cfg.validate();
  if (!cfg.seed) throw ConfigError("seed", "Monte Carlo runs need an explicit seed");
  const auto sf = make_scale_function(cfg.model);
  const OffspringDistribution dist(sf);
  const auto grid = cfg.t_grid();

  MCConfig mc;
  mc.n = cfg.mc_n;
  mc.seed = *cfg.seed;
  mc.i0 = cfg.i0;
  mc.sim.population_cap = cfg.population_cap;
  const auto run = run_grid(cfg.process, dist, grid, mc);

  std::optional<SeriesState> st;
  std::vector<ReportRow> rows;
  const bool q = cfg.process == ProcessKind::QProcess;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double t = grid[g];
    if (cfg.series_J > 0) st = evolve_series(sf, cfg.series_J, t, cfg.solve);
    if (!q) {
      const auto est = survival_estimates(run)[g];
      const double qt = survival(sf, 1.0, t, cfg.solve).value;
      const double pred = -std::expm1(static_cast<double>(cfg.i0) * std::log1p(-qt));
      ReportRow r{cfg.experiment + ":survival", std::string(tags::kMonteCarlo), t, est.value, pred, {}, "mc",
                  est.std_error};
      if (est.std_error > 0.0) r.normalized_error = (est.value - pred) / est.std_error;
      rows.push_back(std::move(r));
    }
    const auto cells = cell_estimates(run, g, cfg.jmax);
    std::vector<double> engine;
    if (st) {
      if (q)
        engine = q_matrix(*st, cfg.i0, cfg.jmax).q[cfg.i0 - 1];
      else
        engine = transition_row(*st, static_cast<unsigned>(cfg.i0), cfg.jmax);
    }
    for (std::size_t j = q ? 1 : 0; j <= cfg.jmax; ++j) {
      ReportRow r{cfg.experiment + (q ? ":P(W=" : ":P(Z=") + std::to_string(j) + ")",
                  std::string(tags::kMonteCarlo), t, cells[j].value, {}, {}, "mc", cells[j].std_error};
      if (!engine.empty()) {
        r.predicted = engine[j];
        if (cells[j].std_error > 0.0) r.normalized_error = (cells[j].value - engine[j]) / cells[j].std_error;
      }
      rows.push_back(std::move(r));
    }
  }

  if (trajectories && cfg.dump_trajectories > 0) {
    // chunk 0 replays the first paths of the run exactly
    const auto k = std::min({cfg.dump_trajectories, cfg.mc_n, mc.chunk});
    Rng rng = chunk_rng(*cfg.seed, 0);
    SimOptions so;
    so.population_cap = cfg.population_cap;
    so.record_path = true;
    for (std::size_t p = 0; p < k; ++p) {
      const auto tr = q ? simulate_qprocess(dist, cfg.i0, grid.back(), rng, so)
                        : simulate_mbp(dist, cfg.i0, grid.back(), rng, so);
      nlohmann::json j;
      j["experiment"] = cfg.experiment;
      j["process"] = q ? "qprocess" : "branching";
      j["seed"] = *cfg.seed;
      j["path"] = p;
      j["horizon"] = tr.horizon;
      j["times"] = tr.times;
      j["sizes"] = tr.sizes;
      j["extinction_time"] = tr.extinct() ? nlohmann::json(tr.extinction_time) : nlohmann::json(nullptr);
      j["censored"] = tr.censored;
      *trajectories << j.dump() << '\n';
    }
  }
  return rows;
}

// --- rates --------------------------------------------------------------------

std::vector<RateRow> rate_rows(const ExperimentConfig& cfg, std::vector<ReportRow>* records) {
  cfg.validate();
  const auto sf = make_scale_function(cfg.model);
  const double nu = sf.nu(), a0 = sf.a0();
  std::vector<double> ts;
  for (double t : cfg.t_grid())
    if (t >= 100.0) ts.push_back(t);
  if (ts.size() < 5 || ts.back() / ts.front() < 100.0 * (1 - 1e-12))
    throw ConfigError("t_max", "rate fits need at least 5 grid points with t >= 100 spanning two decades");

  const bool logform = sf.family() == Family::DeltaEqualsLambda;
  const auto axis = logform ? RateAxis::LogTOverT : RateAxis::LogT;
  const std::string axis_name = logform ? "log_t_over_t" : "log_t";
  std::vector<RateRow> out;

  auto fit = [&](const std::string& quantity, const std::string& eq, const std::vector<double>& res,
                 std::optional<double> expected) {
    const auto f = fit_rate(ts, res, axis);
    out.push_back({quantity, eq, axis_name, f.slope, f.intercept, f.r2, f.unit_slope_constant, expected,
                   f.accepted});
  };

  {
    std::vector<double> res;
    std::string eq;
    for (double t : ts) {
      const auto p = predict_q(sf, t, CorrectionForm::Auto, cfg.solve);
      const auto ex = survival(sf, 1.0, t, cfg.solve);
      res.push_back(ex.value / p.leading - 1.0);
      eq = p.formula;
      if (records) records->push_back({cfg.experiment + ":q", eq, t, ex.value, p.value(), p.normalized_error(ex.value), ex.method, {}});
    }
    fit("q", eq, res, logform ? 1.0 / (nu * nu * nu) : 1.0 / (a0 * nu * nu));
  }
  {
    std::vector<double> res;
    std::string eq;
    for (double t : ts) {
      const auto p = predict_p11(sf, t, CorrectionForm::Auto, cfg.solve);
      const auto ex = survival(sf, 1.0, t, cfg.solve);
      const double scaled = ex.value * sf.Lambda(ex.value) / a0 * p11_scale(sf, t);
      res.push_back(scaled / p.leading - 1.0);
      eq = p.formula;
      if (records) records->push_back({cfg.experiment + ":P11", eq, t, scaled, p.value(), p.normalized_error(scaled), ex.method, {}});
    }
    fit("P11", eq, res, logform ? (1.0 + nu) / (nu * nu * nu) : (1.0 + nu) / (a0 * nu * nu));
  }
  if (sf.family() != Family::BinarySplitBaseline) {
    const auto rep = baseline_checks(sf, ts, 0.0, cfg.solve);
    std::vector<double> res;
    for (const auto& r : rep.records) {
      res.push_back(r.residual);
      if (records) records->push_back({cfg.experiment + ":zolotarev", rep.equation, r.t, r.exact, r.predicted, r.residual, rep.method, {}});
    }
    fit("zolotarev", rep.equation, res, logform ? 1.0 / (nu * nu) : 1.0 / (a0 * nu));
  }
  return out;
}

void write_rates_csv(std::ostream& out, const std::vector<RateRow>& rows) {
  out << "quantity,equation,axis,slope,intercept,r2,constant,expected_constant,accepted\n";
  for (const auto& r : rows)
    out << r.quantity << ',' << r.equation << ',' << r.axis << ',' << format_double(r.slope) << ','
        << format_double(r.intercept) << ',' << format_double(r.r2) << ',' << format_double(r.constant) << ','
        << opt(r.expected_constant) << ',' << (r.accepted ? "true" : "false") << '\n';
}

}  // namespace critlab::harness
