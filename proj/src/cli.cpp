#include "calib/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "calib/controlled.hpp"
#include "calib/errors.hpp"
#include "calib/inference.hpp"
#include "calib/usual.hpp"
#include "calib/validation.hpp"

namespace calib {
namespace {

const char* model_name(ModelChoice m) {
  switch (m) {
    case ModelChoice::Usual: return "usual";
    case ModelChoice::ControlledUnknown: return "controlled_unknown";
    case ModelChoice::ControlledKnown: return "controlled_known";
  }
  return "unknown";
}

}  // namespace

void check_manifest(const RunManifest& m) {
  if (!(m.confidence_level > 0.0 && m.confidence_level < 1.0))
    throw InvalidLevel("confidence level must lie strictly between 0 and 1");
  if (m.model == ModelChoice::ControlledKnown) {
    if (!m.sigma_delta_sq)
      throw ValidationError("the known-delta model needs --sigma-delta-sq");
    if (!(*m.sigma_delta_sq >= 0.0))
      throw ValidationError("sigma_delta_sq must be >= 0");
  }
  if (!(m.solver.tol > 0.0))
    throw ValidationError("solver tolerance must be > 0");
  if (m.solver.max_iter < 1)
    throw ValidationError("solver iteration budget must be >= 1");
  if (!(m.solver.damping > 0.0 && m.solver.damping <= 1.0))
    throw ValidationError("solver damping must lie in (0, 1]");
}

std::vector<ReportRow> fit_rows(const RunManifest& m) {
  check_manifest(m);
  const CalibrationData data =
      read_calibration_csv(m.first_stage_path, m.second_stage_path, m.locale);
  const SufficientStats stats = summarize(data);
  const std::string model = model_name(m.model);

  std::vector<ReportRow> rows;
  auto add = [&](const char* quantity, double value) {
    rows.push_back({model, quantity, "", value});
  };
  auto add_formula = [&](VarianceFormula f, double variance) {
    rows.push_back({model, "variance", to_string(f), variance});
    rows.push_back({model, "amplitude", to_string(f),
                    interval_amplitude(variance, m.confidence_level)});
  };

  switch (m.model) {
    case ModelChoice::Usual: {
      const UsualFit f = fit_usual(stats);
      add("alpha_hat", f.alpha_hat);
      add("beta_hat", f.beta_hat);
      add("x0_hat", f.x0_hat);
      add("sigma_eps_sq_hat", f.sigma_eps_sq_hat);
      const UsualParams p{f.alpha_hat, f.beta_hat, f.x0_hat,
                          f.sigma_eps_sq_hat};
      add_formula(VarianceFormula::V1_Usual, variance_v1_usual(p, stats));
      add_formula(VarianceFormula::V2_Usual, variance_v2_usual(p, stats));
      break;
    }
    case ModelChoice::ControlledUnknown: {
      const ControlledFit f = fit_unknown_delta(stats);
      add("alpha_hat", f.alpha_hat);
      add("beta_hat", f.beta_hat);
      add("x0_hat", f.x0_hat);
      add("sigma_eps_sq_hat", f.sigma_eps_sq_hat);
      add("sigma_delta_sq_hat", f.sigma_delta_sq_hat);
      add("gamma_hat", f.gamma_hat);
      const ControlledParams p{f.alpha_hat, f.beta_hat, f.x0_hat,
                               f.sigma_delta_sq_hat, f.sigma_eps_sq_hat};
      add_formula(VarianceFormula::V1_Controlled,
                  variance_v1_controlled(p, stats));
      add_formula(VarianceFormula::V2_Controlled,
                  variance_v2_controlled(p, stats));
      break;
    }
    case ModelChoice::ControlledKnown: {
      const ControlledFit f =
          fit_known_delta(stats, *m.sigma_delta_sq, m.solver);
      add("alpha_hat", f.alpha_hat);
      add("beta_hat", f.beta_hat);
      add("x0_hat", f.x0_hat);
      add("sigma_eps_sq_hat", f.sigma_eps_sq_hat);
      add("gamma_hat", f.gamma_hat);
      const ControlledParams p{f.alpha_hat, f.beta_hat, f.x0_hat,
                               *m.sigma_delta_sq, f.sigma_eps_sq_hat};
      add_formula(VarianceFormula::V_KnownDelta,
                  variance_known_delta(p, stats));
      break;
    }
  }
  return rows;
}

namespace {

void write_fit_csv(const std::vector<ReportRow>& rows, std::ostream& out) {
  out << "model,quantity,formula,value\n";
  for (const ReportRow& r : rows)
    out << r.model << ',' << r.quantity << ',' << r.formula << ','
        << format_full(r.value) << '\n';
}

void write_fit_json(const std::vector<ReportRow>& rows, std::ostream& out) {
  for (const ReportRow& r : rows) {
    nlohmann::json j;
    j["model"] = r.model;
    j["quantity"] = r.quantity;
    if (r.formula.empty())
      j["formula"] = nullptr;
    else
      j["formula"] = r.formula;
    j["value"] = r.value;
    out << j.dump() << '\n';
  }
}

void write_fit_table(const std::vector<ReportRow>& rows, std::ostream& out) {
  std::size_t wq = 8, wf = 7;
  for (const ReportRow& r : rows) {
    wq = std::max(wq, r.quantity.size());
    wf = std::max(wf, r.formula.size());
  }
  auto pad = [&](const std::string& s, std::size_t w) {
    out << s << std::string(w - s.size() + 2, ' ');
  };
  pad("quantity", wq);
  pad("formula", wf);
  out << "value\n";
  for (const ReportRow& r : rows) {
    pad(r.quantity, wq);
    pad(r.formula, wf);
    out << format_display(r.value) << '\n';
  }
}

// One summary CSV row: a (cell, estimator, formula) triple.
struct SimRow {
  const SimConfig* cfg;
  const EstimatorSummary* est;
  const FormulaSummary* formula;
};

std::vector<SimRow> flatten(const std::vector<SimSummary>& results) {
  std::vector<SimRow> rows;
  for (const SimSummary& cell : results)
    for (const EstimatorSummary& es : cell.estimators)
      for (const FormulaSummary& fs : es.formulas)
        rows.push_back({&cell.config, &es, &fs});
  return rows;
}

void write_sim_csv(const std::vector<SimSummary>& results, std::ostream& out) {
  out << "n,k,x0_true,alpha_true,beta_true,sigma_eps_sq,sigma_delta_sq,"
         "replications,seed,estimator,formula,n_failed,n_degenerate,"
         "empirical_bias,empirical_mse,mean_estimated_variance,"
         "theoretical_variance,coverage_pct,mean_amplitude\n";
  for (const SimRow& r : flatten(results)) {
    const SimConfig& c = *r.cfg;
    out << c.n << ',' << c.k << ',' << format_full(c.x0_true) << ','
        << format_full(c.alpha_true) << ',' << format_full(c.beta_true) << ','
        << format_full(c.sigma_eps_sq) << ',' << format_full(c.sigma_delta_sq)
        << ',' << c.replications << ',' << c.seed << ','
        << to_string(r.est->estimator) << ',' << to_string(r.formula->formula)
        << ',' << r.est->n_failed << ',' << r.formula->n_degenerate << ','
        << format_full(r.est->empirical_bias) << ','
        << format_full(r.est->empirical_mse) << ','
        << format_full(r.formula->mean_estimated_variance) << ','
        << format_full(r.formula->theoretical_variance) << ','
        << format_full(r.formula->coverage_pct) << ','
        << format_full(r.formula->mean_amplitude) << '\n';
  }
}

void write_sim_json(const std::vector<SimSummary>& results,
                    std::ostream& out) {
  for (const SimRow& r : flatten(results)) {
    const SimConfig& c = *r.cfg;
    nlohmann::json j;
    j["n"] = c.n;
    j["k"] = c.k;
    j["x0_true"] = c.x0_true;
    j["alpha_true"] = c.alpha_true;
    j["beta_true"] = c.beta_true;
    j["sigma_eps_sq"] = c.sigma_eps_sq;
    j["sigma_delta_sq"] = c.sigma_delta_sq;
    j["replications"] = c.replications;
    j["seed"] = c.seed;
    j["estimator"] = to_string(r.est->estimator);
    j["formula"] = to_string(r.formula->formula);
    j["n_failed"] = r.est->n_failed;
    j["n_degenerate"] = r.formula->n_degenerate;
    j["empirical_bias"] = r.est->empirical_bias;
    j["empirical_mse"] = r.est->empirical_mse;
    j["mean_estimated_variance"] = r.formula->mean_estimated_variance;
    j["theoretical_variance"] = r.formula->theoretical_variance;
    j["coverage_pct"] = r.formula->coverage_pct;
    j["mean_amplitude"] = r.formula->mean_amplitude;
    out << j.dump() << '\n';
  }
}

void write_sim_table(const std::vector<SimSummary>& results,
                     std::ostream& out) {
  for (const SimSummary& cell : results) {
    const SimConfig& c = cell.config;
    char head[160];
    std::snprintf(head, sizeof head,
                  "n=%zu k=%zu x0=%s sigma_delta_sq=%s  (replications=%zu "
                  "seed=%llu)\n",
                  c.n, c.k, format_display(c.x0_true).c_str(),
                  format_display(c.sigma_delta_sq).c_str(), c.replications,
                  static_cast<unsigned long long>(c.seed));
    out << head;
    out << "  estimator         formula        bias      mse       mean_var  "
           "theo_var  cov%    amplitude  failed\n";
    for (const EstimatorSummary& es : cell.estimators)
      for (const FormulaSummary& fs : es.formulas) {
        char line[200];
        std::snprintf(line, sizeof line,
                      "  %-17s %-14s %-9s %-9s %-9s %-9s %-7s %-10s %zu\n",
                      to_string(es.estimator).c_str(),
                      to_string(fs.formula).c_str(),
                      format_display(es.empirical_bias).c_str(),
                      format_display(es.empirical_mse).c_str(),
                      format_display(fs.mean_estimated_variance).c_str(),
                      format_display(fs.theoretical_variance).c_str(),
                      format_display(fs.coverage_pct).c_str(),
                      format_display(fs.mean_amplitude).c_str(), es.n_failed);
        out << line;
      }
    out << '\n';
  }
}

// --- grid config -----------------------------------------------------------

double grid_double(const std::string& value, const std::filesystem::path& path,
                   std::size_t row) {
  double v = 0.0;
  const char* first = value.data();
  const char* last = first + value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last)
    throw ParseError(path.string() + ": malformed number '" + value + "'", row,
                     1);
  return v;
}

std::uint64_t grid_u64(const std::string& value,
                       const std::filesystem::path& path, std::size_t row) {
  std::uint64_t v = 0;
  const char* first = value.data();
  const char* last = first + value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last)
    throw ParseError(path.string() + ": malformed count '" + value + "'", row,
                     1);
  return v;
}

std::string grid_trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r'))
    --e;
  return s.substr(b, e - b);
}

std::vector<std::string> grid_list(const std::string& value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= value.size(); ++i) {
    if (i == value.size() || value[i] == ',') {
      out.push_back(grid_trim(value.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace

std::vector<SimConfig> parse_grid_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'", 0, 0);

  struct Entry {
    std::string value;
    std::size_t row;
  };
  std::map<std::string, Entry> kv;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (row == 1 && line.size() >= 3 && line[0] == '\xEF' &&
        line[1] == '\xBB' && line[2] == '\xBF')
      line.erase(0, 3);
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = grid_trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(path.string() + ": expected 'key = value'", row, 1);
    const std::string key = grid_trim(line.substr(0, eq));
    const std::string value = grid_trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ParseError(path.string() + ": expected 'key = value'", row, 1);
    if (!kv.emplace(key, Entry{value, row}).second)
      throw ParseError(path.string() + ": duplicate key '" + key + "'", row,
                       1);
  }

  static const char* const known_keys[] = {
      "alpha", "beta",         "sigma_eps_sq", "confidence_level",
      "replications", "seed",  "estimators",   "n",
      "k",     "x0",           "sigma_delta_sq"};
  for (const auto& [key, entry] : kv)
    if (std::find_if(std::begin(known_keys), std::end(known_keys),
                     [&](const char* k) { return key == k; }) ==
        std::end(known_keys))
      throw ParseError(path.string() + ": unknown key '" + key + "'",
                       entry.row, 1);
  for (const char* key :
       {"alpha", "beta", "sigma_eps_sq", "replications", "seed", "estimators",
        "n", "k", "x0", "sigma_delta_sq"})
    if (!kv.count(key))
      throw ParseError(path.string() + ": missing key '" + std::string(key) +
                           "'",
                       0, 0);

  auto scalar = [&](const char* key) {
    const Entry& e = kv.at(key);
    return grid_double(e.value, path, e.row);
  };
  auto count_list = [&](const char* key) {
    const Entry& e = kv.at(key);
    std::vector<std::size_t> out;
    for (const std::string& tok : grid_list(e.value))
      out.push_back(static_cast<std::size_t>(grid_u64(tok, path, e.row)));
    return out;
  };
  auto double_list = [&](const char* key) {
    const Entry& e = kv.at(key);
    std::vector<double> out;
    for (const std::string& tok : grid_list(e.value))
      out.push_back(grid_double(tok, path, e.row));
    return out;
  };

  SimConfig base;
  base.alpha_true = scalar("alpha");
  base.beta_true = scalar("beta");
  base.sigma_eps_sq = scalar("sigma_eps_sq");
  if (kv.count("confidence_level"))
    base.confidence_level = scalar("confidence_level");
  base.replications =
      static_cast<std::size_t>(grid_u64(kv.at("replications").value, path,
                                        kv.at("replications").row));
  base.seed = grid_u64(kv.at("seed").value, path, kv.at("seed").row);
  {
    const Entry& e = kv.at("estimators");
    for (const std::string& tok : grid_list(e.value)) {
      if (tok == "usual")
        base.estimators.insert(Estimator::UsualM);
      else if (tok == "unknown")
        base.estimators.insert(Estimator::ProposedUnknown);
      else if (tok == "known")
        base.estimators.insert(Estimator::ProposedKnown);
      else
        throw ParseError(path.string() + ": unknown estimator '" + tok +
                             "' (expected usual, unknown, known)",
                         e.row, 1);
    }
  }

  const auto ns = count_list("n");
  const auto ks = count_list("k");
  const auto x0s = double_list("x0");
  const auto sd2s = double_list("sigma_delta_sq");

  std::vector<SimConfig> cells;
  cells.reserve(ns.size() * ks.size() * x0s.size() * sd2s.size());
  for (double sd2 : sd2s)
    for (double x0 : x0s)
      for (std::size_t n : ns)
        for (std::size_t k : ks) {
          SimConfig c = base;
          c.sigma_delta_sq = sd2;
          c.x0_true = x0;
          c.n = n;
          c.k = k;
          cells.push_back(c);
        }
  return cells;
}

int fit_command(const RunManifest& m, std::ostream& out) {
  const std::vector<ReportRow> rows = fit_rows(m);
  switch (m.format) {
    case OutputFormat::Csv: write_fit_csv(rows, out); break;
    case OutputFormat::JsonLines: write_fit_json(rows, out); break;
    case OutputFormat::PrettyTable: write_fit_table(rows, out); break;
  }
  return 0;
}

int simulate_command(const RunManifest& m, std::ostream& out) {
  if (m.grid_path.empty())
    throw ValidationError("simulate needs a grid config (--grid)");
  std::vector<SimConfig> cells = parse_grid_config(m.grid_path);
  for (SimConfig& c : cells) {
    if (m.replications_override) c.replications = *m.replications_override;
    if (m.seed_override) c.seed = *m.seed_override;
  }
  const std::vector<SimSummary> results = run_grid(cells, m.threads);
  switch (m.format) {
    case OutputFormat::Csv: write_sim_csv(results, out); break;
    case OutputFormat::JsonLines: write_sim_json(results, out); break;
    case OutputFormat::PrettyTable: write_sim_table(results, out); break;
  }
  return 0;
}

int validate_command(const RunManifest& m, std::ostream& out) {
  const std::vector<CheckResult> checks =
      run_validation(m.fast, m.seed_override.value_or(17));
  std::size_t passed = 0;
  for (const CheckResult& c : checks) {
    out << (c.passed ? "PASS  " : "FAIL  ") << c.name;
    if (!c.detail.empty()) out << "  [" << c.detail << ']';
    out << '\n';
    passed += c.passed;
  }
  out << passed << '/' << checks.size() << " checks passed\n";
  return passed == checks.size() ? 0 : 4;
}

namespace {

int dispatch(const RunManifest& m) {
  std::ofstream file;
  if (!m.output_path.empty()) {
    file.open(m.output_path, std::ios::binary);
    if (!file)
      throw Error("cannot open output file '" + m.output_path.string() + "'");
  }
  std::ostream& out = m.output_path.empty() ? std::cout : file;
  switch (m.command) {
    case Command::Fit: return fit_command(m, out);
    case Command::Simulate: return simulate_command(m, out);
    case Command::Validate: return validate_command(m, out);
  }
  return 4;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{
      "Two-stage linear calibration: model fits with uncertainty reports, "
      "a Monte Carlo study harness, and a self-validation suite."};
  app.require_subcommand(1);

  RunManifest m;
  std::string first, second, model = "usual", locale = "point",
                             format = "csv", out_path, grid;
  double sigma_delta_sq = 0.0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;

  CLI::App* fit = app.add_subcommand(
      "fit", "Fit a calibration model to CSV data and report uncertainty");
  fit->add_option("--first", first, "First-stage CSV (header x,y)")
      ->required();
  fit->add_option("--second", second, "Second-stage CSV (header y0)")
      ->required();
  fit->add_option("--model", model, "Model: usual, unknown, known")
      ->check(CLI::IsMember({"usual", "unknown", "known"}));
  CLI::Option* sd_opt = fit->add_option(
      "--sigma-delta-sq", sigma_delta_sq,
      "Known control-error variance (required with --model known)");
  fit->add_option("--level", m.confidence_level, "Confidence level (0,1)");
  fit->add_option("--locale", locale, "Input number style: point, comma")
      ->check(CLI::IsMember({"point", "comma"}));
  fit->add_option("--format", format, "Output: csv, json, table")
      ->check(CLI::IsMember({"csv", "json", "table"}));
  fit->add_option("--out", out_path, "Output file (default stdout)");
  fit->add_option("--tol", m.solver.tol, "Solver scaled-residual tolerance");
  fit->add_option("--max-iter", m.solver.max_iter, "Solver iteration budget");
  fit->add_option("--damping", m.solver.damping,
                  "Solver step-halving factor in (0,1]");

  CLI::App* sim = app.add_subcommand(
      "simulate", "Run a Monte Carlo study over a grid config");
  sim->add_option("--grid", grid, "Grid config file (key = value lines)")
      ->required();
  CLI::Option* reps_opt =
      sim->add_option("--reps", reps, "Override replications per cell");
  CLI::Option* seed_opt = sim->add_option("--seed", seed, "Override RNG seed");
  sim->add_option("--threads", m.threads,
                  "Worker threads (0 = hardware concurrency)");
  sim->add_option("--format", format, "Output: csv, json, table")
      ->check(CLI::IsMember({"csv", "json", "table"}));
  sim->add_option("--out", out_path, "Output file (default stdout)");

  CLI::App* val =
      app.add_subcommand("validate", "Run the built-in self-check suite");
  val->add_flag("--fast", m.fast, "Skip the Monte Carlo checks");
  CLI::Option* vseed_opt =
      val->add_option("--seed", seed, "Seed for the check suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (fit->parsed()) {
    m.command = Command::Fit;
    m.first_stage_path = first;
    m.second_stage_path = second;
    m.model = model == "usual" ? ModelChoice::Usual
              : model == "unknown" ? ModelChoice::ControlledUnknown
                                   : ModelChoice::ControlledKnown;
    if (sd_opt->count()) m.sigma_delta_sq = sigma_delta_sq;
    m.locale = locale == "comma" ? Locale::Comma : Locale::Point;
  } else if (sim->parsed()) {
    m.command = Command::Simulate;
    m.grid_path = grid;
    if (reps_opt->count()) m.replications_override = reps;
    if (seed_opt->count()) m.seed_override = seed;
  } else {
    m.command = Command::Validate;
    if (vseed_opt->count()) m.seed_override = seed;
  }
  m.format = format == "json" ? OutputFormat::JsonLines
             : format == "table" ? OutputFormat::PrettyTable
                                 : OutputFormat::Csv;
  m.output_path = out_path;

  try {
    return dispatch(m);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}

}  // namespace calib
