#include "l1trend/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "l1trend/calibration.hpp"
#include "l1trend/error.hpp"
#include "l1trend/filters.hpp"
#include "l1trend/series.hpp"
#include "l1trend/strategy.hpp"
#include "l1trend/synth.hpp"

namespace l1trend {
namespace {

using json = nlohmann::ordered_json;

// Writes to `path`, or to `fallback` when the path is "-".
void emit(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& body) {
  if (path.empty()) return;
  if (path == "-") {
    body(fallback);
    return;
  }
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path);
  body(f);
  if (!f) throw DataError("write failed: " + path);
}

void emit_json(const std::string& path, std::ostream& fallback, const json& doc) {
  emit(path, fallback, [&](std::ostream& o) { o << doc.dump(2) << '\n'; });
}

json times_json(const Series& s, std::span<const std::size_t> idx) {
  json a = json::array();
  for (auto i : idx) a.push_back(format_time(s, i));
  return a;
}

json diagnostics_json(const SolverDiagnostics& d) {
  return {{"iterations", d.iterations},
          {"duality_gap", d.duality_gap},
          {"kkt_residual", d.kkt_residual},
          {"converged", d.converged}};
}

json cv_json(const CVReport& r, const Series& s) {
  json j;
  j["lambda_star"] = r.lambda_star;
  j["best_index"] = r.best_index;
  j["grid"] = r.grid;
  j["errors"] = r.errors;
  j["fold_errors"] = r.fold_errors;
  j["window_lambda_max"] = r.window_lambda_max;
  j["lambda_mean"] = r.lambda_mean;
  j["lambda_std"] = r.lambda_std;
  j["grid_lower"] = r.grid_lower;
  j["grid_upper"] = r.grid_upper;
  j["fit_start"] = format_time(s, r.fit_offset);
  j["fit_diagnostics"] = diagnostics_json(r.fit.diagnostics);
  return j;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

// Expands `--config FILE` into the equivalent flags, placed right after the
// subcommand so that flags given on the command line override them.
std::vector<std::string> expand_config(const CLI::App& app, std::vector<std::string> args) {
  std::size_t sub = 1;
  while (sub < args.size() && !app.get_subcommand_no_throw(args[sub])) ++sub;
  if (sub == args.size()) return args;
  const CLI::App* cmd = app.get_subcommand_no_throw(args[sub]);

  std::vector<std::string> files;
  for (std::size_t i = sub + 1; i < args.size();) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      files.push_back(args[i + 1]);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
    } else if (args[i].rfind("--config=", 0) == 0) {
      files.push_back(args[i].substr(9));
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  std::vector<std::string> injected;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open config file " + file);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      line = trim(line);
      if (line.empty() || line[0] == '#' || line[0] == ';') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw InvalidArgument(file + ":" + std::to_string(lineno) + ": expected key = value");
      }
      const std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
        value = value.substr(1, value.size() - 2);
      }
      const CLI::Option* opt = key == "config" ? nullptr : cmd->get_option_no_throw("--" + key);
      if (!opt) throw InvalidArgument(file + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
      if (opt->get_expected_min() == 0) {
        if (value == "true" || value == "1") injected.push_back("--" + key);
        else if (value != "false" && value != "0") {
          throw InvalidArgument(file + ":" + std::to_string(lineno) + ": '" + key + "' takes true or false");
        }
      } else {
        injected.push_back("--" + key);
        injected.push_back(value);
      }
    }
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub + 1), injected.begin(), injected.end());
  return args;
}

void add_cv_options(CLI::App* app, CVConfig& cv) {
  app->add_option("--train-window", cv.train_window, "T1: training window")->capture_default_str();
  app->add_option("--test-window", cv.test_window, "T2: test window")->capture_default_str();
  app->add_option("--global-window", cv.global_window, "T3: global-trend window")->capture_default_str();
  app->add_option("--test-sets", cv.test_sets, "m: test windows for lambda_max statistics")->capture_default_str();
  app->add_option("--train-sets", cv.train_sets, "p: cross-validation folds")->capture_default_str();
  app->add_option("--grid", cv.grid_size, "lambda grid size")->capture_default_str();
}

void add_solver_options(CLI::App* app, IpmOptions& opt) {
  app->add_option("--tolerance", opt.tolerance, "interior-point tolerance")->capture_default_str();
  app->add_option("--max-iter", opt.max_iterations, "interior-point iteration cap")->capture_default_str();
}

// ---- filter ----

struct FilterArgs {
  std::string column;
  std::vector<std::string> inputs;
  std::string kind = "l1t";
  double lambda = 0.0, lambda1 = 0.0, lambda2 = 0.0, fraction = 0.0, break_tol = 0.0, hp_window = 0.0;
  int hp_order = 2;
  bool autocv = false;
  bool standardize = false;
  std::string output = "-";
  std::string report;
  CVConfig cv;
  IpmOptions solver;
  CLI::Option* o_lambda = nullptr;
  CLI::Option* o_lambda1 = nullptr;
  CLI::Option* o_lambda2 = nullptr;
  CLI::Option* o_fraction = nullptr;
  CLI::Option* o_break_tol = nullptr;
  CLI::Option* o_hp_window = nullptr;
};

json breaks_json(const FilterResult& r, int order, const Series& s, const FilterArgs& a) {
  std::optional<double> tol;
  if (a.o_break_tol->count()) tol = a.break_tol;
  const auto idx = detect_breaks(r, order, tol);
  return {{"order", order},
          {"count", idx.size()},
          {"indices", idx},
          {"times", times_json(s, idx)}};
}

int run_filter(const FilterArgs& a, std::ostream& out) {
  const bool explicit_lambda = a.o_lambda->count() || a.o_lambda1->count() || a.o_lambda2->count() ||
                               a.o_hp_window->count();
  const int sources = int(explicit_lambda) + int(a.autocv) + int(a.o_fraction->count() > 0);
  if (sources != 1) {
    throw InvalidArgument("give exactly one of an explicit lambda, --auto or --lambda-max-fraction");
  }
  if (a.o_fraction->count() && !(a.fraction >= 0.0)) throw InvalidArgument("--lambda-max-fraction must be >= 0");
  if (a.autocv) a.cv.validate();
  if (a.kind != "l1t-multi" && a.inputs.size() != 1) throw InvalidArgument("filter kind " + a.kind + " takes one input");

  std::vector<Series> inputs;
  for (const auto& p : a.inputs) inputs.push_back(ingest_csv(p, a.column));
  const Series& s = inputs.front();
  const std::span<const double> y = s.values;

  json rep;
  rep["command"] = "filter";
  rep["kind"] = a.kind;
  rep["n"] = s.size();
  rep["lambda_source"] = a.autocv ? "auto" : explicit_lambda ? "explicit" : "lambda_max_fraction";

  FilterResult res;
  json breaks = json::array();
  std::optional<CVReport> cv;

  auto l1_lambda = [&](std::span<const double> signal, int order, double given) {
    if (a.autocv) {
      cv = cv_filter(signal, a.cv.order == order ? a.cv : [&] { CVConfig c = a.cv; c.order = order; return c; }(),
                     a.solver);
      return cv->lambda_star;
    }
    if (a.o_fraction->count()) {
      const double lmax = lambda_max(signal, order);
      rep["lambda_max"] = lmax;
      return a.fraction * lmax;
    }
    return given;
  };

  if (a.kind == "hp") {
    if (!explicit_lambda) throw InvalidArgument("hp takes --lambda or --hp-window");
    const double lam = a.o_hp_window->count() ? l2_lambda_for_window(a.hp_window) : a.lambda;
    res = hp_filter(y, lam, a.hp_order);
    rep["order"] = a.hp_order;
  } else if (a.kind == "l1t" || a.kind == "l1c") {
    if (a.o_lambda1->count() || a.o_lambda2->count()) throw InvalidArgument(a.kind + " takes --lambda");
    const int order = a.kind == "l1t" ? 2 : 1;
    res = l1_filter(y, l1_lambda(y, order, a.lambda), order, a.solver);
    rep["order"] = order;
    breaks.push_back(breaks_json(res, order, s, a));
  } else if (a.kind == "l1tc") {
    if (a.autocv) throw InvalidArgument("l1tc does not support --auto");
    if (a.o_lambda->count()) throw InvalidArgument("l1tc takes --lambda1 and --lambda2");
    double l1 = a.lambda1, l2 = a.lambda2;
    if (a.o_fraction->count()) {
      const double m1 = lambda_max(y, 1), m2 = lambda_max(y, 2);
      rep["lambda_max"] = {m1, m2};
      l1 = a.fraction * m1;
      l2 = a.fraction * m2;
    } else if (!a.o_lambda1->count() || !a.o_lambda2->count()) {
      throw InvalidArgument("l1tc needs both --lambda1 and --lambda2");
    }
    res = l1tc_filter(y, l1, l2, a.solver);
    rep["order"] = 0;
    breaks.push_back(breaks_json(res, 1, s, a));
    breaks.push_back(breaks_json(res, 2, s, a));
  } else if (a.kind == "l1t-multi") {
    if (a.o_lambda1->count() || a.o_lambda2->count()) throw InvalidArgument(a.kind + " takes --lambda");
    std::vector<std::vector<double>> ys;
    for (const auto& in : inputs) {
      if (in.times != s.times) throw DataError("multivariate inputs must share the same time column");
      ys.push_back(in.values);
    }
    const FilterResult mean = l1t_multivariate(ys, 0.0, a.standardize, a.solver);
    res = l1t_multivariate(ys, l1_lambda(mean.signal, 2, a.lambda), a.standardize, a.solver);
    rep["order"] = 2;
    rep["series"] = ys.size();
    if (a.standardize) {
      rep["centers"] = res.centers;
      rep["scales"] = res.scales;
    }
    breaks.push_back(breaks_json(res, 2, s, a));
  } else {
    throw InvalidArgument("unknown filter kind '" + a.kind + "'");
  }

  rep["lambda"] = res.lambda;
  if (a.kind == "l1tc") rep["lambda2"] = res.lambda2;
  rep["diagnostics"] = diagnostics_json(res.diagnostics);
  rep["breaks"] = breaks;
  if (cv) rep["cv"] = cv_json(*cv, s);

  const std::string headers[] = {"observed", "trend"};
  const std::vector<double> cols[] = {res.signal, res.trend};
  emit(a.output, out, [&](std::ostream& o) { write_columns(o, s, headers, cols); });
  emit_json(a.report, out, rep);
  return res.diagnostics.converged ? kExitOk : kExitNumerical;
}

// ---- calibrate ----

struct CalibrateArgs {
  std::string column;
  std::string input;
  int order = 2;
  bool two_trend = false;
  CVConfig cv;
  IpmOptions solver;
  std::string report = "-";
  std::string curve;
};

int run_calibrate(CalibrateArgs a, std::ostream& out) {
  a.cv.order = a.order;
  a.cv.validate();
  const Series s = ingest_csv(a.input, a.column);
  json rep;
  rep["command"] = "calibrate";
  rep["n"] = s.size();
  rep["config"] = {{"train_window", a.cv.train_window}, {"test_window", a.cv.test_window},
                   {"global_window", a.cv.global_window}, {"test_sets", a.cv.test_sets},
                   {"train_sets", a.cv.train_sets}, {"grid_size", a.cv.grid_size}, {"order", a.cv.order}};
  CVReport local;
  bool converged = true;
  if (a.two_trend) {
    const TwoTrendPrediction p = predict_two_trend(s.values, a.cv, a.solver);
    local = p.local;
    rep["local"] = cv_json(p.local, s);
    rep["global"] = cv_json(p.global, s);
    rep["branch"] = p.branch == TrendBranch::local ? "local" : "global";
    rep["sigma"] = p.sigma;
    rep["deviation"] = p.deviation;
    rep["prediction"] = p.prediction;
    converged = p.global.fit.diagnostics.converged;
  } else {
    local = cv_filter(s.values, a.cv, a.solver);
    rep["cv"] = cv_json(local, s);
  }
  converged = converged && local.fit.diagnostics.converged;
  emit(a.curve, out, [&](std::ostream& o) {
    o << "lambda,error\n";
    for (std::size_t j = 0; j < local.grid.size(); ++j) {
      o << format_value(local.grid[j]) << ',' << format_value(local.errors[j]) << '\n';
    }
  });
  emit_json(a.report, out, rep);
  return converged ? kExitOk : kExitNumerical;
}

// ---- simulate ----

struct SimulateArgs {
  int model = 1;
  ModelParams params;
  std::string output = "-";
  std::string report;
  CLI::Option* o_p = nullptr;
  CLI::Option* o_b = nullptr;
  CLI::Option* o_sigma = nullptr;
  CLI::Option* o_theta = nullptr;
};

int run_simulate(const SimulateArgs& a, std::ostream& out) {
  if (a.model < 1 || a.model > 4) throw InvalidArgument("--model must be 1, 2, 3 or 4");
  ModelParams p = paper_params(a.model);
  p.n = a.params.n;
  p.seed = a.params.seed;
  if (a.o_p->count()) p.p = a.params.p;
  if (a.o_b->count()) p.b = a.params.b;
  if (a.o_sigma->count()) p.sigma = a.params.sigma;
  if (a.o_theta->count()) p.theta = a.params.theta;
  p.validate(a.model);
  const SimulatedPath path = simulate_model(a.model, p);
  std::vector<double> obs = path.observed;
  const Series s = Series::indexed(std::move(obs));
  const std::string headers[] = {"observed", "trend"};
  const std::vector<double> cols[] = {path.observed, path.trend};
  emit(a.output, out, [&](std::ostream& o) { write_columns(o, s, headers, cols); });
  json rep = {{"command", "simulate"}, {"model", a.model}, {"n", p.n},       {"p", p.p},
              {"b", p.b},              {"sigma", p.sigma}, {"theta", p.theta}, {"seed", p.seed},
              {"regime_changes", path.regime_changes}};
  emit_json(a.report, out, rep);
  return kExitOk;
}

// ---- backtest ----

struct BacktestArgs {
  std::string column;
  std::string input;
  std::string trend = "l1-global";
  double rate = 0.0;
  std::string rates;
  int order = 2;
  StrategyConfig cfg;
  std::string report = "-";
  std::string output;
};

json stats_json(const PerformanceStats& st) {
  json j = {{"annual_return_pct", st.annual_return_pct},
            {"annual_volatility_pct", st.annual_volatility_pct},
            {"sharpe", st.sharpe},
            {"max_drawdown_pct", st.max_drawdown_pct}};
  j["information_ratio"] = st.information_ratio ? json(*st.information_ratio) : json(nullptr);
  return j;
}

int run_backtest_cmd(BacktestArgs a, std::ostream& out) {
  a.cfg.trend_model = parse_trend_model(a.trend);
  a.cfg.cv.order = a.order;
  a.cfg.validate();
  const Series s = ingest_csv(a.input, a.column);
  std::vector<double> rates{a.rate};
  if (!a.rates.empty()) {
    Series r = ingest_csv(a.rates);
    if (r.times != s.times) throw DataError("rates file must share the price file's time column");
    rates = std::move(r.values);
  }
  const BacktestReport bt = run_backtest(s.values, rates, a.cfg);

  double mean_rate = 0.0;
  const std::size_t n = s.size();
  for (std::size_t t = bt.start_index; t + 1 < n; ++t) mean_rate += rates.size() == 1 ? rates[0] : rates[t];
  if (n - 1 > bt.start_index) mean_rate /= static_cast<double>(n - 1 - bt.start_index);

  Series dates;
  dates.kind = s.kind;
  dates.time_header = s.time_header;
  dates.times.assign(s.times.begin() + static_cast<std::ptrdiff_t>(bt.start_index), s.times.end());

  json rep;
  rep["command"] = "backtest";
  rep["trend_model"] = to_string(a.cfg.trend_model);
  rep["n"] = n;
  rep["start_index"] = bt.start_index;
  rep["start_time"] = format_time(s, bt.start_index);
  rep["dates"] = bt.wealth.size();
  rep["config"] = {{"risk_aversion", a.cfg.risk_aversion}, {"alpha_min", a.cfg.alpha_min},
                   {"alpha_max", a.cfg.alpha_max}, {"vol_window", a.cfg.vol_window},
                   {"ma_window", a.cfg.ma_window}, {"hp_window", a.cfg.hp_window},
                   {"hp_lambda", a.cfg.hp_lambda}, {"train_window", a.cfg.cv.train_window},
                   {"test_window", a.cfg.cv.test_window}, {"global_window", a.cfg.cv.global_window},
                   {"test_sets", a.cfg.cv.test_sets}, {"train_sets", a.cfg.cv.train_sets},
                   {"grid_size", a.cfg.cv.grid_size}, {"order", a.cfg.cv.order},
                   {"recalibration_interval", a.cfg.recalibration_interval},
                   {"initial_wealth", a.cfg.initial_wealth}};
  rep["risk_free_rate_per_period"] = mean_rate;
  rep["final_wealth"] = bt.wealth.back();
  rep["stats"] = stats_json(bt.stats);
  rep["benchmark_stats"] = stats_json(bt.benchmark_stats);
  rep["floored_variance_dates"] = times_json(s, bt.floored_variance_dates);
  rep["failed_dates"] = times_json(s, bt.failed_dates);
  if (!bt.local_branch.empty()) {
    std::size_t local = 0;
    for (bool b : bt.local_branch) local += b;
    rep["local_branch_fraction"] = static_cast<double>(local) / static_cast<double>(bt.local_branch.size());
  }

  const std::string headers[] = {"wealth", "alpha"};
  const std::vector<double> cols[] = {bt.wealth, bt.allocations};
  emit(a.output, out, [&](std::ostream& o) { write_columns(o, dates, headers, cols); });
  emit_json(a.report, out, rep);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"L1 trend filtering toolkit", "l1trend"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_path;
  app.require_subcommand(1);
  app.set_version_flag("--version", "l1trend 1.0");

  FilterArgs fa;
  auto* filter = app.add_subcommand("filter", "filter a series (writes time,observed,trend)");
  filter->add_option("--config", config_path, "key = value file of option defaults");
  filter->add_option("-i,--input", fa.inputs, "input CSV (repeat for l1t-multi)")->required()->check(CLI::ExistingFile);
  filter->add_option("--column", fa.column, "value column of a multi-column CSV");
  filter->add_option("-k,--kind", fa.kind, "hp, l1t, l1c, l1tc or l1t-multi")
      ->check(CLI::IsMember({"hp", "l1t", "l1c", "l1tc", "l1t-multi"}))
      ->capture_default_str();
  fa.o_lambda = filter->add_option("--lambda", fa.lambda, "regularization parameter");
  fa.o_lambda1 = filter->add_option("--lambda1", fa.lambda1, "l1tc: first-difference weight");
  fa.o_lambda2 = filter->add_option("--lambda2", fa.lambda2, "l1tc: second-difference weight");
  fa.o_hp_window = filter->add_option("--hp-window", fa.hp_window, "hp: lambda matching a moving average of this length");
  filter->add_option("--hp-order", fa.hp_order, "hp: difference order")->check(CLI::IsMember({1, 2}))->capture_default_str();
  filter->add_flag("--auto", fa.autocv, "choose lambda by cross-validation");
  fa.o_fraction = filter->add_option("--lambda-max-fraction", fa.fraction, "lambda as a multiple of lambda_max");
  filter->add_flag("--standardize", fa.standardize, "l1t-multi: standardize each series first");
  fa.o_break_tol = filter->add_option("--break-tol", fa.break_tol, "break threshold on |D x|");
  filter->add_option("-o,--output", fa.output, "trend CSV ('-' for stdout)")->capture_default_str();
  filter->add_option("-r,--report", fa.report, "diagnostics JSON ('-' for stdout)");
  add_cv_options(filter, fa.cv);
  add_solver_options(filter, fa.solver);

  CalibrateArgs ca;
  auto* calibrate = app.add_subcommand("calibrate", "cross-validate lambda (writes a JSON report)");
  calibrate->add_option("--config", config_path, "key = value file of option defaults");
  calibrate->add_option("-i,--input", ca.input, "input CSV")->required()->check(CLI::ExistingFile);
  calibrate->add_option("--column", ca.column, "value column of a multi-column CSV");
  calibrate->add_option("--order", ca.order, "1 (level) or 2 (trend)")->check(CLI::IsMember({1, 2}))->capture_default_str();
  calibrate->add_flag("--two-trend", ca.two_trend, "also calibrate the global trend and pick a branch");
  calibrate->add_option("-r,--report", ca.report, "report JSON ('-' for stdout)")->capture_default_str();
  calibrate->add_option("--curve", ca.curve, "lambda,error CSV");
  add_cv_options(calibrate, ca.cv);
  add_solver_options(calibrate, ca.solver);

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "simulate a model path (writes t,observed,trend)");
  simulate->add_option("--config", config_path, "key = value file of option defaults");
  simulate->add_option("--model", sa.model, "model 1..4")->required()->check(CLI::Range(1, 4));
  simulate->add_option("--n", sa.params.n, "length")->capture_default_str();
  sa.o_p = simulate->add_option("--p", sa.params.p, "regime persistence");
  sa.o_b = simulate->add_option("--b", sa.params.b, "draw scale");
  sa.o_sigma = simulate->add_option("--sigma", sa.params.sigma, "noise deviation");
  sa.o_theta = simulate->add_option("--theta", sa.params.theta, "model 4 mean-reversion speed");
  simulate->add_option("--seed", sa.params.seed, "random seed")->capture_default_str();
  simulate->add_option("-o,--output", sa.output, "model CSV ('-' for stdout)")->capture_default_str();
  simulate->add_option("-r,--report", sa.report, "summary JSON");

  BacktestArgs ba;
  auto* backtest = app.add_subcommand("backtest", "walk-forward trend-following backtest");
  backtest->add_option("--config", config_path, "key = value file of option defaults");
  backtest->add_option("-i,--input", ba.input, "price CSV")->required()->check(CLI::ExistingFile);
  backtest->add_option("--column", ba.column, "value column of a multi-column CSV");
  backtest->add_option("--trend", ba.trend, "ma, hp, l1-local, l1-global or l1-two-trend")
      ->check(CLI::IsMember({"ma", "hp", "l1-local", "l1-global", "l1-two-trend"}))
      ->capture_default_str();
  backtest->add_option("--rate", ba.rate, "constant per-period risk-free rate")->capture_default_str();
  backtest->add_option("--rates", ba.rates, "per-period rate CSV aligned with prices")->check(CLI::ExistingFile);
  backtest->add_option("--risk-aversion", ba.cfg.risk_aversion)->capture_default_str();
  backtest->add_option("--alpha-min", ba.cfg.alpha_min)->capture_default_str();
  backtest->add_option("--alpha-max", ba.cfg.alpha_max)->capture_default_str();
  backtest->add_option("--vol-window", ba.cfg.vol_window)->capture_default_str();
  backtest->add_option("--ma-window", ba.cfg.ma_window)->capture_default_str();
  backtest->add_option("--hp-window", ba.cfg.hp_window)->capture_default_str();
  backtest->add_option("--hp-lambda", ba.cfg.hp_lambda, "0 matches the HP window")->capture_default_str();
  backtest->add_option("--order", ba.order, "L1 filter order")->check(CLI::IsMember({1, 2}))->capture_default_str();
  backtest->add_option("--recalibrate-every", ba.cfg.recalibration_interval, "dates between lambda recalibrations")
      ->capture_default_str();
  backtest->add_option("--initial-wealth", ba.cfg.initial_wealth)->capture_default_str();
  backtest->add_option("-r,--report", ba.report, "report JSON ('-' for stdout)")->capture_default_str();
  backtest->add_option("-o,--output", ba.output, "date,wealth,alpha CSV");
  add_cv_options(backtest, ba.cfg.cv);
  add_solver_options(backtest, ba.cfg.solver);

  try {
    try {
      std::vector<std::string> args(argv, argv + argc);
      args = expand_config(app, std::move(args));
      std::vector<const char*> expanded;
      for (const auto& a : args) expanded.push_back(a.c_str());
      app.parse(static_cast<int>(expanded.size()), expanded.data());
    } catch (const CLI::Success& e) {
      return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
      app.exit(e, out, err);
      return kExitUsage;
    }
    if (filter->parsed()) return run_filter(fa, out);
    if (calibrate->parsed()) return run_calibrate(ca, out);
    if (simulate->parsed()) return run_simulate(sa, out);
    return run_backtest_cmd(ba, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace l1trend
