#include "cli.hpp"

#include <boostvar/convergence.hpp>
#include <boostvar/error.hpp>
#include <boostvar/io.hpp>
#include <boostvar/selection.hpp>
#include <boostvar/simulation.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace boostvar::cli {

namespace fs = std::filesystem;

namespace {

struct SimulateArgs {
  DgpConfig dgp;
  int reps = 5;
  double nu = 0.1;
  int steps = 500;
  std::size_t threads = 0;
  bool bivariate = false;
  std::string out;
  std::string emit_data;
};

struct FitArgs {
  RunConfig run;
  std::string variant = "group";
  bool no_inference = false;
  bool no_demean = false;
  bool no_transform = false;
  std::string transform_row = "auto";
  bool split = false;
  std::vector<double> fractions;
  std::string out;
};

struct SelectArgs {
  std::string run_dir;
  std::string criterion = "aicc";
  std::optional<double> alpha;
  bool bonferroni = false;
  std::string validation;
  std::string out;
};

struct BoundsArgs {
  std::string run_dir;
  std::string out;
};

struct IngestArgs {
  std::string input;
  std::string out;
  bool no_transform = false;
  std::string transform_row = "auto";
};

TransformRow transform_row_of(const std::string& s) {
  if (s == "present") return TransformRow::kPresent;
  if (s == "absent") return TransformRow::kAbsent;
  return TransformRow::kAuto;
}

TimeSeriesMatrix load_series(const RunConfig& cfg, const std::string& file) {
  return ingest(read_panel(file, cfg.transform_row), cfg.apply_transforms);
}

// The training rows a run was fitted on.
TimeSeriesMatrix training_rows(const RunConfig& cfg, const TimeSeriesMatrix& y) {
  if (!cfg.split) return y;
  const int presample = cfg.boost.variant == Variant::kCrossSection ? 0 : cfg.p;
  return split(y, *cfg.split, presample).train;
}

struct CrossData {
  MatrixXd x;
  VectorXd y;
  std::vector<std::string> predictors;
  std::string response;
};

CrossData cross_section_data(const TimeSeriesMatrix& data, const std::string& response) {
  if (data.cols() < 2) {
    throw Error(ErrorCode::kInvalidData, "invalid data: cross-section fit needs a response and a predictor");
  }
  Index r = data.cols() - 1;
  if (!response.empty()) {
    const auto& names = data.names();
    auto it = std::find(names.begin(), names.end(), response);
    if (it == names.end()) throw Error(ErrorCode::kInvalidArgument, "invalid argument: no column named '" + response + "'");
    r = it - names.begin();
  }
  CrossData out;
  out.response = data.names()[static_cast<std::size_t>(r)];
  out.x.resize(data.rows(), data.cols() - 1);
  Index c = 0;
  for (Index j = 0; j < data.cols(); ++j) {
    if (j == r) continue;
    out.x.col(c++) = data.values().col(j);
    out.predictors.push_back(data.names()[static_cast<std::size_t>(j)]);
  }
  // An intercept is always part of the model; centering removes it from the fit.
  out.x.rowwise() -= out.x.colwise().mean();
  out.y = data.values().col(r).array() - data.values().col(r).mean();
  return out;
}

void print_metrics(std::ostream& out, const ReplicationReport& report) {
  char line[160];
  std::snprintf(line, sizeof line, "%-12s %12s %12s %8s %8s %8s %10s %8s\n", "method", "mse", "mspe",
                "fpr", "fnr", "f", "size", "step");
  out << line;
  for (std::size_t m = 0; m < report.methods.size(); ++m) {
    const Metrics& x = report.mean[m];
    std::snprintf(line, sizeof line, "%-12s %12.6g %12.6g %8.4f %8.4f %8.4f %10.2f %8.1f\n",
                  report.methods[m].c_str(), x.mse, x.mspe, x.fpr, x.fnr, x.f_score, x.model_size,
                  x.chosen_step);
    out << line;
  }
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  DgpConfig dgp = a.dgp;
  std::vector<MethodSpec> methods = default_methods(a.nu, a.steps);
  std::optional<GroundTruth> fixed;
  if (a.bivariate) {
    fixed = bivariate_truth();
    dgp.d = 2;
    dgp.s = 2;
    for (MethodSpec& m : methods) m.demean = true;
  }
  const ReplicationReport report =
      run_replications(dgp, methods, a.reps, a.threads, fixed ? &*fixed : nullptr);
  print_metrics(out, report);

  if (!a.out.empty()) {
    emit_metrics(a.out, dgp, report);
    out << "wrote " << (fs::path(a.out) / "metrics.json").string() << '\n';
  }
  if (!a.emit_data.empty()) {
    // The series of the first replication, train + validation + test in time order.
    Rng rng(dgp.seed);
    const GroundTruth truth = fixed ? *fixed : draw_truth(dgp, rng);
    const TimeSeriesMatrix y =
        simulate_var(truth, dgp.T + dgp.validation + dgp.test, dgp.burn_in, rng);
    std::ofstream f(a.emit_data, std::ios::binary);
    if (!f) throw Error(ErrorCode::kIo, "I/O error: cannot write " + a.emit_data);
    write_panel(y, f);
    out << "wrote " << a.emit_data << '\n';
  }
  return 0;
}

int cmd_fit(FitArgs a, std::ostream& out) {
  RunConfig& cfg = a.run;
  cfg.boost.variant = parse_variant(a.variant);
  cfg.boost.compute_inference = !a.no_inference;
  cfg.demean = !a.no_demean;
  cfg.apply_transforms = !a.no_transform;
  cfg.transform_row = transform_row_of(a.transform_row);
  cfg.input = fs::absolute(cfg.input).lexically_normal().string();
  if (a.split || !a.fractions.empty()) {
    SplitFractions f;
    if (!a.fractions.empty()) {
      if (a.fractions.size() != 3) throw Error(ErrorCode::kInvalidArgument, "invalid argument: --fractions needs three values");
      f = {a.fractions[0], a.fractions[1], a.fractions[2]};
    }
    f.validate();
    cfg.split = f;
  }
  cfg.boost.validate();

  const TimeSeriesMatrix data = load_series(cfg, cfg.input);
  const TimeSeriesMatrix train = training_rows(cfg, data);

  BoostPath path;
  if (cfg.boost.variant == Variant::kCrossSection) {
    const CrossData cross = cross_section_data(train, cfg.response);
    path = boost_ls_cross_section(cross.x, cross.y, cfg.boost);
    path.names = cross.predictors;
    path.equation_names = {cross.response};
    cfg.response = cross.response;
  } else {
    path = run_path(train, cfg.p, cfg.boost, cfg.demean);
  }
  emit_reports(a.out, path, cfg);

  for (const std::string& w : path.warnings) out << "warning: " << w << '\n';
  out << "fitted " << path.length() << " steps on " << path.rows << " rows";
  if (path.length() > 0) out << ", final sse " << format_double(path.records.back().sse);
  if (path.truncated) out << " (stopped early: residual vanished)";
  out << "\nwrote " << a.out << '\n';
  return 0;
}

int cmd_select(const SelectArgs& a, std::ostream& out) {
  LoadedRun run = load_run(a.run_dir);
  const BoostPath& path = run.path;
  const double alpha = a.alpha.value_or(run.config.alpha);
  const bool bonferroni = a.bonferroni || run.config.bonferroni;

  auto validation = [&]() -> TimeSeriesMatrix {
    if (!a.validation.empty()) return load_series(run.config, a.validation);
    if (!run.config.split) {
      throw Error(ErrorCode::kInvalidArgument,
                  "invalid argument: validation data needed (pass --validation or fit with --split)");
    }
    const TimeSeriesMatrix y = load_series(run.config, run.config.input);
    return split(y, *run.config.split, run.config.p).validation_lagged;
  };

  SelectionResult result;
  if (a.criterion == "aicc") {
    result = aicc(path);
  } else if (a.criterion == "validation") {
    result = select_by_validation(path, validation());
  } else if (a.criterion == "pfilter") {
    result = select_p_variant(path, validation(), alpha, bonferroni);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "invalid argument: unknown criterion '" + a.criterion + "'");
  }
  const Index unfiltered = path.coefficients_at(result.chosen_step).nonzeros();

  const fs::path dir = a.out.empty() ? fs::path(a.run_dir) : fs::path(a.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path file = dir / "selection.json";
  std::ofstream f(file, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "I/O error: cannot write " + file.string());
  f << selection_json(path, result, a.criterion, unfiltered);

  out << "criterion " << a.criterion << ": step " << result.chosen_step << " of " << path.length()
      << ", model size " << result.model_size << " (unfiltered " << unfiltered << ")\n"
      << "wrote " << file.string() << '\n';
  return 0;
}

int cmd_bounds(const BoundsArgs& a, std::ostream& out) {
  std::ifstream pj(fs::path(a.run_dir) / "path.json", std::ios::binary);
  if (!pj) throw Error(ErrorCode::kIo, "I/O error: cannot read " + (fs::path(a.run_dir) / "path.json").string());
  const PathFile file = read_path_json(pj);
  const RunConfig& cfg = file.config;

  const TimeSeriesMatrix train = training_rows(cfg, load_series(cfg, cfg.input));
  GroupedDesign design;
  MatrixXd response;
  if (cfg.boost.variant == Variant::kCrossSection) {
    CrossData cross = cross_section_data(train, cfg.response);
    design = GroupedDesign::single_columns(std::move(cross.x));
    response = cross.y;
  } else {
    const LaggedDesign lagged = build_lagged_design(train, cfg.p, cfg.demean);
    design = regroup_by_variable(lagged);
    response = lagged.response;
  }
  const NormalizedDesign normalized = normalize_groups(design);
  BoostConfig boost = cfg.boost;
  boost.compute_inference = false;
  if (boost.variant == Variant::kCrossSection) boost.variant = Variant::kSingleLag;
  const BoostPath path = run_path(normalized.design, response, boost);
  const BoundReport report = check_bounds(path, normalized.design, response);

  nlohmann::json steps = nlohmann::json::array();
  for (const BoundStep& s : report.steps) {
    steps.push_back({{"step", s.step},
                     {"lhs_pred", s.lhs_pred},
                     {"rhs_pred", s.rhs_pred},
                     {"lhs_coef", s.lhs_coef},
                     {"rhs_coef_squared", s.rhs_coef_squared},
                     {"rhs_coef_unsquared", s.rhs_coef_unsquared}});
  }
  const nlohmann::json doc = {{"gamma", report.gamma},
                              {"lambda_min", report.lambda_min},
                              {"ls_fit_norm", report.ls_fit_norm},
                              {"rank_deficient", report.rank_deficient},
                              {"excluded_groups", normalized.excluded},
                              {"prediction_violations", report.prediction_violations},
                              {"coef_violations_squared", report.coef_violations_squared},
                              {"coef_violations_unsquared", report.coef_violations_unsquared},
                              {"steps", steps}};
  const fs::path dir = a.out.empty() ? fs::path(a.run_dir) : fs::path(a.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path target = dir / "bounds.json";
  std::ofstream f(target, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "I/O error: cannot write " + target.string());
  f << doc.dump(2) << '\n';

  for (const std::string& w : normalized.warnings) out << "warning: " << w << '\n';
  out << "gamma " << format_double(report.gamma) << " over " << report.steps.size() << " steps\n"
      << "prediction bound violations: " << report.prediction_violations.size() << '\n'
      << "coefficient bound violations (squared / unsquared): "
      << report.coef_violations_squared.size() << " / " << report.coef_violations_unsquared.size()
      << (report.rank_deficient ? " (informational: more columns than rows)" : "") << '\n'
      << "wrote " << target.string() << '\n';
  return 0;
}

int cmd_ingest(const IngestArgs& a, std::ostream& out) {
  const TimeSeriesMatrix y = ingest(read_panel(a.input, transform_row_of(a.transform_row)), !a.no_transform);
  if (a.out.empty() || a.out == "-") {
    write_panel(y, out);
    return 0;
  }
  std::ofstream f(a.out, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "I/O error: cannot write " + a.out);
  write_panel(y, f);
  return 0;
}

int exit_code(ErrorCode code) {
  if (is_numerical(code)) return 3;
  if (code == ErrorCode::kInvalidArgument) return 1;
  return 2;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Boosted vector autoregression with step-wise inference", "boostvar"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  std::size_t threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = BOOSTVAR_THREADS or all cores)");

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Simulate sparse VAR(2) data and score LS-Boost estimators");
  simulate->add_option("--t", sim.dgp.T, "Training rows")->capture_default_str();
  simulate->add_option("--d", sim.dgp.d, "Number of variables")->capture_default_str();
  simulate->add_option("--s", sim.dgp.s, "Nonzero columns per lag matrix")->capture_default_str();
  simulate->add_option("--snr", sim.dgp.snr, "Signal-to-noise ratio")->capture_default_str();
  simulate->add_option("--rho", sim.dgp.rho, "Noise correlation decay")->capture_default_str();
  simulate->add_option("--reps", sim.reps, "Replications")->capture_default_str();
  simulate->add_option("--seed", sim.dgp.seed, "Base seed (replication r uses seed + r)")->capture_default_str();
  simulate->add_option("--nu", sim.nu, "Learning rate")->capture_default_str();
  simulate->add_option("--steps", sim.steps, "Boosting steps")->capture_default_str();
  simulate->add_option("--validation", sim.dgp.validation, "Validation rows")->capture_default_str();
  simulate->add_option("--test", sim.dgp.test, "Test rows")->capture_default_str();
  simulate->add_flag("--bivariate", sim.bivariate, "Use the fixed two-variable model with intercept");
  simulate->add_option("--out", sim.out, "Directory for metrics.json");
  simulate->add_option("--emit-data", sim.emit_data, "Write the first replication's series to this CSV");

  FitArgs fit;
  CLI::App* fitc = app.add_subcommand("fit", "Run a boosting path on a CSV panel and write reports");
  fitc->add_option("--input", fit.run.input, "Input CSV")->required();
  fitc->add_option("--variant", fit.variant, "group | lag | cross")
      ->check(CLI::IsMember({"group", "lag", "cross"}))->capture_default_str();
  fitc->add_option("--p", fit.run.p, "Lag order")->capture_default_str();
  fitc->add_option("--nu", fit.run.boost.nu, "Learning rate")->capture_default_str();
  fitc->add_option("--steps", fit.run.boost.k_stop, "Boosting steps")->capture_default_str();
  fitc->add_flag("--no-inference", fit.no_inference, "Skip standard errors and p-values");
  fitc->add_flag("--no-demean", fit.no_demean, "Fit without an intercept");
  fitc->add_flag("--split", fit.split, "Fit on the training part of a 50/25/25 split");
  fitc->add_option("--fractions", fit.fractions, "Train, validation and test fractions")->expected(3);
  fitc->add_option("--alpha", fit.run.alpha, "Default p-value cutoff stored with the run")->capture_default_str();
  fitc->add_flag("--no-transform", fit.no_transform, "Ignore transform codes");
  fitc->add_option("--transform-row", fit.transform_row, "auto | present | absent")
      ->check(CLI::IsMember({"auto", "present", "absent"}));
  fitc->add_option("--response", fit.run.response, "Response column for --variant cross");
  fitc->add_option("--out", fit.out, "Output directory")->required();

  SelectArgs sel;
  CLI::App* selc = app.add_subcommand("select", "Choose a stopping step for a fitted run");
  selc->add_option("--run", sel.run_dir, "Directory written by fit")->required();
  selc->add_option("--criterion", sel.criterion, "aicc | validation | pfilter")
      ->check(CLI::IsMember({"aicc", "validation", "pfilter"}))->capture_default_str();
  selc->add_option("--alpha", sel.alpha, "p-value cutoff for pfilter");
  selc->add_flag("--bonferroni", sel.bonferroni, "Divide alpha by the number of nonzeros");
  selc->add_option("--validation", sel.validation, "Validation CSV (including p presample rows)");
  selc->add_option("--out", sel.out, "Output directory (default: the run directory)");

  BoundsArgs bnd;
  CLI::App* bndc = app.add_subcommand("bounds", "Check the convergence bounds on the normalized design of a run");
  bndc->add_option("--run", bnd.run_dir, "Directory written by fit")->required();
  bndc->add_option("--out", bnd.out, "Output directory (default: the run directory)");

  IngestArgs ing;
  CLI::App* ingc = app.add_subcommand("ingest", "Apply transform codes and drop incomplete rows");
  ingc->add_option("--input", ing.input, "Input CSV")->required();
  ingc->add_option("--out", ing.out, "Output CSV (default: stdout)");
  ingc->add_flag("--no-transform", ing.no_transform, "Ignore transform codes");
  ingc->add_option("--transform-row", ing.transform_row, "auto | present | absent")
      ->check(CLI::IsMember({"auto", "present", "absent"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (simulate->parsed()) {
      sim.threads = threads;
      return cmd_simulate(sim, out);
    }
    if (fitc->parsed()) return cmd_fit(fit, out);
    if (selc->parsed()) return cmd_select(sel, out);
    if (bndc->parsed()) return cmd_bounds(bnd, out);
    if (ingc->parsed()) return cmd_ingest(ing, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace boostvar::cli
