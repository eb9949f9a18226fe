#include "boostvar/io.hpp"

#include "boostvar/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace boostvar {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool is_missing(const std::string& cell) {
  const std::string c = lower(cell);
  return c.empty() || c == "na" || c == "nan" || c == ".";
}

std::optional<double> parse_double(const std::string& cell) {
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (first != last && *first == '+') ++first;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

std::optional<int> parse_int(const std::string& cell) {
  // Codes are sometimes written as "5.0".
  const auto v = parse_double(cell);
  if (!v || *v != std::floor(*v)) return std::nullopt;
  return static_cast<int>(*v);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::ofstream open_out(const fs::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "I/O error: cannot write " + file.string());
  return out;
}

std::ifstream open_in(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "I/O error: cannot read " + file.string());
  return in;
}

void finish(std::ofstream& out, const fs::path& file) {
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "I/O error: failed writing " + file.string());
}

std::string variable_name(const BoostPath& path, int j) {
  if (j >= 0 && static_cast<std::size_t>(j) < path.names.size()) return path.names[static_cast<std::size_t>(j)];
  return (path.lag_order > 0 ? "y" : "x") + std::to_string(j + 1);
}

std::string equation_name(const BoostPath& path, int i) {
  if (i >= 0 && static_cast<std::size_t>(i) < path.equation_names.size()) {
    return path.equation_names[static_cast<std::size_t>(i)];
  }
  return "y" + std::to_string(i + 1);
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or_nan(const json& j) { return j.is_null() ? kNaN : j.get<double>(); }

std::string_view to_string(TransformRow m) {
  switch (m) {
    case TransformRow::kAuto: return "auto";
    case TransformRow::kPresent: return "present";
    case TransformRow::kAbsent: return "absent";
  }
  return "auto";
}

TransformRow parse_transform_row(const std::string& s) {
  if (s == "present") return TransformRow::kPresent;
  if (s == "absent") return TransformRow::kAbsent;
  return TransformRow::kAuto;
}

json metrics_to_json(const Metrics& m) {
  return {{"mse", m.mse},         {"mspe", m.mspe},       {"fpr", m.fpr},
          {"fnr", m.fnr},         {"f_score", m.f_score}, {"model_size", m.model_size},
          {"chosen_step", m.chosen_step}};
}

Metrics metrics_from_json(const json& j) {
  Metrics m;
  m.mse = j.at("mse").get<double>();
  m.mspe = j.at("mspe").get<double>();
  m.fpr = j.at("fpr").get<double>();
  m.fnr = j.at("fnr").get<double>();
  m.f_score = j.at("f_score").get<double>();
  m.model_size = j.at("model_size").get<double>();
  m.chosen_step = j.at("chosen_step").get<double>();
  return m;
}

// Rows of the step-k coefficients in (variable, lag, equation) order, with inference when present.
template <typename Fn>
void for_each_step_row(const BoostPath& path, Fn&& fn) {
  MatrixXd phi = MatrixXd::Zero(Index{path.layout.group_size} * path.n_groups, path.equations);
  for (const PathRecord& r : path.records) {
    phi.middleRows(path.layout.first_row(r.block), r.increment.rows()) += r.increment;
    if (r.inference) {
      for (const InferenceRow& row : r.inference->rows) fn(r.step, row, true);
      continue;
    }
    for (Index q = 0; q < phi.rows(); ++q) {
      for (Index i = 0; i < phi.cols(); ++i) {
        if (phi(q, i) == 0.0) continue;
        InferenceRow row;
        row.variable = static_cast<int>(q / path.layout.group_size);
        row.lag = static_cast<int>(q % path.layout.group_size) + 1;
        row.equation = static_cast<int>(i);
        row.estimate = phi(q, i);
        fn(r.step, row, false);
      }
    }
  }
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(trim(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(trim(cur));
  return cells;
}

Panel parse_panel(std::istream& in, TransformRow mode) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!trim(line).empty()) return true;
    }
    return false;
  };
  if (!next_line()) throw Error(ErrorCode::kParse, "parse error: empty file");

  Panel panel;
  std::vector<std::string> header = split_csv_line(line);
  const std::string first = lower(header.front());
  const bool has_dates = first == "date" || first == "sasdate";
  const std::size_t offset = has_dates ? 1 : 0;
  panel.names.assign(header.begin() + static_cast<std::ptrdiff_t>(offset), header.end());
  if (panel.names.empty()) throw Error(ErrorCode::kParse, "parse error: no data columns");
  for (std::size_t j = 0; j < panel.names.size(); ++j) {
    if (panel.names[j].empty()) panel.names[j] = "y" + std::to_string(j + 1);
    for (std::size_t k = 0; k < j; ++k) {
      if (panel.names[k] == panel.names[j]) {
        throw Error(ErrorCode::kParse, "parse error: duplicate column name '" + panel.names[j] + "'");
      }
    }
  }
  const std::size_t width = header.size();

  std::vector<std::vector<double>> rows;
  bool first_data = true;
  while (next_line()) {
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() < width) cells.resize(width);
    if (cells.size() > width) {
      throw Error(ErrorCode::kParse, "parse error: row " + std::to_string(line_no) + " has " +
                                         std::to_string(cells.size()) + " cells, header has " +
                                         std::to_string(width));
    }
    if (first_data) {
      first_data = false;
      const std::string tag = lower(cells.front());
      const bool tagged = tag.rfind("transform", 0) == 0 || tag.rfind("tcode", 0) == 0;
      if (mode == TransformRow::kPresent || (mode == TransformRow::kAuto && tagged)) {
        const std::size_t skip = has_dates || tagged ? 1 : 0;
        if (cells.size() - skip != panel.names.size()) {
          throw Error(ErrorCode::kParse, "parse error: transform row width does not match header");
        }
        for (std::size_t c = skip; c < cells.size(); ++c) {
          const auto code = parse_int(cells[c]);
          if (!code || *code < 1 || *code > 7) {
            throw Error(ErrorCode::kParse, "parse error: row " + std::to_string(line_no) +
                                               " column " + std::to_string(c + 1) +
                                               ": bad transform code '" + cells[c] + "'");
          }
          panel.codes.push_back(*code);
        }
        continue;
      }
    }
    if (has_dates) panel.dates.push_back(cells.front());
    std::vector<double> values;
    values.reserve(panel.names.size());
    for (std::size_t c = offset; c < cells.size(); ++c) {
      if (is_missing(cells[c])) {
        values.push_back(kNaN);
        continue;
      }
      const auto v = parse_double(cells[c]);
      if (!v || !std::isfinite(*v)) {
        throw Error(ErrorCode::kParse, "parse error: row " + std::to_string(line_no) + " column " +
                                           std::to_string(c + 1) + ": '" + cells[c] +
                                           "' is not numeric");
      }
      values.push_back(*v);
    }
    rows.push_back(std::move(values));
  }

  panel.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(panel.names.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      panel.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    }
  }
  return panel;
}

Panel read_panel(const fs::path& file, TransformRow mode) {
  std::ifstream in = open_in(file);
  return parse_panel(in, mode);
}

VectorXd apply_transform(const VectorXd& x, int code, const std::string& name) {
  const Index n = x.size();
  auto diff = [](const VectorXd& v) {
    VectorXd out = VectorXd::Constant(v.size(), kNaN);
    for (Index t = 1; t < v.size(); ++t) out(t) = v(t) - v(t - 1);
    return out;
  };
  auto log_of = [&](const VectorXd& v) {
    VectorXd out(n);
    for (Index t = 0; t < n; ++t) {
      if (std::isnan(v(t))) {
        out(t) = kNaN;
      } else if (!(v(t) > 0.0)) {
        throw Error(ErrorCode::kInvalidData, "invalid data: log transform of non-positive value in column '" + name + "'");
      } else {
        out(t) = std::log(v(t));
      }
    }
    return out;
  };
  switch (code) {
    case 1: return x;
    case 2: return diff(x);
    case 3: return diff(diff(x));
    case 4: return log_of(x);
    case 5: return diff(log_of(x));
    case 6: return diff(diff(log_of(x)));
    case 7: {
      VectorXd growth = VectorXd::Constant(n, kNaN);
      for (Index t = 1; t < n; ++t) growth(t) = x(t) / x(t - 1) - 1.0;
      return diff(growth);
    }
    default:
      throw Error(ErrorCode::kInvalidArgument,
                  "invalid argument: unknown transform code " + std::to_string(code) + " for column '" + name + "'");
  }
}

TimeSeriesMatrix ingest(const Panel& panel, bool apply_transforms) {
  MatrixXd values = panel.values;
  if (apply_transforms && !panel.codes.empty()) {
    for (Index j = 0; j < values.cols(); ++j) {
      values.col(j) = apply_transform(values.col(j), panel.codes[static_cast<std::size_t>(j)],
                                      panel.names[static_cast<std::size_t>(j)]);
    }
  }
  std::vector<Index> keep;
  for (Index t = 0; t < values.rows(); ++t) {
    if (values.row(t).allFinite()) keep.push_back(t);
  }
  if (keep.empty()) throw Error(ErrorCode::kNoUsableRows, "no usable rows after removing missing values");

  MatrixXd clean(static_cast<Index>(keep.size()), values.cols());
  std::vector<std::string> dates;
  for (std::size_t r = 0; r < keep.size(); ++r) {
    clean.row(static_cast<Index>(r)) = values.row(keep[r]);
    if (!panel.dates.empty()) dates.push_back(panel.dates[static_cast<std::size_t>(keep[r])]);
  }
  return TimeSeriesMatrix(std::move(clean), panel.names, std::move(dates));
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 40> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                       std::chars_format::general, 17);
  if (ec != std::errc()) throw Error(ErrorCode::kNumericalFailure, "numerical failure: cannot format value");
  return std::string(buf.data(), ptr);
}

void write_panel(const TimeSeriesMatrix& y, std::ostream& out) {
  const bool dates = !y.row_labels().empty();
  if (dates) out << "date,";
  for (Index j = 0; j < y.cols(); ++j) {
    out << (j ? "," : "") << csv_field(y.names()[static_cast<std::size_t>(j)]);
  }
  out << '\n';
  for (Index t = 0; t < y.rows(); ++t) {
    if (dates) out << csv_field(y.row_labels()[static_cast<std::size_t>(t)]) << ',';
    for (Index j = 0; j < y.cols(); ++j) out << (j ? "," : "") << format_double(y.values()(t, j));
    out << '\n';
  }
}

void SplitFractions::validate() const {
  const double sum = train + validation + test;
  if (!(train > 0 && validation > 0 && test > 0) || std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "invalid argument: split fractions must be positive and sum to 1");
  }
}

SplitCounts split_counts(Index rows, const SplitFractions& f) {
  f.validate();
  SplitCounts c;
  // The small nudge keeps exact products such as 8 * 0.25 from flooring to 1.
  c.validation = static_cast<Index>(std::floor(static_cast<double>(rows) * f.validation + 1e-9));
  c.test = static_cast<Index>(std::floor(static_cast<double>(rows) * f.test + 1e-9));
  c.train = rows - c.validation - c.test;
  return c;
}

Segments split(const TimeSeriesMatrix& y, const SplitFractions& fractions, int p) {
  if (p < 0) throw Error(ErrorCode::kInvalidArgument, "invalid argument: negative lag order");
  const SplitCounts c = split_counts(y.rows(), fractions);
  const auto too_short = [p](Index n) { return n <= p; };
  if (too_short(c.train) || too_short(c.validation) || too_short(c.test)) {
    throw Error(ErrorCode::kSegmentTooShort,
                "segment too short: " + std::to_string(y.rows()) + " rows split into " +
                    std::to_string(c.train) + "/" + std::to_string(c.validation) + "/" +
                    std::to_string(c.test) + ", each needs more than " + std::to_string(p));
  }
  const Index val_start = c.train;
  const Index test_start = c.train + c.validation;
  return {c,
          y.slice_rows(0, c.train),
          y.slice_rows(val_start, c.validation),
          y.slice_rows(test_start, c.test),
          y.slice_rows(val_start - p, c.validation + p),
          y.slice_rows(test_start - p, c.test + p)};
}

void write_coefficients_csv(const BoostPath& path, std::ostream& out) {
  out << "step,equation,variable,lag,estimate,se,tstat,pvalue\n";
  for_each_step_row(path, [&](int step, const InferenceRow& row, bool inferred) {
    out << step << ',' << csv_field(equation_name(path, row.equation)) << ','
        << csv_field(variable_name(path, row.variable)) << ',' << row.lag << ','
        << format_double(row.estimate);
    if (inferred) {
      out << ',' << format_double(row.se) << ',' << format_double(row.t) << ','
          << format_double(row.p) << '\n';
    } else {
      out << ",,,\n";
    }
  });
}

void write_pvalue_paths_csv(const BoostPath& path, std::ostream& out) {
  using Key = std::tuple<int, int, int>;
  std::map<Key, std::size_t> columns;
  for (const PathRecord& r : path.records) {
    if (!r.inference) continue;
    for (const InferenceRow& row : r.inference->rows) columns.try_emplace({row.variable, row.lag, row.equation}, 0);
  }
  out << "step";
  std::size_t index = 0;
  for (auto& [key, col] : columns) {
    col = index++;
    const auto& [variable, lag, equation] = key;
    out << ',' << csv_field(equation_name(path, equation) + ":" + variable_name(path, variable) + ":" + std::to_string(lag));
  }
  out << '\n';
  std::vector<std::string> cells(columns.size());
  for (const PathRecord& r : path.records) {
    if (!r.inference) continue;
    std::fill(cells.begin(), cells.end(), std::string());
    for (const InferenceRow& row : r.inference->rows) {
      cells[columns.at({row.variable, row.lag, row.equation})] = format_double(row.p);
    }
    out << r.step;
    for (const std::string& c : cells) out << ',' << c;
    out << '\n';
  }
}

std::string path_json(const BoostPath& path, const RunConfig& config) {
  json cfg = {
      {"variant", std::string(to_string(path.config.variant))},
      {"nu", path.config.nu},
      {"k_stop", path.config.k_stop},
      {"compute_inference", path.config.compute_inference},
      {"p", config.p},
      {"demean", config.demean},
      {"alpha", config.alpha},
      {"bonferroni", config.bonferroni},
      {"input", config.input},
      {"apply_transforms", config.apply_transforms},
      {"transform_row", std::string(to_string(config.transform_row))},
      {"response", config.response},
  };
  cfg["split"] = config.split ? json{{"train", config.split->train},
                                     {"validation", config.split->validation},
                                     {"test", config.split->test}}
                              : json(nullptr);

  std::vector<double> aicc_values(static_cast<std::size_t>(path.length()), kNaN);
  if (path.length() > 0 && path.has_df()) {
    try {
      aicc_values = aicc(path).criterion;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kCriterionUndefined) throw;
    }
  }

  json steps = json::array();
  for (const PathRecord& r : path.records) {
    steps.push_back({{"step", r.step},
                     {"sse", r.sse},
                     {"df", number(r.df)},
                     {"block", r.block},
                     {"variable", r.selected.variable},
                     {"variable_name", variable_name(path, r.selected.variable)},
                     {"lag", r.selected.lag},
                     {"aicc", number(aicc_values[static_cast<std::size_t>(r.step - 1)])}});
  }
  std::ostringstream fp;
  fp << std::hex << path.design_fingerprint;

  json doc = {
      {"config", cfg},
      {"lag_order", path.lag_order},
      {"rows", path.rows},
      {"equations", path.equations},
      {"n_groups", path.n_groups},
      {"group_size", path.layout.group_size},
      {"whole_groups", path.layout.whole_groups},
      {"names", path.names},
      {"equation_names", path.equation_names},
      {"column_means", std::vector<double>(path.column_means.data(),
                                           path.column_means.data() + path.column_means.size())},
      {"initial_sse", path.initial_sse},
      {"truncated", path.truncated},
      {"design_fingerprint", fp.str()},
      {"warnings", path.warnings},
      {"steps", steps},
  };
  return doc.dump(2) + "\n";
}

std::string selection_json(const BoostPath& path, const SelectionResult& result,
                           const std::string& criterion, Index unfiltered_size) {
  json values = json::array();
  for (double v : result.criterion) values.push_back(number(v));
  json coefs = json::array();
  for (const CoefficientTensor::Entry& e : result.coefficients.support()) {
    coefs.push_back({{"equation", equation_name(path, e.equation)},
                     {"variable", variable_name(path, e.variable)},
                     {"lag", e.lag},
                     {"estimate", e.value}});
  }
  json doc = {{"criterion", criterion},
              {"chosen_step", result.chosen_step},
              {"model_size", result.model_size},
              {"unfiltered_model_size", unfiltered_size},
              {"values", values},
              {"coefficients", coefs}};
  // With demeaned VAR data the implied constant is (I - sum_s phi_s) * mean.
  if (path.lag_order > 0 && path.column_means.size() == path.equations) {
    MatrixXd lhs = MatrixXd::Identity(path.equations, path.equations);
    for (int s = 1; s <= path.lag_order; ++s) lhs -= result.coefficients.lag_matrix(s);
    const VectorXd c = lhs * path.column_means;
    doc["intercepts"] = std::vector<double>(c.data(), c.data() + c.size());
  }
  return doc.dump(2) + "\n";
}

std::string metrics_json(const DgpConfig& dgp, const ReplicationReport& report) {
  json methods = json::array();
  for (std::size_t m = 0; m < report.methods.size(); ++m) {
    json per = json::array();
    for (const Metrics& x : report.replications[m]) per.push_back(metrics_to_json(x));
    methods.push_back({{"name", report.methods[m]},
                       {"mean", metrics_to_json(report.mean[m])},
                       {"per_replication", per}});
  }
  json doc = {{"dgp",
               {{"T", dgp.T},
                {"d", dgp.d},
                {"s", dgp.s},
                {"rho", dgp.rho},
                {"snr", dgp.snr},
                {"shrink", dgp.shrink},
                {"burn_in", dgp.burn_in},
                {"validation", dgp.validation},
                {"test", dgp.test},
                {"seed", dgp.seed}}},
              {"replications", report.seeds.size()},
              {"seeds", report.seeds},
              {"methods", methods}};
  return doc.dump(2) + "\n";
}

void emit_reports(const fs::path& dir, const BoostPath& path, const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "I/O error: cannot create " + dir.string() + ": " + ec.message());

  const fs::path coef = dir / "coefficients.csv";
  std::ofstream c = open_out(coef);
  write_coefficients_csv(path, c);
  finish(c, coef);

  const fs::path json_file = dir / "path.json";
  std::ofstream j = open_out(json_file);
  j << path_json(path, config);
  finish(j, json_file);

  const fs::path pv = dir / "pvalue_paths.csv";
  std::ofstream p = open_out(pv);
  write_pvalue_paths_csv(path, p);
  finish(p, pv);
}

void emit_metrics(const fs::path& dir, const DgpConfig& dgp, const ReplicationReport& report) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "I/O error: cannot create " + dir.string() + ": " + ec.message());
  const fs::path file = dir / "metrics.json";
  std::ofstream out = open_out(file);
  out << metrics_json(dgp, report);
  finish(out, file);
}

std::vector<CoefficientRow> read_coefficients_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      trim(line) != "step,equation,variable,lag,estimate,se,tstat,pvalue") {
    throw Error(ErrorCode::kParse, "parse error: coefficients.csv header");
  }
  std::vector<CoefficientRow> rows;
  std::size_t line_no = 1;
  auto num = [&](const std::string& cell, const char* what) {
    const auto v = parse_double(cell);
    if (!v) {
      throw Error(ErrorCode::kParse, "parse error: coefficients.csv line " + std::to_string(line_no) +
                                         ": bad " + what + " '" + cell + "'");
    }
    return *v;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != 8) {
      throw Error(ErrorCode::kParse, "parse error: coefficients.csv line " + std::to_string(line_no));
    }
    CoefficientRow row;
    row.step = static_cast<int>(num(cells[0], "step"));
    row.equation = cells[1];
    row.variable = cells[2];
    row.lag = static_cast<int>(num(cells[3], "lag"));
    row.estimate = num(cells[4], "estimate");
    if (!cells[5].empty()) row.se = num(cells[5], "se");
    if (!cells[6].empty()) row.t = num(cells[6], "tstat");
    if (!cells[7].empty()) row.p = num(cells[7], "pvalue");
    rows.push_back(std::move(row));
  }
  return rows;
}

PathFile read_path_json(std::istream& in) {
  PathFile out;
  try {
    const json doc = json::parse(in);
    const json& cfg = doc.at("config");
    RunConfig& rc = out.config;
    rc.boost.variant = parse_variant(cfg.at("variant").get<std::string>());
    rc.boost.nu = cfg.at("nu").get<double>();
    rc.boost.k_stop = cfg.at("k_stop").get<int>();
    rc.boost.compute_inference = cfg.at("compute_inference").get<bool>();
    rc.p = cfg.at("p").get<int>();
    rc.demean = cfg.at("demean").get<bool>();
    rc.alpha = cfg.at("alpha").get<double>();
    rc.bonferroni = cfg.at("bonferroni").get<bool>();
    rc.input = cfg.at("input").get<std::string>();
    rc.apply_transforms = cfg.at("apply_transforms").get<bool>();
    rc.transform_row = parse_transform_row(cfg.at("transform_row").get<std::string>());
    rc.response = cfg.at("response").get<std::string>();
    if (!cfg.at("split").is_null()) {
      const json& s = cfg.at("split");
      rc.split = SplitFractions{s.at("train").get<double>(), s.at("validation").get<double>(),
                                s.at("test").get<double>()};
    }

    BoostPath& path = out.skeleton;
    path.config = rc.boost;
    path.lag_order = doc.at("lag_order").get<int>();
    path.rows = doc.at("rows").get<Index>();
    path.equations = doc.at("equations").get<Index>();
    path.n_groups = doc.at("n_groups").get<int>();
    path.layout.group_size = doc.at("group_size").get<int>();
    path.layout.whole_groups = doc.at("whole_groups").get<bool>();
    path.names = doc.at("names").get<std::vector<std::string>>();
    path.equation_names = doc.at("equation_names").get<std::vector<std::string>>();
    const auto means = doc.at("column_means").get<std::vector<double>>();
    path.column_means = Eigen::Map<const VectorXd>(means.data(), static_cast<Index>(means.size()));
    path.initial_sse = doc.at("initial_sse").get<double>();
    path.truncated = doc.at("truncated").get<bool>();
    path.design_fingerprint = std::stoull(doc.at("design_fingerprint").get<std::string>(), nullptr, 16);
    path.warnings = doc.at("warnings").get<std::vector<std::string>>();
    for (const json& s : doc.at("steps")) {
      PathRecord r;
      r.step = s.at("step").get<int>();
      r.sse = s.at("sse").get<double>();
      r.df = number_or_nan(s.at("df"));
      r.block = s.at("block").get<int>();
      r.selected.variable = s.at("variable").get<int>();
      r.selected.lag = s.at("lag").get<int>();
      path.records.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("parse error: path.json: ") + e.what());
  }
  return out;
}

LoadedRun load_run(const fs::path& dir) {
  std::ifstream pj = open_in(dir / "path.json");
  PathFile file = read_path_json(pj);
  std::ifstream cc = open_in(dir / "coefficients.csv");
  const std::vector<CoefficientRow> rows = read_coefficients_csv(cc);

  BoostPath& path = file.skeleton;
  std::map<std::string, int> variables;
  std::map<std::string, int> equations;
  for (int j = 0; j < path.n_groups; ++j) variables.emplace(variable_name(path, j), j);
  for (int i = 0; i < static_cast<int>(path.equations); ++i) equations.emplace(equation_name(path, i), i);

  const int w = path.layout.group_size;
  MatrixXd prev = MatrixXd::Zero(Index{w} * path.n_groups, path.equations);
  std::size_t next = 0;
  for (PathRecord& r : path.records) {
    MatrixXd cur = MatrixXd::Zero(prev.rows(), prev.cols());
    StepInference inf;
    inf.step = r.step;
    bool inferred = false;
    for (; next < rows.size() && rows[next].step == r.step; ++next) {
      const CoefficientRow& row = rows[next];
      const auto v = variables.find(row.variable);
      const auto e = equations.find(row.equation);
      if (v == variables.end() || e == equations.end() || row.lag < 1 || row.lag > w) {
        throw Error(ErrorCode::kParse, "parse error: coefficients.csv names an unknown coefficient");
      }
      cur(CoefficientTensor::row_of(v->second, row.lag, w), e->second) = row.estimate;
      if (row.p) {
        inferred = true;
        inf.rows.push_back({v->second, row.lag, e->second, row.estimate, row.se.value_or(kNaN),
                            row.t.value_or(kNaN), *row.p});
      }
    }
    const Index first = path.layout.first_row(r.block);
    r.increment = (cur - prev).middleRows(first, path.layout.width());
    if (inferred || (path.config.compute_inference && cur.isZero(0.0))) r.inference = std::move(inf);
    prev = std::move(cur);
  }
  if (next != rows.size()) {
    throw Error(ErrorCode::kParse, "parse error: coefficients.csv has steps beyond path.json");
  }
  path.final_state.phi_hat = CoefficientTensor(prev, w, path.n_groups);
  path.final_state.step = path.length();
  return {std::move(file.config), std::move(path)};
}

ReplicationReport read_metrics_json(std::istream& in) {
  ReplicationReport out;
  try {
    const json doc = json::parse(in);
    out.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
    for (const json& m : doc.at("methods")) {
      out.methods.push_back(m.at("name").get<std::string>());
      out.mean.push_back(metrics_from_json(m.at("mean")));
      std::vector<Metrics> per;
      for (const json& r : m.at("per_replication")) per.push_back(metrics_from_json(r));
      out.replications.push_back(std::move(per));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("parse error: metrics.json: ") + e.what());
  }
  return out;
}

}  // namespace boostvar
