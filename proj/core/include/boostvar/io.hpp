#pragma once

#include "boostvar/boost_engine.hpp"
#include "boostvar/selection.hpp"
#include "boostvar/simulation.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace boostvar {

/// Whether the line after the header holds per-column transform codes.
enum class TransformRow {
  kAuto,     // present when its first cell starts with "transform" or "tcode"
  kPresent,
  kAbsent,
};

/// Raw CSV panel: missing cells are NaN, dates (first column "date"/"sasdate") kept aside.
struct Panel {
  std::vector<std::string> names;
  std::vector<std::string> dates;
  std::vector<int> codes;  // empty when the file has no transform row
  MatrixXd values;
};

Panel parse_panel(std::istream& in, TransformRow mode = TransformRow::kAuto);
Panel read_panel(const std::filesystem::path& file, TransformRow mode = TransformRow::kAuto);

/// Applies one transform code to a column; leading entries that cannot be formed are NaN.
///   1 level, 2 diff, 3 second diff, 4 log, 5 diff log, 6 second diff log,
///   7 diff of the growth rate x_t / x_{t-1} - 1.
VectorXd apply_transform(const VectorXd& column, int code, const std::string& name);

/// Transforms (when codes are present and `apply_transforms` is set), then drops every
/// row that still has a missing value.
TimeSeriesMatrix ingest(const Panel& panel, bool apply_transforms = true);

void write_panel(const TimeSeriesMatrix& y, std::ostream& out);

struct SplitFractions {
  double train = 0.5;
  double validation = 0.25;
  double test = 0.25;
  void validate() const;
};

struct SplitCounts {
  Index train = 0;
  Index validation = 0;
  Index test = 0;
};

/// Validation and test get floor(rows * fraction); train takes the rest.
SplitCounts split_counts(Index rows, const SplitFractions& fractions);

struct Segments {
  SplitCounts counts;
  TimeSeriesMatrix train;
  TimeSeriesMatrix validation;
  TimeSeriesMatrix test;
  /// Validation/test preceded by the last `p` rows of the previous segment, so that
  /// their lagged designs have exactly `counts.validation` / `counts.test` rows.
  TimeSeriesMatrix validation_lagged;
  TimeSeriesMatrix test_lagged;
};

/// Contiguous train -> validation -> test partition. Every segment must exceed p rows.
Segments split(const TimeSeriesMatrix& y, const SplitFractions& fractions, int p);

/// Settings of a `fit` run, stored alongside its reports so later commands can replay it.
struct RunConfig {
  BoostConfig boost;
  int p = 1;
  bool demean = true;
  double alpha = 0.05;
  bool bonferroni = false;
  std::optional<SplitFractions> split;
  std::string input;
  bool apply_transforms = true;
  TransformRow transform_row = TransformRow::kAuto;
  /// Response column for cross-section fits (empty = last column).
  std::string response;
};

/// 17 significant digits, locale independent.
std::string format_double(double v);

void write_coefficients_csv(const BoostPath& path, std::ostream& out);
void write_pvalue_paths_csv(const BoostPath& path, std::ostream& out);
std::string path_json(const BoostPath& path, const RunConfig& config);
std::string selection_json(const BoostPath& path, const SelectionResult& result,
                           const std::string& criterion, Index unfiltered_size);
std::string metrics_json(const DgpConfig& dgp, const ReplicationReport& report);

/// Writes coefficients.csv, path.json and pvalue_paths.csv into `dir` (created if needed).
void emit_reports(const std::filesystem::path& dir, const BoostPath& path, const RunConfig& config);
void emit_metrics(const std::filesystem::path& dir, const DgpConfig& dgp,
                  const ReplicationReport& report);

struct CoefficientRow {
  int step = 0;
  std::string equation;
  std::string variable;
  int lag = 1;
  double estimate = 0.0;
  std::optional<double> se;
  std::optional<double> t;
  std::optional<double> p;
};
std::vector<CoefficientRow> read_coefficients_csv(std::istream& in);

/// Everything path.json records.
struct PathFile {
  RunConfig config;
  BoostPath skeleton;  // metadata plus per-step block, sse and df; increments empty
};
PathFile read_path_json(std::istream& in);

/// Rebuilds a path (increments and per-step inference) from a report directory.
struct LoadedRun {
  RunConfig config;
  BoostPath path;
};
LoadedRun load_run(const std::filesystem::path& dir);

ReplicationReport read_metrics_json(std::istream& in);

/// Small CSV splitter shared with the command-line tools (handles double quotes).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace boostvar
