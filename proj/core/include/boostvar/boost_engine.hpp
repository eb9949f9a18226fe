#pragma once

#include "boostvar/inference.hpp"
#include "boostvar/var_core.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace boostvar {

enum class Variant {
  kGroup,         ///< LS-Boost1: select a variable with all of its lags
  kSingleLag,     ///< LS-Boost2: select one lag column of one variable
  kCrossSection,  ///< componentwise LS-Boost on scalar columns (one response)
};

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

struct BoostConfig {
  Variant variant = Variant::kGroup;
  double nu = 0.1;
  int k_stop = 500;
  bool compute_inference = true;

  /// Throws kInvalidArgument unless 0 < nu <= 1 and k_stop >= 1.
  void validate() const;
};

/// Selected block: `lag` is 0 when the whole variable (all lags) was selected.
struct SelectedBlock {
  int variable = 0;  // 0-based
  int lag = 0;       // 1-based, 0 = all lags

  friend bool operator==(const SelectedBlock&, const SelectedBlock&) = default;
};

/// Per-block quantities that stay fixed over a path: (X_b'X_b)^{-1} and (X_b'X_b)^{-1}X_b'.
class DesignCache {
 public:
  struct Block {
    Index first_column = 0;
    int width = 1;
    bool usable = false;
    MatrixXd gram_inverse;
    MatrixXd hat_map;
  };

  DesignCache(const GroupedDesign& design, Variant variant);

  int size() const noexcept { return static_cast<int>(blocks_.size()); }
  const Block& block(int b) const { return blocks_[static_cast<std::size_t>(b)]; }
  const BlockLayout& layout() const noexcept { return layout_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  SelectedBlock describe(int b) const;

 private:
  BlockLayout layout_;
  std::vector<Block> blocks_;
  std::vector<std::string> warnings_;
};

struct Selection {
  int block = 0;
  SelectedBlock selected;
  MatrixXd beta;  ///< unshrunk LS fit of the residual on the block (width x equations)
  double sse = 0.0;
};

/// Step 1 of group boosting: the variable whose lag block best fits the residual.
/// Ties go to the lowest variable index.
Selection select_group(const MatrixXd& residual, const GroupedDesign& design);
/// Step 1 of single-lag boosting over all p*d columns; ties go lexicographically (j, then s).
Selection select_single_lag(const MatrixXd& residual, const GroupedDesign& design);
/// Selection against a prebuilt cache (variant taken from the cache's layout).
Selection select_block(const MatrixXd& residual, const GroupedDesign& design,
                       const DesignCache& cache);

struct BoostState {
  CoefficientTensor phi_hat;
  MatrixXd residual;
  int step = 0;
  std::vector<SelectedBlock> selected_history;

  static BoostState initial(const GroupedDesign& design, const MatrixXd& response);
};

/// One boosting update: the selected block moves by nu * beta and the residual by
/// nu * X_sel * beta. Unselected coefficients are untouched.
BoostState boost_step(const BoostState& state, const GroupedDesign& design,
                      const DesignCache& cache, const BoostConfig& config);

struct PathRecord {
  int step = 0;
  SelectedBlock selected;
  int block = 0;
  MatrixXd increment;  ///< nu * beta for the selected block
  double sse = 0.0;
  double df = std::numeric_limits<double>::quiet_NaN();  ///< trace(B^(k)) when inference is on
  std::optional<StepInference> inference;
};

struct BoostPath {
  BoostConfig config;
  BlockLayout layout;
  int n_groups = 0;
  Index equations = 0;
  Index rows = 0;
  /// Lag order for VAR fits; 0 for cross-section fits.
  int lag_order = 0;
  double initial_sse = 0.0;
  /// True when the run stopped before k_stop because the residual vanished.
  bool truncated = false;
  std::uint64_t design_fingerprint = 0;
  /// Means removed from the data before fitting (empty when not demeaned).
  VectorXd column_means;
  /// Regressor names by group, and response names by equation (may be empty).
  std::vector<std::string> names;
  std::vector<std::string> equation_names;
  std::vector<std::string> warnings;
  std::vector<PathRecord> records;
  BoostState final_state;

  int length() const noexcept { return static_cast<int>(records.size()); }
  bool has_df() const noexcept;
  /// Coefficients after step k (0 <= k <= length()), replayed from the increments.
  CoefficientTensor coefficients_at(int k) const;
};

std::uint64_t design_fingerprint(const GroupedDesign& design);

/// Runs boosting on an explicit grouped design.
BoostPath run_path(const GroupedDesign& design, const MatrixXd& response, const BoostConfig& config);

/// Builds the VAR(p) design from raw data and runs the configured variant.
BoostPath run_path(const TimeSeriesMatrix& y, int p, const BoostConfig& config, bool demean = false);

/// Componentwise LS-Boost for a single-response regression on the columns of `design`.
BoostPath boost_ls_cross_section(const MatrixXd& design, const VectorXd& response,
                                 BoostConfig config);

StepInference step_inference(const BoostState& state, const InferenceAccumulator& accumulator,
                             const SigmaEstimate& sigma, const BlockLayout& layout);

}  // namespace boostvar
