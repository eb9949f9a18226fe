#pragma once

#include "boostvar/var_core.hpp"

#include <map>
#include <optional>
#include <vector>

namespace boostvar {

/// How coefficient rows map onto selectable blocks. Group boosting selects whole
/// groups of `group_size` rows; single-column boosting selects one row at a time.
struct BlockLayout {
  int group_size = 1;
  bool whole_groups = true;

  int width() const noexcept { return whole_groups ? group_size : 1; }
  int block_of(Index row) const noexcept {
    return static_cast<int>(whole_groups ? row / group_size : row);
  }
  int offset_in_block(Index row) const noexcept {
    return static_cast<int>(whole_groups ? row % group_size : 0);
  }
  Index first_row(int block) const noexcept {
    return whole_groups ? Index{block} * group_size : Index{block};
  }
};

/// M' = (I - nu * x_sel * a_sel) * M, computed as the rank-w update M - nu * x_sel * (a_sel * M).
MatrixXd update_annihilator(const MatrixXd& M, const MatrixXd& x_sel, const MatrixXd& a_sel,
                            double nu);

/// A~' = A~ + nu * a_sel * M_prev, treating an absent map as zero.
MatrixXd accumulate_map(const std::optional<MatrixXd>& tilde_a, const MatrixXd& a_sel,
                        const MatrixXd& M_prev, double nu);

/// Tracks the annihilator M^(k) = I - B^(k), its trace-based degrees of freedom, and the
/// per-block linear maps A~_j^(k) from the response to the coefficient block.
///
/// Invariants: M^(k) * Y equals the boosting residual and A~_j^(k) * Y equals
/// coefficient block j at the same step.
class InferenceAccumulator {
 public:
  explicit InferenceAccumulator(Index rows);

  /// Records one boosting step that selected `block`. `a_sel` is (x'x)^{-1} x'.
  void apply(int block, const Eigen::Ref<const MatrixXd>& x_sel, const MatrixXd& a_sel, double nu);

  const MatrixXd& annihilator() const noexcept { return m_; }
  /// trace(B^(k)) = rows - trace(M^(k)).
  double df() const noexcept { return static_cast<double>(m_.rows()) - trace_m_; }
  int step() const noexcept { return step_; }
  Index rows() const noexcept { return m_.rows(); }

  /// nullptr when the block has never been selected.
  const MatrixXd* tilde_a(int block) const;
  const std::map<int, MatrixXd>& maps() const noexcept { return maps_; }

 private:
  MatrixXd m_;
  double trace_m_;
  int step_ = 0;
  std::map<int, MatrixXd> maps_;
};

/// Per-equation residual variances at step k.
struct SigmaEstimate {
  VectorXd sigma2;
  double denominator = 1.0;
};

/// sigma2_i = sum_t u_ti^2 / max(rows - df, 1).
SigmaEstimate estimate_sigma(const MatrixXd& residual, double df, Index rows);

/// se(s, i) = sqrt(sigma2_i * [A~ A~']_{ss}); only the diagonal of the Kronecker
/// covariance is formed.
MatrixXd standard_errors(const MatrixXd& tilde_a, const SigmaEstimate& sigma);
/// Throws "variable not yet selected" when the block has no map.
MatrixXd standard_errors(const MatrixXd* tilde_a, const SigmaEstimate& sigma);

/// Two-sided normal p-value 2 * (1 - Phi(|t|)).
double p_value(double t);

struct InferenceRow {
  int variable = 0;  // 0-based
  int lag = 1;       // 1-based
  int equation = 0;  // 0-based
  double estimate = 0.0;
  double se = 0.0;
  double t = 0.0;
  double p = 1.0;
};

/// One row per nonzero coefficient at a step, sorted by (variable, lag, equation);
/// never-selected coefficients have no row.
struct StepInference {
  int step = 0;
  std::vector<InferenceRow> rows;

  const InferenceRow* find(int variable, int lag, int equation) const;
};

StepInference step_inference(const CoefficientTensor& phi, int step,
                             const InferenceAccumulator& accumulator, const SigmaEstimate& sigma,
                             const BlockLayout& layout);

}  // namespace boostvar
