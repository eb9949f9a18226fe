#pragma once

#include "boostvar/boost_engine.hpp"

#include <vector>

namespace boostvar {

/// Outcome of choosing a stopping step along a path.
struct SelectionResult {
  int chosen_step = 0;
  /// Criterion value per step (index k-1); NaN where the step was not admissible.
  std::vector<double> criterion;
  /// Coefficients at the chosen step, after p-value filtering for the p-variants.
  CoefficientTensor coefficients;
  /// Nonzero count of `coefficients` (no intercept is ever counted).
  Index model_size = 0;
};

/// Corrected AIC per step on the pooled residual variance:
///   n*d*log(SSE_k/(n*d)) + n*d*(n + df_k)/(n - df_k - 2),  n = path rows.
/// Steps with df_k >= n - 2 are skipped. Ties go to the lowest step.
SelectionResult aicc(const BoostPath& path);

/// Mean squared prediction error of every step on a held-out block of the series.
/// The validation data are centered with the path's training means when it was demeaned.
SelectionResult select_by_validation(const BoostPath& path, const TimeSeriesMatrix& validation);

/// Zeroes every coefficient whose p-value is >= alpha. With `bonferroni`, alpha is divided
/// by the number of nonzeros at that step.
CoefficientTensor filter_by_pvalue(const StepInference& inference, const CoefficientTensor& phi,
                                   double alpha = 0.05, bool bonferroni = false);

/// Filter at level alpha at every step, then pick the step whose filtered coefficients
/// predict the validation block best.
SelectionResult select_p_variant(const BoostPath& path, const TimeSeriesMatrix& validation,
                                 double alpha = 0.05, bool bonferroni = false);

/// Validation response/design in the path's grouped coordinates.
struct ValidationDesign {
  MatrixXd response;
  MatrixXd design;
};
ValidationDesign validation_design(const BoostPath& path, const TimeSeriesMatrix& validation);

}  // namespace boostvar
