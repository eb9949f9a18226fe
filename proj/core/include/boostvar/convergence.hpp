#pragma once

#include "boostvar/boost_engine.hpp"

#include <string>
#include <vector>

namespace boostvar {

/// Design whose groups are rescaled to orthonormal blocks, X~_j = X_j P_j with
/// P_j = (X_j'X_j)^{-1/2}, plus what is needed to map coefficients back.
struct NormalizedDesign {
  GroupedDesign design;
  /// P_j per group; a zero matrix for excluded groups.
  std::vector<MatrixXd> transforms;
  /// Groups with a singular cross-product; their columns are zeroed.
  std::vector<int> excluded;
  std::vector<std::string> warnings;

  /// Coefficients on the original scale: phi_j = P_j * phi~_j.
  CoefficientTensor to_original(const CoefficientTensor& normalized) const;
};

NormalizedDesign normalize_groups(const GroupedDesign& design);

/// Smallest eigenvalue of X'X that is not numerically zero (below 1e-10 * largest).
double min_positive_eigenvalue(const MatrixXd& design);

/// Linear rate 1 - nu (2 - nu) lambda / (4 d), lambda = min_positive_eigenvalue(design).
double gamma(const GroupedDesign& design, double nu, int d);

struct BoundStep {
  int step = 0;
  double lhs_coef = 0.0;
  /// Coefficient bound with the squared fitted-value norm.
  double rhs_coef_squared = 0.0;
  /// Coefficient bound with the unsquared norm over sqrt(lambda).
  double rhs_coef_unsquared = 0.0;
  double lhs_pred = 0.0;
  double rhs_pred = 0.0;
};

struct BoundReport {
  double gamma = 1.0;
  double lambda_min = 0.0;
  double ls_fit_norm = 0.0;
  /// True when the design has more columns than rows; the coefficient target is then the
  /// min-norm LS fit on the step's active columns and the check is informational.
  bool rank_deficient = false;
  std::vector<BoundStep> steps;
  std::vector<int> prediction_violations;
  std::vector<int> coef_violations_squared;
  std::vector<int> coef_violations_unsquared;
};

/// Evaluates both convergence bounds at every recorded step of a path that was run on
/// `design` (normally a normalized one). `ls_target` is the LS fit of the same design.
BoundReport check_bounds(const BoostPath& path, const GroupedDesign& design,
                         const MatrixXd& response, const CoefficientTensor& ls_target,
                         double slack = 1e-8);

/// Same, computing the min-norm LS target internally.
BoundReport check_bounds(const BoostPath& path, const GroupedDesign& design,
                         const MatrixXd& response, double slack = 1e-8);

}  // namespace boostvar
