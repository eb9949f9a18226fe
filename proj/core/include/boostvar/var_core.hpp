#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace boostvar {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// T x d panel of observations; rows are time (oldest first), columns are variables.
///
/// Every entry is finite. Names default to y1..yd; row labels (dates) are optional
/// and only carried through for output.
class TimeSeriesMatrix {
 public:
  explicit TimeSeriesMatrix(MatrixXd values, std::vector<std::string> names = {},
                            std::vector<std::string> row_labels = {});

  const MatrixXd& values() const noexcept { return values_; }
  Index rows() const noexcept { return values_.rows(); }
  Index cols() const noexcept { return values_.cols(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<std::string>& row_labels() const noexcept { return row_labels_; }

  /// Contiguous block of rows [begin, begin + count).
  TimeSeriesMatrix slice_rows(Index begin, Index count) const;

 private:
  MatrixXd values_;
  std::vector<std::string> names_;
  std::vector<std::string> row_labels_;
};

/// Response and lag matrix of a VAR(p): row t of `design` holds (y_{t-1}', ..., y_{t-p}')
/// for the response row y_t'. Column (s-1)*d + j is lag s of variable j.
struct LaggedDesign {
  MatrixXd response;
  MatrixXd design;
  int p = 1;
  /// Column means removed before lagging (empty when not demeaned).
  VectorXd column_means;
};

/// Design whose columns are grouped into `n_groups` contiguous blocks of `group_size`.
///
/// For a VAR, block j collects lags 1..p of variable j in lag order, so grouped column
/// j*p + (s-1) is lag s of variable j. `permutation[c]` is the lagged-design column that
/// became grouped column c. A cross-section design is the special case group_size = 1.
struct GroupedDesign {
  MatrixXd design;
  int group_size = 1;
  int n_groups = 0;
  std::vector<Index> permutation;

  Index rows() const noexcept { return design.rows(); }
  Index cols() const noexcept { return design.cols(); }
  /// Column indices of group j (0-based).
  std::vector<Index> group_index(int j) const;
  auto group_block(int j) const { return design.middleCols(Index{j} * group_size, group_size); }

  /// Recovers the lagged (ungrouped) column order.
  MatrixXd ungrouped() const;

  /// Wraps a plain n x q matrix as q singleton groups (identity permutation).
  static GroupedDesign single_columns(MatrixXd x);
};

/// Coefficients in grouped order: row j*p + (s-1) holds the effect of lag s of
/// variable j on each equation (columns). Equivalently the stacked phi_(j)' blocks.
struct CoefficientTensor {
  MatrixXd phi;
  int group_size = 1;
  int n_groups = 0;

  CoefficientTensor() = default;
  CoefficientTensor(MatrixXd values, int group_size, int n_groups);
  static CoefficientTensor zeros(int group_size, int n_groups, Index equations);

  Index equations() const noexcept { return phi.cols(); }
  static Index row_of(int variable, int lag, int group_size) {
    return Index{variable} * group_size + (lag - 1);
  }

  /// d x d lag matrix phi_s with entry (i, j) = effect of y_{j,t-s} on y_{i,t}.
  MatrixXd lag_matrix(int lag) const;
  /// Builds a grouped tensor from lag matrices phi_1..phi_p.
  static CoefficientTensor from_lag_matrices(std::span<const MatrixXd> lags);

  struct Entry {
    int variable;  // 0-based
    int lag;       // 1-based
    int equation;  // 0-based
    double value;
  };
  /// Nonzero entries in (variable, lag, equation) order.
  std::vector<Entry> support() const;
  Index nonzeros() const;
};

/// VAR(p) in companion form, [[phi_1 ... phi_p], [I 0 ... 0], ...].
struct CompanionMatrix {
  MatrixXd F;
};

LaggedDesign build_lagged_design(const TimeSeriesMatrix& y, int p, bool demean);

GroupedDesign regroup_by_variable(const LaggedDesign& x);

CompanionMatrix companion(std::span<const MatrixXd> phis);

/// Maximum eigenvalue modulus of a square matrix.
double spectral_radius(const MatrixXd& F);

struct LsFit {
  MatrixXd coefficients;
  Index rank = 0;
  bool unique = true;
};

/// Least squares via SVD; rank-deficient designs get the minimum-norm solution
/// (singular values below 1e-10 * max are dropped) and unique = false.
LsFit least_squares_fit(const MatrixXd& design, const MatrixXd& response);

/// Grouped-order convenience overload.
CoefficientTensor least_squares_fit(const GroupedDesign& design, const MatrixXd& response,
                                    bool* unique = nullptr);

}  // namespace boostvar
