#include "boostvar/var_core.hpp"

#include "boostvar/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <string>

namespace boostvar {

TimeSeriesMatrix::TimeSeriesMatrix(MatrixXd values, std::vector<std::string> names,
                                   std::vector<std::string> row_labels)
    : values_(std::move(values)), names_(std::move(names)), row_labels_(std::move(row_labels)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw Error(ErrorCode::kInvalidData, "invalid data: time series must be at least 1x1");
  }
  if (!values_.allFinite()) {
    throw Error(ErrorCode::kInvalidData, "invalid data: non-finite entry in time series");
  }
  if (names_.empty()) {
    names_.reserve(static_cast<std::size_t>(values_.cols()));
    for (Index j = 0; j < values_.cols(); ++j) names_.push_back("y" + std::to_string(j + 1));
  } else if (static_cast<Index>(names_.size()) != values_.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "shape mismatch: names do not match column count");
  }
  if (!row_labels_.empty() && static_cast<Index>(row_labels_.size()) != values_.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "shape mismatch: row labels do not match row count");
  }
}

TimeSeriesMatrix TimeSeriesMatrix::slice_rows(Index begin, Index count) const {
  if (begin < 0 || count < 1 || begin + count > rows()) {
    throw Error(ErrorCode::kInvalidArgument, "invalid argument: row slice out of range");
  }
  std::vector<std::string> labels;
  if (!row_labels_.empty()) {
    labels.assign(row_labels_.begin() + begin, row_labels_.begin() + begin + count);
  }
  return TimeSeriesMatrix(values_.middleRows(begin, count), names_, std::move(labels));
}

std::vector<Index> GroupedDesign::group_index(int j) const {
  std::vector<Index> cols;
  for (int s = 0; s < group_size; ++s) cols.push_back(Index{j} * group_size + s);
  return cols;
}

MatrixXd GroupedDesign::ungrouped() const {
  MatrixXd out(design.rows(), design.cols());
  for (Index c = 0; c < design.cols(); ++c) out.col(permutation[static_cast<std::size_t>(c)]) = design.col(c);
  return out;
}

GroupedDesign GroupedDesign::single_columns(MatrixXd x) {
  GroupedDesign gd;
  gd.group_size = 1;
  gd.n_groups = static_cast<int>(x.cols());
  gd.permutation.resize(static_cast<std::size_t>(x.cols()));
  for (Index c = 0; c < x.cols(); ++c) gd.permutation[static_cast<std::size_t>(c)] = c;
  gd.design = std::move(x);
  return gd;
}

CoefficientTensor::CoefficientTensor(MatrixXd values, int group_size_, int n_groups_)
    : phi(std::move(values)), group_size(group_size_), n_groups(n_groups_) {
  if (phi.rows() != Index{group_size} * n_groups) {
    throw Error(ErrorCode::kShapeMismatch, "shape mismatch: coefficient rows != p*d");
  }
  if (!phi.allFinite()) {
    throw Error(ErrorCode::kInvalidData, "invalid data: non-finite coefficient");
  }
}

CoefficientTensor CoefficientTensor::zeros(int group_size, int n_groups, Index equations) {
  return CoefficientTensor(MatrixXd::Zero(Index{group_size} * n_groups, equations), group_size,
                           n_groups);
}

MatrixXd CoefficientTensor::lag_matrix(int lag) const {
  MatrixXd out(phi.cols(), n_groups);
  for (int j = 0; j < n_groups; ++j) {
    out.col(j) = phi.row(row_of(j, lag, group_size)).transpose();
  }
  return out;
}

CoefficientTensor CoefficientTensor::from_lag_matrices(std::span<const MatrixXd> lags) {
  if (lags.empty()) throw Error(ErrorCode::kShapeMismatch, "shape mismatch: no lag matrices");
  const Index d = lags.front().rows();
  const int p = static_cast<int>(lags.size());
  MatrixXd phi(Index{p} * d, d);
  for (int s = 1; s <= p; ++s) {
    const MatrixXd& m = lags[static_cast<std::size_t>(s - 1)];
    if (m.rows() != d || m.cols() != d) {
      throw Error(ErrorCode::kShapeMismatch, "shape mismatch: lag matrices must be d x d");
    }
    for (Index j = 0; j < d; ++j) phi.row(row_of(static_cast<int>(j), s, p)) = m.col(j).transpose();
  }
  return CoefficientTensor(std::move(phi), p, static_cast<int>(d));
}

std::vector<CoefficientTensor::Entry> CoefficientTensor::support() const {
  std::vector<Entry> out;
  for (int j = 0; j < n_groups; ++j) {
    for (int s = 1; s <= group_size; ++s) {
      const Index r = row_of(j, s, group_size);
      for (Index i = 0; i < phi.cols(); ++i) {
        if (phi(r, i) != 0.0) out.push_back({j, s, static_cast<int>(i), phi(r, i)});
      }
    }
  }
  return out;
}

Index CoefficientTensor::nonzeros() const { return (phi.array() != 0.0).count(); }

LaggedDesign build_lagged_design(const TimeSeriesMatrix& y, int p, bool demean) {
  if (p < 1) throw Error(ErrorCode::kInvalidArgument, "invalid argument: lag order must be >= 1");
  const Index T = y.rows();
  const Index d = y.cols();
  if (T <= p) {
    throw Error(ErrorCode::kInsufficientObservations,
                "insufficient observations: need more than " + std::to_string(p) + " rows, got " +
                    std::to_string(T));
  }
  MatrixXd values = y.values();
  LaggedDesign out;
  out.p = p;
  if (demean) {
    out.column_means = values.colwise().mean().transpose();
    values.rowwise() -= out.column_means.transpose();
  }
  const Index rows = T - p;
  out.response = values.bottomRows(rows);
  out.design.resize(rows, Index{p} * d);
  for (int s = 1; s <= p; ++s) {
    out.design.middleCols(Index{s - 1} * d, d) = values.middleRows(p - s, rows);
  }
  return out;
}

GroupedDesign regroup_by_variable(const LaggedDesign& x) {
  const int p = x.p;
  const Index cols = x.design.cols();
  if (p < 1 || cols % p != 0) {
    throw Error(ErrorCode::kShapeMismatch, "shape mismatch: design columns not a multiple of p");
  }
  const int d = static_cast<int>(cols / p);
  GroupedDesign gd;
  gd.group_size = p;
  gd.n_groups = d;
  gd.design.resize(x.design.rows(), cols);
  gd.permutation.resize(static_cast<std::size_t>(cols));
  for (int j = 0; j < d; ++j) {
    for (int s = 1; s <= p; ++s) {
      const Index grouped = CoefficientTensor::row_of(j, s, p);
      const Index lagged = Index{s - 1} * d + j;
      gd.design.col(grouped) = x.design.col(lagged);
      gd.permutation[static_cast<std::size_t>(grouped)] = lagged;
    }
  }
  return gd;
}

CompanionMatrix companion(std::span<const MatrixXd> phis) {
  if (phis.empty()) throw Error(ErrorCode::kShapeMismatch, "shape mismatch: no coefficient blocks");
  const Index d = phis.front().rows();
  const Index p = static_cast<Index>(phis.size());
  for (const MatrixXd& m : phis) {
    if (m.rows() != d || m.cols() != d) {
      throw Error(ErrorCode::kShapeMismatch, "shape mismatch: companion blocks must be d x d");
    }
  }
  CompanionMatrix out{MatrixXd::Zero(p * d, p * d)};
  for (Index s = 0; s < p; ++s) out.F.block(0, s * d, d, d) = phis[static_cast<std::size_t>(s)];
  if (p > 1) out.F.block(d, 0, (p - 1) * d, (p - 1) * d).setIdentity();
  return out;
}

double spectral_radius(const MatrixXd& F) {
  if (F.rows() != F.cols()) throw Error(ErrorCode::kShapeMismatch, "shape mismatch: matrix not square");
  if (!F.allFinite()) throw Error(ErrorCode::kInvalidData, "invalid data: non-finite matrix");
  if (F.size() == 0) return 0.0;
  Eigen::EigenSolver<MatrixXd> solver(F, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kNumericalFailure, "numerical failure: eigenvalue solver did not converge");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

LsFit least_squares_fit(const MatrixXd& design, const MatrixXd& response) {
  if (design.rows() != response.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "shape mismatch: design and response rows differ");
  }
  LsFit fit;
  if (design.cols() == 0) {
    fit.coefficients = MatrixXd::Zero(0, response.cols());
    return fit;
  }
  Eigen::BDCSVD<MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  fit.coefficients = svd.solve(response);
  fit.rank = svd.rank();
  fit.unique = fit.rank == design.cols();
  return fit;
}

CoefficientTensor least_squares_fit(const GroupedDesign& design, const MatrixXd& response,
                                    bool* unique) {
  LsFit fit = least_squares_fit(design.design, response);
  if (unique) *unique = fit.unique;
  return CoefficientTensor(std::move(fit.coefficients), design.group_size, design.n_groups);
}

}  // namespace boostvar
