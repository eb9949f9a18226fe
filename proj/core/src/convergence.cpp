#include "boostvar/convergence.hpp"

#include "boostvar/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace boostvar {

namespace {

constexpr double kZeroEigen = 1e-10;
constexpr double kMaxCondition = 1e12;

// Least squares restricted to the nonzero rows of `phi`, embedded back at full size.
MatrixXd restricted_ls(const GroupedDesign& design, const MatrixXd& response,
                       const std::vector<Index>& active, Index equations) {
  MatrixXd out = MatrixXd::Zero(design.cols(), equations);
  if (active.empty()) return out;
  MatrixXd sub(design.rows(), static_cast<Index>(active.size()));
  for (std::size_t c = 0; c < active.size(); ++c) sub.col(static_cast<Index>(c)) = design.design.col(active[c]);
  const LsFit fit = least_squares_fit(sub, response);
  for (std::size_t c = 0; c < active.size(); ++c) out.row(active[c]) = fit.coefficients.row(static_cast<Index>(c));
  return out;
}

}  // namespace

CoefficientTensor NormalizedDesign::to_original(const CoefficientTensor& normalized) const {
  CoefficientTensor out = normalized;
  const int w = normalized.group_size;
  for (int j = 0; j < normalized.n_groups; ++j) {
    out.phi.middleRows(Index{j} * w, w) =
        transforms[static_cast<std::size_t>(j)] * normalized.phi.middleRows(Index{j} * w, w);
  }
  return out;
}

NormalizedDesign normalize_groups(const GroupedDesign& design) {
  NormalizedDesign out;
  out.design = design;
  const int w = design.group_size;
  for (int j = 0; j < design.n_groups; ++j) {
    const auto x = design.group_block(j);
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(x.transpose() * x);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (eig.info() != Eigen::Success || !(lo > 0.0) || hi / lo > kMaxCondition) {
      out.excluded.push_back(j);
      out.warnings.push_back("excluding group " + std::to_string(j + 1) + ": singular cross-product");
      out.transforms.push_back(MatrixXd::Zero(w, w));
      out.design.design.middleCols(Index{j} * w, w).setZero();
      continue;
    }
    MatrixXd p = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                 eig.eigenvectors().transpose();
    out.design.design.middleCols(Index{j} * w, w) = x * p;
    out.transforms.push_back(std::move(p));
  }
  return out;
}

double min_positive_eigenvalue(const MatrixXd& design) {
  const MatrixXd gram = design.transpose() * design;
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::kNumericalFailure, "numerical failure: eigen-decomposition of X'X");
  }
  const double hi = gram.size() ? eig.eigenvalues().maxCoeff() : 0.0;
  if (!(hi > 0.0)) throw Error(ErrorCode::kDegenerateDesign, "degenerate design: X'X has no positive eigenvalue");
  double lo = hi;
  for (double v : eig.eigenvalues()) {
    if (v > kZeroEigen * hi && v < lo) lo = v;
  }
  return lo;
}

double gamma(const GroupedDesign& design, double nu, int d) {
  if (!(nu >= 0.0 && nu <= 1.0) || d < 1) {
    throw Error(ErrorCode::kInvalidArgument, "invalid argument: need nu in [0, 1] and d >= 1");
  }
  const double lambda = min_positive_eigenvalue(design.design);
  return 1.0 - nu * (2.0 - nu) * lambda / (4.0 * d);
}

BoundReport check_bounds(const BoostPath& path, const GroupedDesign& design,
                         const MatrixXd& response, const CoefficientTensor& ls_target,
                         double slack) {
  if (design_fingerprint(design) != path.design_fingerprint) {
    throw Error(ErrorCode::kDesignMismatch, "design mismatch: path was not run on this design");
  }
  if (response.rows() != design.rows() || response.cols() != path.equations ||
      ls_target.phi.rows() != design.cols() || ls_target.phi.cols() != path.equations) {
    throw Error(ErrorCode::kShapeMismatch, "shape mismatch: response or LS target");
  }

  BoundReport report;
  report.lambda_min = min_positive_eigenvalue(design.design);
  report.gamma = 1.0 - path.config.nu * (2.0 - path.config.nu) * report.lambda_min /
                           (4.0 * design.n_groups);
  const MatrixXd ls_fitted = design.design * ls_target.phi;
  report.ls_fit_norm = ls_fitted.norm();
  report.rank_deficient = design.rows() < design.cols();

  const double coef_scale_sq = report.ls_fit_norm * report.ls_fit_norm / report.lambda_min;
  const double coef_scale = report.ls_fit_norm / std::sqrt(report.lambda_min);

  MatrixXd phi = MatrixXd::Zero(design.cols(), path.equations);
  MatrixXd fitted = MatrixXd::Zero(design.rows(), path.equations);
  std::vector<Index> active;
  MatrixXd target = ls_target.phi;

  for (const PathRecord& r : path.records) {
    const Index first = path.layout.first_row(r.block);
    const Index width = r.increment.rows();
    phi.middleRows(first, width) += r.increment;
    fitted.noalias() += design.design.middleCols(first, width) * r.increment;

    if (report.rank_deficient) {
      std::vector<Index> now;
      for (Index row = 0; row < phi.rows(); ++row) {
        if ((phi.row(row).array() != 0.0).any()) now.push_back(row);
      }
      if (now != active) {
        active = std::move(now);
        target = restricted_ls(design, response, active, path.equations);
      }
    }

    BoundStep s;
    s.step = r.step;
    const double rate = std::pow(report.gamma, 0.5 * r.step);
    s.lhs_pred = (fitted - ls_fitted).norm();
    s.rhs_pred = report.ls_fit_norm * rate;
    s.lhs_coef = (phi - target).norm();
    s.rhs_coef_squared = coef_scale_sq * rate;
    s.rhs_coef_unsquared = coef_scale * rate;
    if (s.lhs_pred > s.rhs_pred + slack) report.prediction_violations.push_back(s.step);
    if (s.lhs_coef > s.rhs_coef_squared + slack) report.coef_violations_squared.push_back(s.step);
    if (s.lhs_coef > s.rhs_coef_unsquared + slack) report.coef_violations_unsquared.push_back(s.step);
    report.steps.push_back(s);
  }
  return report;
}

BoundReport check_bounds(const BoostPath& path, const GroupedDesign& design,
                         const MatrixXd& response, double slack) {
  const LsFit fit = least_squares_fit(design.design, response);
  const CoefficientTensor target(fit.coefficients, design.group_size, design.n_groups);
  return check_bounds(path, design, response, target, slack);
}

}  // namespace boostvar
