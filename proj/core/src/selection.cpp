#include "boostvar/selection.hpp"

#include "boostvar/error.hpp"

#include <cmath>
#include <limits>

namespace boostvar {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int argmin_lowest(const std::vector<double>& values) {
  int best = -1;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::isnan(values[i])) continue;
    if (best < 0 || values[i] < values[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

void require_nonempty(const BoostPath& path) {
  if (path.length() == 0) {
    throw Error(ErrorCode::kCriterionUndefined, "criterion undefined: empty path");
  }
}

}  // namespace

SelectionResult aicc(const BoostPath& path) {
  require_nonempty(path);
  if (!path.has_df()) {
    throw Error(ErrorCode::kCriterionUndefined,
                "criterion undefined: path has no degrees of freedom (inference disabled)");
  }
  const double n = static_cast<double>(path.rows);
  const double nd = n * static_cast<double>(path.equations);

  SelectionResult out;
  out.criterion.assign(static_cast<std::size_t>(path.length()), kNaN);
  for (int k = 1; k <= path.length(); ++k) {
    const PathRecord& r = path.records[static_cast<std::size_t>(k - 1)];
    if (!(r.df < n - 2.0) || !(r.sse > 0.0)) continue;
    out.criterion[static_cast<std::size_t>(k - 1)] =
        nd * std::log(r.sse / nd) + nd * (n + r.df) / (n - r.df - 2.0);
  }
  const int best = argmin_lowest(out.criterion);
  if (best < 0) throw Error(ErrorCode::kCriterionUndefined, "criterion undefined: no admissible step");
  out.chosen_step = best + 1;
  out.coefficients = path.coefficients_at(out.chosen_step);
  out.model_size = out.coefficients.nonzeros();
  return out;
}

ValidationDesign validation_design(const BoostPath& path, const TimeSeriesMatrix& validation) {
  if (path.lag_order < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "invalid argument: validation selection needs a VAR path");
  }
  if (validation.cols() != path.equations) {
    throw Error(ErrorCode::kShapeMismatch, "shape mismatch: validation columns != path equations");
  }
  if (validation.rows() <= path.lag_order) {
    throw Error(ErrorCode::kSegmentTooShort,
                "segment too short: validation set needs more than " +
                    std::to_string(path.lag_order) + " rows");
  }
  MatrixXd values = validation.values();
  if (path.column_means.size() == values.cols()) values.rowwise() -= path.column_means.transpose();
  const LaggedDesign lagged =
      build_lagged_design(TimeSeriesMatrix(std::move(values)), path.lag_order, false);
  GroupedDesign grouped = regroup_by_variable(lagged);
  return {lagged.response, std::move(grouped.design)};
}

SelectionResult select_by_validation(const BoostPath& path, const TimeSeriesMatrix& validation) {
  require_nonempty(path);
  const ValidationDesign val = validation_design(path, validation);
  const double scale = static_cast<double>(val.response.rows() * val.response.cols());

  SelectionResult out;
  out.criterion.reserve(static_cast<std::size_t>(path.length()));
  MatrixXd residual = val.response;
  for (const PathRecord& r : path.records) {
    const Index first = path.layout.first_row(r.block);
    residual.noalias() -= val.design.middleCols(first, r.increment.rows()) * r.increment;
    out.criterion.push_back(residual.squaredNorm() / scale);
  }
  out.chosen_step = argmin_lowest(out.criterion) + 1;
  out.coefficients = path.coefficients_at(out.chosen_step);
  out.model_size = out.coefficients.nonzeros();
  return out;
}

CoefficientTensor filter_by_pvalue(const StepInference& inference, const CoefficientTensor& phi,
                                   double alpha, bool bonferroni) {
  CoefficientTensor out = phi;
  const Index nonzeros = phi.nonzeros();
  const double level =
      bonferroni && nonzeros > 0 ? alpha / static_cast<double>(nonzeros) : alpha;
  for (const CoefficientTensor::Entry& e : phi.support()) {
    const InferenceRow* row = inference.find(e.variable, e.lag, e.equation);
    if (row == nullptr) {
      throw Error(ErrorCode::kIncompleteInference,
                  "incomplete inference: no p-value for a nonzero coefficient");
    }
    if (!(row->p < level)) {
      out.phi(CoefficientTensor::row_of(e.variable, e.lag, phi.group_size), e.equation) = 0.0;
    }
  }
  return out;
}

SelectionResult select_p_variant(const BoostPath& path, const TimeSeriesMatrix& validation,
                                 double alpha, bool bonferroni) {
  require_nonempty(path);
  const ValidationDesign val = validation_design(path, validation);
  const double scale = static_cast<double>(val.response.rows() * val.response.cols());

  SelectionResult out;
  out.criterion.reserve(static_cast<std::size_t>(path.length()));
  CoefficientTensor phi = path.coefficients_at(0);
  CoefficientTensor best;
  int best_step = 0;
  for (const PathRecord& r : path.records) {
    phi.phi.middleRows(path.layout.first_row(r.block), r.increment.rows()) += r.increment;
    if (!r.inference) {
      throw Error(ErrorCode::kIncompleteInference,
                  "incomplete inference: path was built without inference");
    }
    CoefficientTensor filtered = filter_by_pvalue(*r.inference, phi, alpha, bonferroni);
    const double mspe =
        (val.response - val.design * filtered.phi).squaredNorm() / scale;
    out.criterion.push_back(mspe);
    if (best_step == 0 || mspe < out.criterion[static_cast<std::size_t>(best_step - 1)]) {
      best_step = r.step;
      best = std::move(filtered);
    }
  }
  out.chosen_step = best_step;
  out.coefficients = std::move(best);
  out.model_size = out.coefficients.nonzeros();
  return out;
}

}  // namespace boostvar
