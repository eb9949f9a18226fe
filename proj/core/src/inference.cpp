#include "boostvar/inference.hpp"

#include "boostvar/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

namespace boostvar {

MatrixXd update_annihilator(const MatrixXd& M, const MatrixXd& x_sel, const MatrixXd& a_sel,
                            double nu) {
  if (x_sel.rows() != M.rows() || a_sel.cols() != M.rows() || x_sel.cols() != a_sel.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "shape mismatch: annihilator update operands");
  }
  const MatrixXd aM = a_sel * M;
  MatrixXd out = M;
  out.noalias() -= nu * x_sel * aM;
  return out;
}

MatrixXd accumulate_map(const std::optional<MatrixXd>& tilde_a, const MatrixXd& a_sel,
                        const MatrixXd& M_prev, double nu) {
  MatrixXd increment = nu * (a_sel * M_prev);
  if (!tilde_a) return increment;
  if (tilde_a->rows() != increment.rows() || tilde_a->cols() != increment.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "shape mismatch: accumulated map");
  }
  return *tilde_a + increment;
}

InferenceAccumulator::InferenceAccumulator(Index rows)
    : m_(MatrixXd::Identity(rows, rows)), trace_m_(static_cast<double>(rows)) {}

void InferenceAccumulator::apply(int block, const Eigen::Ref<const MatrixXd>& x_sel,
                                 const MatrixXd& a_sel, double nu) {
  const MatrixXd aM = a_sel * m_;  // uses M^(k-1)

  auto [it, inserted] = maps_.try_emplace(block, MatrixXd::Zero(aM.rows(), aM.cols()));
  it->second.noalias() += nu * aM;

  // trace(x * aM) = sum_t x(t, :) . aM(:, t)
  trace_m_ -= nu * (x_sel.array() * aM.transpose().array()).sum();
  m_.noalias() -= nu * x_sel * aM;
  ++step_;
}

const MatrixXd* InferenceAccumulator::tilde_a(int block) const {
  auto it = maps_.find(block);
  return it == maps_.end() ? nullptr : &it->second;
}

SigmaEstimate estimate_sigma(const MatrixXd& residual, double df, Index rows) {
  SigmaEstimate out;
  out.denominator = std::max(static_cast<double>(rows) - df, 1.0);
  out.sigma2 = residual.colwise().squaredNorm().transpose() / out.denominator;
  return out;
}

MatrixXd standard_errors(const MatrixXd& tilde_a, const SigmaEstimate& sigma) {
  const VectorXd q = tilde_a.rowwise().squaredNorm();
  return (q * sigma.sigma2.transpose()).cwiseSqrt();
}

MatrixXd standard_errors(const MatrixXd* tilde_a, const SigmaEstimate& sigma) {
  if (tilde_a == nullptr) {
    throw Error(ErrorCode::kNotSelected, "variable not yet selected: no accumulated map");
  }
  return standard_errors(*tilde_a, sigma);
}

double p_value(double t) {
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  return std::erfc(std::abs(t) / std::numbers::sqrt2);
}

const InferenceRow* StepInference::find(int variable, int lag, int equation) const {
  const auto key = std::tie(variable, lag, equation);
  auto it = std::lower_bound(rows.begin(), rows.end(), key, [](const InferenceRow& r, const auto& k) {
    return std::tie(r.variable, r.lag, r.equation) < k;
  });
  if (it == rows.end() || std::tie(it->variable, it->lag, it->equation) != key) return nullptr;
  return &*it;
}

StepInference step_inference(const CoefficientTensor& phi, int step,
                             const InferenceAccumulator& accumulator, const SigmaEstimate& sigma,
                             const BlockLayout& layout) {
  if (accumulator.step() != step) {
    throw Error(ErrorCode::kOutOfSync, "inference out of sync: accumulator at step " +
                                           std::to_string(accumulator.step()) + ", state at step " +
                                           std::to_string(step));
  }
  StepInference out;
  out.step = step;
  const Index equations = phi.equations();
  for (Index r = 0; r < phi.phi.rows(); ++r) {
    if ((phi.phi.row(r).array() == 0.0).all()) continue;
    const int block = layout.block_of(r);
    const MatrixXd* map = accumulator.tilde_a(block);
    if (map == nullptr) {
      throw Error(ErrorCode::kNotSelected,
                  "variable not yet selected: nonzero coefficient without accumulated map");
    }
    const double q = map->row(layout.offset_in_block(r)).squaredNorm();
    for (Index i = 0; i < equations; ++i) {
      const double est = phi.phi(r, i);
      if (est == 0.0) continue;
      InferenceRow row;
      row.variable = static_cast<int>(r / phi.group_size);
      row.lag = static_cast<int>(r % phi.group_size) + 1;
      row.equation = static_cast<int>(i);
      row.estimate = est;
      row.se = std::sqrt(q * sigma.sigma2(i));
      if (row.se > 0.0) {
        row.t = est / row.se;
      } else {
        row.t = est > 0.0 ? std::numeric_limits<double>::infinity()
                          : -std::numeric_limits<double>::infinity();
      }
      row.p = p_value(row.t);
      out.rows.push_back(row);
    }
  }
  return out;
}

}  // namespace boostvar
