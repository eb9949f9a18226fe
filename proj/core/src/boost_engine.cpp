#include "boostvar/boost_engine.hpp"

#include "boostvar/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstring>

namespace boostvar {

namespace {

// Groups whose cross-product has condition number above this are treated as singular.
constexpr double kMaxCondition = 1e12;
// A path stops once the residual SSE falls below this fraction of the starting SSE.
constexpr double kVanishingSse = 1e-14;

void advance(BoostState& state, const GroupedDesign& design, const DesignCache& cache, double nu,
             InferenceAccumulator* accumulator, PathRecord* record) {
  Selection sel = select_block(state.residual, design, cache);
  const DesignCache::Block& blk = cache.block(sel.block);
  const auto x_sel = design.design.middleCols(blk.first_column, blk.width);

  MatrixXd increment = nu * sel.beta;
  state.phi_hat.phi.middleRows(blk.first_column, blk.width) += increment;
  state.residual.noalias() -= x_sel * increment;
  if (accumulator) accumulator->apply(sel.block, x_sel, blk.hat_map, nu);
  ++state.step;
  state.selected_history.push_back(sel.selected);

  if (record) {
    record->step = state.step;
    record->selected = sel.selected;
    record->block = sel.block;
    record->increment = std::move(increment);
    record->sse = state.residual.squaredNorm();
  }
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kGroup: return "group";
    case Variant::kSingleLag: return "lag";
    case Variant::kCrossSection: return "cross";
  }
  return "group";
}

Variant parse_variant(std::string_view name) {
  if (name == "group") return Variant::kGroup;
  if (name == "lag") return Variant::kSingleLag;
  if (name == "cross") return Variant::kCrossSection;
  throw Error(ErrorCode::kInvalidArgument,
              "invalid argument: unknown variant '" + std::string(name) + "'");
}

void BoostConfig::validate() const {
  if (!(nu > 0.0 && nu <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid argument: learning rate must be in (0, 1]");
  }
  if (k_stop < 1) throw Error(ErrorCode::kInvalidArgument, "invalid argument: k_stop must be >= 1");
}

DesignCache::DesignCache(const GroupedDesign& design, Variant variant) {
  layout_.group_size = design.group_size;
  layout_.whole_groups = variant == Variant::kGroup;
  const int width = layout_.width();
  const int count = layout_.whole_groups ? design.n_groups : static_cast<int>(design.cols());
  blocks_.resize(static_cast<std::size_t>(count));

  for (int b = 0; b < count; ++b) {
    Block& blk = blocks_[static_cast<std::size_t>(b)];
    blk.first_column = layout_.first_row(b);
    blk.width = width;
    const auto x = design.design.middleCols(blk.first_column, width);
    const MatrixXd gram = x.transpose() * x;

    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(gram);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (eig.info() != Eigen::Success || !(lo > 0.0) || hi / lo > kMaxCondition) {
      const SelectedBlock who = describe(b);
      warnings_.push_back("skipping variable " + std::to_string(who.variable + 1) +
                          (who.lag > 0 ? " lag " + std::to_string(who.lag) : std::string()) +
                          ": singular cross-product");
      continue;
    }
    blk.usable = true;
    blk.gram_inverse = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
                       eig.eigenvectors().transpose();
    blk.hat_map = blk.gram_inverse * x.transpose();
  }
}

SelectedBlock DesignCache::describe(int b) const {
  if (layout_.whole_groups) return {b, 0};
  return {b / layout_.group_size, b % layout_.group_size + 1};
}

Selection select_block(const MatrixXd& residual, const GroupedDesign& design,
                       const DesignCache& cache) {
  if (residual.rows() != design.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "shape mismatch: residual rows != design rows");
  }
  const MatrixXd cross = design.design.transpose() * residual;
  const double total = residual.squaredNorm();

  Selection best;
  bool found = false;
  for (int b = 0; b < cache.size(); ++b) {
    const DesignCache::Block& blk = cache.block(b);
    if (!blk.usable) continue;
    const auto c = cross.middleRows(blk.first_column, blk.width);
    MatrixXd beta = blk.gram_inverse * c;
    const double sse = total - (beta.array() * c.array()).sum();
    if (!found || sse < best.sse) {
      best.block = b;
      best.sse = sse;
      best.beta = std::move(beta);
      found = true;
    }
  }
  if (!found) throw Error(ErrorCode::kDegenerateDesign, "degenerate design: every block is singular");
  best.selected = cache.describe(best.block);
  return best;
}

Selection select_group(const MatrixXd& residual, const GroupedDesign& design) {
  return select_block(residual, design, DesignCache(design, Variant::kGroup));
}

Selection select_single_lag(const MatrixXd& residual, const GroupedDesign& design) {
  return select_block(residual, design, DesignCache(design, Variant::kSingleLag));
}

BoostState BoostState::initial(const GroupedDesign& design, const MatrixXd& response) {
  if (response.rows() != design.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "shape mismatch: response rows != design rows");
  }
  BoostState s;
  s.phi_hat = CoefficientTensor::zeros(design.group_size, design.n_groups, response.cols());
  s.residual = response;
  return s;
}

BoostState boost_step(const BoostState& state, const GroupedDesign& design,
                      const DesignCache& cache, const BoostConfig& config) {
  config.validate();
  if (state.step >= config.k_stop) {
    throw Error(ErrorCode::kInvalidArgument, "invalid argument: state already at k_stop");
  }
  BoostState next = state;
  advance(next, design, cache, config.nu, nullptr, nullptr);
  return next;
}

bool BoostPath::has_df() const noexcept {
  for (const PathRecord& r : records) {
    if (std::isnan(r.df)) return false;
  }
  return true;
}

CoefficientTensor BoostPath::coefficients_at(int k) const {
  if (k < 0 || k > length()) {
    throw Error(ErrorCode::kInvalidArgument, "invalid argument: step outside path");
  }
  CoefficientTensor phi = CoefficientTensor::zeros(layout.group_size, n_groups, equations);
  for (int i = 0; i < k; ++i) {
    const PathRecord& r = records[static_cast<std::size_t>(i)];
    phi.phi.middleRows(layout.first_row(r.block), r.increment.rows()) += r.increment;
  }
  return phi;
}

std::uint64_t design_fingerprint(const GroupedDesign& design) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  const Index dims[3] = {design.rows(), design.cols(), design.group_size};
  mix(dims, sizeof dims);
  mix(design.design.data(), sizeof(double) * static_cast<std::size_t>(design.design.size()));
  return h;
}

BoostPath run_path(const GroupedDesign& design, const MatrixXd& response, const BoostConfig& config) {
  config.validate();
  if (!response.allFinite() || !design.design.allFinite()) {
    throw Error(ErrorCode::kInvalidData, "invalid data: non-finite design or response");
  }
  const Variant selection_variant =
      config.variant == Variant::kGroup ? Variant::kGroup : Variant::kSingleLag;
  const DesignCache cache(design, selection_variant);

  BoostPath path;
  path.config = config;
  path.layout = cache.layout();
  path.n_groups = design.n_groups;
  path.equations = response.cols();
  path.rows = response.rows();
  path.design_fingerprint = design_fingerprint(design);
  path.warnings = cache.warnings();

  BoostState state = BoostState::initial(design, response);
  path.initial_sse = state.residual.squaredNorm();

  std::optional<InferenceAccumulator> accumulator;
  if (config.compute_inference) accumulator.emplace(response.rows());

  path.records.reserve(static_cast<std::size_t>(config.k_stop));
  for (int k = 1; k <= config.k_stop; ++k) {
    if (state.residual.squaredNorm() < kVanishingSse * path.initial_sse) {
      path.truncated = true;
      break;
    }
    PathRecord record;
    advance(state, design, cache, config.nu, accumulator ? &*accumulator : nullptr, &record);
    if (accumulator) {
      record.df = accumulator->df();
      const SigmaEstimate sigma = estimate_sigma(state.residual, record.df, path.rows);
      record.inference = step_inference(state.phi_hat, state.step, *accumulator, sigma, path.layout);
    }
    path.records.push_back(std::move(record));
  }
  path.final_state = std::move(state);
  return path;
}

BoostPath run_path(const TimeSeriesMatrix& y, int p, const BoostConfig& config, bool demean) {
  if (config.variant == Variant::kCrossSection) {
    throw Error(ErrorCode::kInvalidArgument,
                "invalid argument: cross-section variant needs boost_ls_cross_section");
  }
  const LaggedDesign lagged = build_lagged_design(y, p, demean);
  const GroupedDesign grouped = regroup_by_variable(lagged);
  BoostPath path = run_path(grouped, lagged.response, config);
  path.lag_order = p;
  path.column_means = lagged.column_means;
  path.names = y.names();
  path.equation_names = y.names();
  return path;
}

BoostPath boost_ls_cross_section(const MatrixXd& design, const VectorXd& response,
                                 BoostConfig config) {
  config.variant = Variant::kCrossSection;
  const GroupedDesign grouped = GroupedDesign::single_columns(design);
  BoostPath path = run_path(grouped, response, config);
  path.lag_order = 0;
  return path;
}

StepInference step_inference(const BoostState& state, const InferenceAccumulator& accumulator,
                             const SigmaEstimate& sigma, const BlockLayout& layout) {
  return step_inference(state.phi_hat, state.step, accumulator, sigma, layout);
}

}  // namespace boostvar
