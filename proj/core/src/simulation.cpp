#include "boostvar/simulation.hpp"

#include "boostvar/error.hpp"
#include "boostvar/parallel.hpp"
#include "boostvar/selection.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace boostvar {

namespace {

constexpr int kP = DgpConfig::kLagOrder;

CompanionMatrix companion_of(const MatrixXd& phi1, const MatrixXd& phi2) {
  const std::array<MatrixXd, 2> lags{phi1, phi2};
  return companion(lags);
}

Metrics& operator+=(Metrics& a, const Metrics& b) {
  a.mse += b.mse;
  a.mspe += b.mspe;
  a.fpr += b.fpr;
  a.fnr += b.fnr;
  a.f_score += b.f_score;
  a.model_size += b.model_size;
  a.chosen_step += b.chosen_step;
  return a;
}

Metrics scaled(Metrics m, double f) {
  m.mse *= f;
  m.mspe *= f;
  m.fpr *= f;
  m.fnr *= f;
  m.f_score *= f;
  m.model_size *= f;
  m.chosen_step *= f;
  return m;
}

bool same_path(const MethodSpec& a, const MethodSpec& b) {
  return a.variant == b.variant && a.nu == b.nu && a.k_stop == b.k_stop && a.demean == b.demean;
}

}  // namespace

void DgpConfig::validate() const {
  if (d < 1 || s < 0 || s > d) throw Error(ErrorCode::kInvalidArgument, "invalid argument: need 0 <= s <= d, d >= 1");
  if (!(rho >= 0.0 && rho < 1.0)) throw Error(ErrorCode::kInvalidArgument, "invalid argument: rho must be in [0, 1)");
  if (!(snr > 0.0)) throw Error(ErrorCode::kInvalidArgument, "invalid argument: snr must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid argument: shrink must be in (0, 1)");
  }
  if (T <= kP || validation < 1 || test < 1 || burn_in < 0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid argument: segment lengths too small");
  }
}

CoefficientTensor GroundTruth::to_tensor() const {
  const std::array<MatrixXd, 2> lags{phi1, phi2};
  return CoefficientTensor::from_lag_matrices(lags);
}

std::vector<CoefficientTensor::Entry> GroundTruth::support() const { return to_tensor().support(); }

std::pair<MatrixXd, MatrixXd> gen_coefficients(Index d, Index s, Rng& rng) {
  if (s < 0 || s > d) throw Error(ErrorCode::kInvalidArgument, "invalid argument: need 0 <= s <= d");
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  std::vector<Index> all(static_cast<std::size_t>(d));
  std::iota(all.begin(), all.end(), Index{0});

  auto draw = [&] {
    MatrixXd phi = MatrixXd::Zero(d, d);
    std::vector<Index> cols;
    std::sample(all.begin(), all.end(), std::back_inserter(cols), s, rng);
    for (Index c : cols) {
      for (Index r = 0; r < d; ++r) phi(r, c) = unif(rng);
    }
    return phi;
  };
  MatrixXd phi1 = draw();
  MatrixXd phi2 = draw();
  return {std::move(phi1), std::move(phi2)};
}

Stabilized enforce_stationarity(MatrixXd phi1, MatrixXd phi2, double shrink) {
  if (!(shrink > 0.0 && shrink < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid argument: shrink must be in (0, 1)");
  }
  Stabilized out;
  out.F = companion_of(phi1, phi2);
  while (spectral_radius(out.F.F) >= 1.0) {
    phi1 *= shrink;
    phi2 *= shrink;
    out.F = companion_of(phi1, phi2);
    ++out.shrink_count;
  }
  out.phi1 = std::move(phi1);
  out.phi2 = std::move(phi2);
  return out;
}

MatrixXd toeplitz_cov(Index d, double rho) {
  MatrixXd out(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) out(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
  }
  return out;
}

SnrCalibration calibrate_snr(const MatrixXd& F, const MatrixXd& omega_tilde, double snr) {
  if (!(snr > 0.0)) throw Error(ErrorCode::kInvalidArgument, "invalid argument: snr must be positive");
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(omega_tilde, Eigen::EigenvaluesOnly);
  const double lmax = eig.eigenvalues().maxCoeff();
  if (eig.info() != Eigen::Success || !(lmax > 0.0)) {
    throw Error(ErrorCode::kInvalidCovariance, "invalid covariance: noise shape has no positive eigenvalue");
  }
  SnrCalibration out;
  const double radius = spectral_radius(F);
  out.degenerate = radius == 0.0;
  out.sigma2 = radius / (snr * lmax);
  return out;
}

TimeSeriesMatrix simulate_var(const GroundTruth& truth, Index T, Index burn_in, Rng& rng) {
  const Index d = truth.dim();
  if (T < 1 || burn_in < 0) throw Error(ErrorCode::kInvalidArgument, "invalid argument: T >= 1, burn_in >= 0");
  const MatrixXd& omega = truth.omega;
  if (omega.rows() != d || omega.cols() != d || !omega.isApprox(omega.transpose(), 1e-12)) {
    throw Error(ErrorCode::kInvalidCovariance, "invalid covariance: not a symmetric d x d matrix");
  }
  // Omega = P' L D L' P, so u = P' L sqrt(D) z has covariance Omega.
  Eigen::LDLT<MatrixXd> ldlt(omega);
  const double scale = std::max(omega.cwiseAbs().maxCoeff(), 1.0);
  if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() < -1e-12 * scale).any()) {
    throw Error(ErrorCode::kInvalidCovariance, "invalid covariance: not positive semidefinite");
  }
  const MatrixXd lower = ldlt.matrixL();
  const VectorXd root_d = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt();
  const MatrixXd factor = ldlt.transpositionsP().transpose() * (lower * root_d.asDiagonal());

  const bool has_constant = truth.intercept.size() == d;
  std::normal_distribution<double> normal;
  VectorXd prev1 = VectorXd::Zero(d);
  VectorXd prev2 = VectorXd::Zero(d);
  VectorXd z(d);
  MatrixXd out(T, d);
  for (Index t = 0; t < burn_in + T; ++t) {
    for (Index i = 0; i < d; ++i) z(i) = normal(rng);
    VectorXd y = truth.phi1 * prev1 + truth.phi2 * prev2 + factor * z;
    if (has_constant) y += truth.intercept;
    if (t >= burn_in) out.row(t - burn_in) = y.transpose();
    prev2 = std::move(prev1);
    prev1 = std::move(y);
  }
  return TimeSeriesMatrix(std::move(out));
}

GroundTruth draw_truth(const DgpConfig& config, Rng& rng) {
  config.validate();
  auto [raw1, raw2] = gen_coefficients(config.d, config.s, rng);
  Stabilized st = enforce_stationarity(std::move(raw1), std::move(raw2), config.shrink);
  GroundTruth truth;
  truth.phi1 = std::move(st.phi1);
  truth.phi2 = std::move(st.phi2);
  truth.F = std::move(st.F);
  const MatrixXd shape = toeplitz_cov(config.d, config.rho);
  const SnrCalibration snr = calibrate_snr(truth.F.F, shape, config.snr);
  // A zero truth has nothing to calibrate against; fall back to unit noise scale.
  truth.omega = (snr.degenerate ? 1.0 : snr.sigma2) * shape;
  return truth;
}

GroundTruth bivariate_truth() {
  GroundTruth truth;
  truth.phi1.resize(2, 2);
  truth.phi1 << 0.5, 0.1, 0.4, 0.5;
  truth.phi2.resize(2, 2);
  truth.phi2 << 0.0, 0.0, 0.25, 0.0;
  truth.omega = Eigen::Vector2d(0.09, 0.04).asDiagonal();
  truth.intercept = Eigen::Vector2d(0.02, 0.03);
  truth.F = companion_of(truth.phi1, truth.phi2);
  return truth;
}

Metrics score(const CoefficientTensor& phi_hat, const GroundTruth& truth,
              const TimeSeriesMatrix& test) {
  const CoefficientTensor phi = truth.to_tensor();
  if (phi_hat.phi.rows() != phi.phi.rows() || phi_hat.phi.cols() != phi.phi.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "shape mismatch: estimate vs truth");
  }
  const Index d = truth.dim();
  const MatrixXd diff = phi_hat.phi - phi.phi;

  Metrics m;
  m.mse = diff.squaredNorm() / static_cast<double>(kP * d * d);

  const LaggedDesign lagged = build_lagged_design(test, kP, false);
  const GroupedDesign grouped = regroup_by_variable(lagged);
  m.mspe = (grouped.design * diff).squaredNorm() /
           static_cast<double>(lagged.response.rows() * d);

  double tp = 0, fp = 0, tn = 0, fn = 0;
  for (Index r = 0; r < phi.phi.rows(); ++r) {
    for (Index c = 0; c < phi.phi.cols(); ++c) {
      const bool est = phi_hat.phi(r, c) != 0.0;
      const bool real = phi.phi(r, c) != 0.0;
      if (est && real) tp += 1;
      else if (est) fp += 1;
      else if (real) fn += 1;
      else tn += 1;
    }
  }
  m.fpr = fp + tn > 0 ? fp / (fp + tn) : 0.0;
  m.fnr = tp + fn > 0 ? fn / (tp + fn) : 0.0;
  m.f_score = 2 * tp + fp + fn > 0 ? 2 * tp / (2 * tp + fp + fn) : 1.0;
  m.model_size = tp + fp;
  return m;
}

std::vector<MethodSpec> default_methods(double nu, int k_stop) {
  return {
      {"LS-Boost1", Variant::kGroup, nu, k_stop, std::nullopt, false},
      {"LS-Boost2", Variant::kSingleLag, nu, k_stop, std::nullopt, false},
      {"LS-Boost1p", Variant::kGroup, nu, k_stop, 0.05, false},
      {"LS-Boost2p", Variant::kSingleLag, nu, k_stop, 0.05, false},
  };
}

SimulatedSample simulate_sample(const GroundTruth& truth, const DgpConfig& config, Rng& rng) {
  const Index total = config.T + config.validation + config.test;
  const TimeSeriesMatrix y = simulate_var(truth, total, config.burn_in, rng);
  const Index val_end = config.T + config.validation;
  return {y.slice_rows(0, config.T), y.slice_rows(config.T - kP, config.validation + kP),
          y.slice_rows(val_end - kP, config.test + kP)};
}

ReplicationReport run_replications(const DgpConfig& config, const std::vector<MethodSpec>& methods,
                                   int replications, std::size_t threads,
                                   const GroundTruth* fixed_truth) {
  config.validate();
  if (replications < 1) throw Error(ErrorCode::kInvalidArgument, "invalid argument: need at least one replication");
  if (methods.empty()) throw Error(ErrorCode::kInvalidArgument, "invalid argument: no methods");

  const std::size_t R = static_cast<std::size_t>(replications);
  ReplicationReport report;
  for (const MethodSpec& m : methods) report.methods.push_back(m.name);
  report.replications.assign(methods.size(), std::vector<Metrics>(R));
  report.seeds.resize(R);
  for (std::size_t r = 0; r < R; ++r) report.seeds[r] = config.seed + r;

  parallel_for(
      R,
      [&](std::size_t r) {
        const std::uint64_t seed = report.seeds[r];
        try {
          Rng rng(seed);
          const GroundTruth truth = fixed_truth ? *fixed_truth : draw_truth(config, rng);
          const SimulatedSample sample = simulate_sample(truth, config, rng);

          std::vector<std::optional<BoostPath>> paths(methods.size());
          for (std::size_t m = 0; m < methods.size(); ++m) {
            const MethodSpec& spec = methods[m];
            const BoostPath* path = nullptr;
            for (std::size_t q = 0; q < m && path == nullptr; ++q) {
              if (paths[q] && same_path(methods[q], spec) &&
                  (paths[q]->config.compute_inference || !spec.alpha)) {
                path = &*paths[q];
              }
            }
            if (path == nullptr) {
              BoostConfig cfg;
              cfg.variant = spec.variant;
              cfg.nu = spec.nu;
              cfg.k_stop = spec.k_stop;
              // Inference is computed when any method sharing this path needs it.
              cfg.compute_inference = false;
              for (const MethodSpec& other : methods) {
                if (same_path(other, spec) && other.alpha) cfg.compute_inference = true;
              }
              paths[m] = run_path(sample.train, kP, cfg, spec.demean);
              path = &*paths[m];
            }
            const SelectionResult sel = spec.alpha
                                            ? select_p_variant(*path, sample.validation, *spec.alpha)
                                            : select_by_validation(*path, sample.validation);
            Metrics metrics = score(sel.coefficients, truth, sample.test);
            metrics.chosen_step = sel.chosen_step;
            report.replications[m][r] = metrics;
          }
        } catch (const std::exception& e) {
          throw Error(ErrorCode::kReplicationFailed, "replication " + std::to_string(r) +
                                                         " (seed " + std::to_string(seed) +
                                                         ") failed: " + e.what());
        }
      },
      threads);

  const double inv = 1.0 / static_cast<double>(R);
  for (const std::vector<Metrics>& per : report.replications) {
    Metrics total;
    for (const Metrics& m : per) total += m;
    report.mean.push_back(scaled(total, inv));
  }
  return report;
}

}  // namespace boostvar
