#pragma once

#include "boostvar/boost_engine.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace boostvar {

using Rng = std::mt19937_64;

/// Sparse stationary VAR(2) generator settings.
struct DgpConfig {
  Index T = 200;       // training rows
  Index d = 20;
  Index s = 3;         // nonzero columns per lag matrix
  double rho = 0.5;    // Toeplitz decay of the noise correlation
  double snr = 1.0;
  double shrink = 0.95;
  Index burn_in = 200;
  Index validation = 200;
  Index test = 200;
  std::uint64_t seed = 1;

  static constexpr int kLagOrder = 2;
  void validate() const;
};

struct GroundTruth {
  MatrixXd phi1;
  MatrixXd phi2;
  MatrixXd omega;
  VectorXd intercept;  // empty = no constant
  CompanionMatrix F;

  Index dim() const noexcept { return phi1.rows(); }
  /// Grouped layout (p = 2) matching the fitted tensors.
  CoefficientTensor to_tensor() const;
  /// Nonzero (variable, lag, equation) entries.
  std::vector<CoefficientTensor::Entry> support() const;
};

/// Two d x d lag matrices, each with `s` uniformly chosen columns of U[-0.5, 0.5] draws.
std::pair<MatrixXd, MatrixXd> gen_coefficients(Index d, Index s, Rng& rng);

struct Stabilized {
  MatrixXd phi1;
  MatrixXd phi2;
  CompanionMatrix F;
  int shrink_count = 0;
};

/// Multiplies both matrices by `shrink` until the companion radius drops below 1.
Stabilized enforce_stationarity(MatrixXd phi1, MatrixXd phi2, double shrink = 0.95);

MatrixXd toeplitz_cov(Index d, double rho);

struct SnrCalibration {
  double sigma2 = 0.0;
  /// True when F has zero spectral radius, so no noise scale can reach the target.
  bool degenerate = false;
};

/// sigma^2 = radius(F) / (snr * lambda_max(omega_tilde)).
SnrCalibration calibrate_snr(const MatrixXd& F, const MatrixXd& omega_tilde, double snr);

/// y_t = c + phi1 y_{t-1} + phi2 y_{t-2} + u_t, u_t ~ N(0, omega), from a zero start.
/// The first `burn_in` rows are discarded and T rows returned.
TimeSeriesMatrix simulate_var(const GroundTruth& truth, Index T, Index burn_in, Rng& rng);

/// Random sparse truth per the config (coefficients, stationarity, SNR-calibrated noise).
GroundTruth draw_truth(const DgpConfig& config, Rng& rng);

/// Two-variable VAR(2) with intercept (0.02, 0.03) and diagonal noise (0.09, 0.04).
GroundTruth bivariate_truth();

struct Metrics {
  double mse = 0.0;
  double mspe = 0.0;
  double fpr = 0.0;
  double fnr = 0.0;
  double f_score = 0.0;
  double model_size = 0.0;
  double chosen_step = 0.0;
};

/// Coefficient error, test-set prediction error and support recovery of an estimate.
Metrics score(const CoefficientTensor& phi_hat, const GroundTruth& truth,
              const TimeSeriesMatrix& test);

/// One estimator evaluated in a replication study.
struct MethodSpec {
  std::string name;
  Variant variant = Variant::kGroup;
  double nu = 0.1;
  int k_stop = 500;
  /// When set, coefficients are p-value filtered at this level before validation.
  std::optional<double> alpha;
  bool demean = false;
};

/// LS-Boost1, LS-Boost2 and their p-filtered versions at the given rate and step budget.
std::vector<MethodSpec> default_methods(double nu = 0.1, int k_stop = 500);

/// Contiguous train/validation/test pieces of one simulated path. Validation and test
/// carry `p` presample rows so their lagged designs have exactly the configured length.
struct SimulatedSample {
  TimeSeriesMatrix train;
  TimeSeriesMatrix validation;
  TimeSeriesMatrix test;
};
SimulatedSample simulate_sample(const GroundTruth& truth, const DgpConfig& config, Rng& rng);

struct ReplicationReport {
  std::vector<std::string> methods;
  std::vector<Metrics> mean;                        // per method
  std::vector<std::vector<Metrics>> replications;   // [method][replication]
  std::vector<std::uint64_t> seeds;
};

/// Runs R independent replications (seed = config.seed + r), each with its own truth
/// unless `fixed_truth` is given. Results do not depend on the thread count.
ReplicationReport run_replications(const DgpConfig& config, const std::vector<MethodSpec>& methods,
                                   int replications, std::size_t threads = 0,
                                   const GroundTruth* fixed_truth = nullptr);

}  // namespace boostvar
