// Randomized invariants. Each property draws `kCases` instances from a seeded generator,
// so a failure reports the case seed and can be replayed.

#include "support.hpp"

#include <boostvar/convergence.hpp>
#include <boostvar/error.hpp>
#include <boostvar/io.hpp>
#include <boostvar/selection.hpp>
#include <boostvar/simulation.hpp>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

using namespace boostvar;
using boostvar::testing::gaussian;
using boostvar::testing::max_abs;

namespace {

constexpr int kCases = 25;

struct Gen {
  Rng rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  MatrixXd matrix(Index r, Index c) { return gaussian(r, c, rng); }
  std::uint64_t seed() { return rng(); }
};

// A random stable VAR sample with a few nonzero columns.
struct VarCase {
  TimeSeriesMatrix y;
  int p;
};

VarCase var_case(Gen& g) {
  DgpConfig c;
  c.d = g.integer(2, 5);
  c.s = g.integer(1, static_cast<int>(c.d));
  c.T = g.integer(40, 120);
  c.snr = g.uniform(0.5, 3.0);
  Rng rng(g.seed());
  auto truth = draw_truth(c, rng);
  return {simulate_var(truth, c.T, 50, rng), g.integer(1, 3)};
}

BoostConfig config(Variant v, double nu, int k, bool inference) {
  BoostConfig c;
  c.variant = v;
  c.nu = nu;
  c.k_stop = k;
  c.compute_inference = inference;
  return c;
}

Variant any_variant(Gen& g) { return g.integer(0, 1) ? Variant::kGroup : Variant::kSingleLag; }

}  // namespace

TEST(Properties, LagAlignmentOnNoiselessVar) {
  Gen g(1);
  for (int c = 0; c < kCases; ++c) {
    const int d = g.integer(1, 4), p = g.integer(1, 3);
    std::vector<MatrixXd> phis;
    for (int s = 0; s < p; ++s) phis.push_back(0.3 / p * g.matrix(d, d));
    MatrixXd y = MatrixXd::Zero(30, d);
    y.topRows(p) = g.matrix(p, d);
    for (Index t = p; t < 30; ++t)
      for (int s = 1; s <= p; ++s) y.row(t) += (phis[static_cast<std::size_t>(s - 1)] * y.row(t - s).transpose()).transpose();
    auto x = build_lagged_design(TimeSeriesMatrix(y), p, false);
    auto tensor = CoefficientTensor::from_lag_matrices(phis);
    auto gd = regroup_by_variable(x);
    ASSERT_LT(max_abs(gd.design * tensor.phi - x.response), 1e-10) << "case " << c;
  }
}

TEST(Properties, RegroupIsPermutation) {
  Gen g(2);
  for (int c = 0; c < kCases; ++c) {
    const int d = g.integer(1, 5), p = g.integer(1, 4);
    auto x = build_lagged_design(TimeSeriesMatrix(g.matrix(p + 10, d)), p, g.integer(0, 1));
    auto gd = regroup_by_variable(x);
    std::vector<Index> perm = gd.permutation;
    std::sort(perm.begin(), perm.end());
    for (Index i = 0; i < static_cast<Index>(perm.size()); ++i) ASSERT_EQ(perm[static_cast<std::size_t>(i)], i);
    for (Index col = 0; col < gd.cols(); ++col)
      ASSERT_EQ(gd.design.col(col), x.design.col(gd.permutation[static_cast<std::size_t>(col)]));
  }
}

TEST(Properties, LeastSquaresResidualOrthogonal) {
  Gen g(3);
  for (int c = 0; c < kCases; ++c) {
    const Index n = g.integer(10, 60), q = g.integer(1, 8), m = g.integer(1, 3);
    if (q > n) continue;
    MatrixXd x = g.matrix(n, q), y = g.matrix(n, m);
    auto fit = least_squares_fit(x, y);
    ASSERT_LT(max_abs(x.transpose() * (y - x * fit.coefficients)), 1e-8) << "case " << c;
  }
}

TEST(Properties, SingleLagRadiusScales) {
  Gen g(4);
  for (int c = 0; c < kCases; ++c) {
    const Index d = g.integer(1, 5);
    MatrixXd phi = g.matrix(d, d);
    const double k = g.uniform(0.0, 3.0);
    ASSERT_NEAR(spectral_radius(k * phi), k * spectral_radius(phi), 1e-9 * (1 + k * spectral_radius(phi)));
  }
}

TEST(Properties, PathInvariants) {
  Gen g(5);
  for (int c = 0; c < kCases; ++c) {
    auto vc = var_case(g);
    const Variant v = any_variant(g);
    auto cfg = config(v, g.uniform(0.05, 1.0), g.integer(5, 60), true);
    auto path = run_path(vc.y, vc.p, cfg, true);
    auto again = run_path(vc.y, vc.p, cfg, true);
    auto x = build_lagged_design(vc.y, vc.p, true);
    auto gd = regroup_by_variable(x);
    DesignCache cache(gd, v);

    double prev_sse = x.response.squaredNorm();
    double prev_df = 0.0;
    std::set<int> seen;
    CoefficientTensor phi = path.coefficients_at(0);
    for (int k = 1; k <= path.length(); ++k) {
      const auto& rec = path.records[static_cast<std::size_t>(k - 1)];
      // Determinism.
      ASSERT_EQ(rec.selected, again.records[static_cast<std::size_t>(k - 1)].selected);
      ASSERT_EQ(rec.sse, again.records[static_cast<std::size_t>(k - 1)].sse);
      // Monotone loss; degrees of freedom grow and stay below the design rank.
      ASSERT_LE(rec.sse, prev_sse + 1e-12 * prev_sse) << "case " << c << " step " << k;
      // trace(B) changes by nu * trace(H M); M is not symmetric once several blocks have been
      // selected, so near convergence that trace can turn negative for rates close to 1.
      if (cfg.nu <= 0.3) ASSERT_GE(rec.df, prev_df - 1e-9) << "case " << c << " step " << k;
      ASSERT_LE(rec.df, std::min<double>(static_cast<double>(gd.rows()), static_cast<double>(gd.cols())) + 1e-9);
      // Greedy optimality against an exhaustive scan of the residual before the step.
      MatrixXd before = x.response - gd.design * phi.phi;
      auto fitted_sse = [&](int b) {
        const auto& blk = cache.block(b);
        MatrixXd xb = gd.design.middleCols(blk.first_column, blk.width);
        MatrixXd beta = (xb.transpose() * xb).ldlt().solve(xb.transpose() * before);
        return (before - xb * beta).squaredNorm();
      };
      const double chosen = fitted_sse(rec.block);
      for (int b = 0; b < cache.size(); ++b) {
        if (!cache.block(b).usable) continue;
        ASSERT_GE(fitted_sse(b), chosen - 1e-9 * before.squaredNorm()) << "case " << c << " step " << k;
      }
      seen.insert(rec.block);
      phi = path.coefficients_at(k);
      // Support consistency.
      for (const auto& e : phi.support()) {
        const Index row = CoefficientTensor::row_of(e.variable, e.lag, phi.group_size);
        ASSERT_TRUE(seen.count(path.layout.block_of(row))) << "case " << c;
      }
      prev_sse = rec.sse;
      prev_df = rec.df;
    }
    ASSERT_LT(max_abs(path.final_state.residual - (x.response - gd.design * phi.phi)), 1e-8);
  }
}

TEST(Properties, AccumulatorMatchesEngine) {
  Gen g(6);
  for (int c = 0; c < kCases; ++c) {
    auto vc = var_case(g);
    const Variant v = any_variant(g);
    const double nu = g.uniform(0.05, 1.0);
    const int k = g.integer(1, 40);
    auto x = build_lagged_design(vc.y, vc.p, true);
    auto gd = regroup_by_variable(x);
    DesignCache cache(gd, v);
    auto cfg = config(v, nu, k, false);
    InferenceAccumulator acc(gd.rows());
    auto state = BoostState::initial(gd, x.response);
    for (int step = 0; step < k; ++step) {
      auto sel = select_block(state.residual, gd, cache);
      const auto& b = cache.block(sel.block);
      acc.apply(sel.block, gd.design.middleCols(b.first_column, b.width), b.hat_map, nu);
      state = boost_step(state, gd, cache, cfg);
      ASSERT_LT(max_abs(acc.annihilator() * x.response - state.residual), 1e-8);
      for (const auto& [block, map] : acc.maps()) {
        const Index first = cache.block(block).first_column;
        ASSERT_LT(max_abs(map * x.response - state.phi_hat.phi.middleRows(first, map.rows())), 1e-8)
            << "case " << c << " step " << step + 1;
      }
    }
  }
}

TEST(Properties, PValueSymmetricAndDecreasing) {
  Gen g(7);
  for (int c = 0; c < 200; ++c) {
    const double a = g.uniform(0.0, 8.0), b = g.uniform(0.0, 8.0);
    ASSERT_EQ(p_value(a), p_value(-a));
    if (a < b) ASSERT_GT(p_value(a), p_value(b));
    ASSERT_GE(p_value(a), 0.0);
    ASSERT_LE(p_value(a), 1.0);
  }
}

TEST(Properties, FilterShrinksSupportMonotonically) {
  Gen g(8);
  for (int c = 0; c < kCases; ++c) {
    auto vc = var_case(g);
    auto path = run_path(vc.y, vc.p, config(any_variant(g), 0.2, g.integer(5, 60), true), true);
    const int k = g.integer(1, path.length());
    const auto& inf = *path.records[static_cast<std::size_t>(k - 1)].inference;
    auto phi = path.coefficients_at(k);
    double a1 = g.uniform(0.0, 1.0), a2 = g.uniform(0.0, 1.0);
    if (a1 > a2) std::swap(a1, a2);
    auto f1 = filter_by_pvalue(inf, phi, a1), f2 = filter_by_pvalue(inf, phi, a2);
    ASSERT_LE(f2.nonzeros(), phi.nonzeros());
    for (const auto& e : f1.support()) {
      const Index row = CoefficientTensor::row_of(e.variable, e.lag, phi.group_size);
      ASSERT_NE(f2.phi(row, e.equation), 0.0);
      ASSERT_EQ(phi.phi(row, e.equation), e.value);
    }
    auto bonf = filter_by_pvalue(inf, phi, a2, true);
    ASSERT_LE(bonf.nonzeros(), f2.nonzeros());
  }
}

TEST(Properties, AiccArgminInvariantToSseScale) {
  Gen g(9);
  for (int c = 0; c < kCases; ++c) {
    auto vc = var_case(g);
    auto path = run_path(vc.y, vc.p, config(any_variant(g), 0.1, g.integer(5, 80), true), true);
    int chosen = 0;
    try {
      chosen = aicc(path).chosen_step;
    } catch (const Error&) {
      continue;
    }
    const double scale = std::exp(g.uniform(-5.0, 5.0));
    for (auto& r : path.records) r.sse *= scale;
    ASSERT_EQ(aicc(path).chosen_step, chosen) << "case " << c;
  }
}

TEST(Properties, ValidationArgminInvariantToDataScale) {
  // Scaling all data by s leaves every coefficient unchanged and multiplies MSPE by s^2.
  Gen g(10);
  for (int c = 0; c < kCases; ++c) {
    auto vc = var_case(g);
    const Index n = vc.y.rows();
    const Index train = n / 2;
    auto cfg = config(any_variant(g), 0.1, g.integer(5, 60), false);
    const double s = std::exp(g.uniform(-2.0, 2.0));
    TimeSeriesMatrix scaled(s * vc.y.values());
    auto a = select_by_validation(run_path(vc.y.slice_rows(0, train), vc.p, cfg, true),
                                  vc.y.slice_rows(train - vc.p, n - train + vc.p));
    auto b = select_by_validation(run_path(scaled.slice_rows(0, train), vc.p, cfg, true),
                                  scaled.slice_rows(train - vc.p, n - train + vc.p));
    for (std::size_t k = 0; k < a.criterion.size(); ++k)
      ASSERT_NEAR(b.criterion[k], s * s * a.criterion[k], 1e-9 * s * s * a.criterion[k]);
    ASSERT_EQ(a.chosen_step, b.chosen_step) << "case " << c;
  }
}

TEST(Properties, TruthIsStationaryWithSupportPreserved) {
  Gen g(11);
  for (int c = 0; c < kCases; ++c) {
    const Index d = g.integer(1, 12);
    const Index s = g.integer(0, static_cast<int>(d));
    Rng rng(g.seed());
    auto [p1, p2] = gen_coefficients(d, s, rng);
    const double inflate = g.uniform(1.0, 6.0);
    auto st = enforce_stationarity(inflate * p1, inflate * p2);
    ASSERT_LT(spectral_radius(st.F.F), 1.0);
    ASSERT_EQ((st.phi1.array() != 0.0).matrix(), (p1.array() != 0.0).matrix());
    ASSERT_EQ((st.phi2.array() != 0.0).matrix(), (p2.array() != 0.0).matrix());
  }
}

TEST(Properties, SnrRoundTrip) {
  Gen g(12);
  for (int c = 0; c < kCases; ++c) {
    DgpConfig cfg;
    cfg.d = g.integer(2, 15);
    cfg.s = g.integer(1, static_cast<int>(cfg.d));
    cfg.rho = g.uniform(0.0, 0.9);
    cfg.snr = g.uniform(0.2, 5.0);
    Rng rng(g.seed());
    auto t = draw_truth(cfg, rng);
    const double lmax = Eigen::SelfAdjointEigenSolver<MatrixXd>(t.omega).eigenvalues().maxCoeff();
    ASSERT_NEAR(spectral_radius(t.F.F) / lmax, cfg.snr, 1e-10 * cfg.snr);
  }
}

TEST(Properties, MetricIdentities) {
  Gen g(13);
  for (int c = 0; c < kCases; ++c) {
    DgpConfig cfg;
    cfg.d = g.integer(2, 8);
    cfg.s = g.integer(0, static_cast<int>(cfg.d));
    Rng rng(g.seed());
    auto truth = draw_truth(cfg, rng);
    auto test = simulate_var(truth, 40, 20, rng);
    // Random estimate: each entry independently nonzero.
    auto est = truth.to_tensor();
    for (Index i = 0; i < est.phi.size(); ++i)
      est.phi.data()[i] = g.integer(0, 2) == 0 ? 0.0 : g.uniform(-1.0, 1.0);
    auto m = score(est, truth, test);
    const auto tp_true = truth.to_tensor();
    double tp = 0, fp = 0, tn = 0, fn = 0;
    for (Index i = 0; i < est.phi.size(); ++i) {
      const bool e = est.phi.data()[i] != 0.0, t = tp_true.phi.data()[i] != 0.0;
      tp += e && t, fp += e && !t, tn += !e && !t, fn += !e && t;
    }
    const double specificity = fp + tn > 0 ? tn / (fp + tn) : 1.0;
    ASSERT_NEAR(m.fpr + specificity, 1.0, 1e-15);
    const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    if (precision + recall > 0) ASSERT_NEAR(m.f_score, 2 * precision * recall / (precision + recall), 1e-14);
    ASSERT_GE(m.fpr, 0.0);
    ASSERT_LE(m.fnr, 1.0);
    ASSERT_GE(m.mse, 0.0);
    ASSERT_EQ(m.model_size, tp + fp);
  }
}

TEST(Properties, SimulationIsSeedDeterministic) {
  Gen g(14);
  for (int c = 0; c < 5; ++c) {
    DgpConfig cfg;
    cfg.d = g.integer(2, 6);
    cfg.s = 1;
    cfg.T = 50;
    cfg.validation = cfg.test = 30;
    const std::uint64_t seed = g.seed();
    Rng a(seed), b(seed);
    auto ta = draw_truth(cfg, a), tb = draw_truth(cfg, b);
    ASSERT_EQ(ta.phi1, tb.phi1);
    ASSERT_EQ(simulate_sample(ta, cfg, a).test.values(), simulate_sample(tb, cfg, b).test.values());
  }
}

TEST(Properties, NormalizationPreservesPredictions) {
  Gen g(15);
  for (int c = 0; c < kCases; ++c) {
    auto vc = var_case(g);
    auto x = build_lagged_design(vc.y, vc.p, true);
    auto gd = regroup_by_variable(x);
    auto n = normalize_groups(gd);
    if (!n.excluded.empty()) continue;
    CoefficientTensor tilde(g.matrix(gd.cols(), x.response.cols()), gd.group_size, gd.n_groups);
    ASSERT_LT(max_abs(gd.design * n.to_original(tilde).phi - n.design.design * tilde.phi), 1e-10);
  }
}

TEST(Properties, GammaRangeAndMonotonicity) {
  Gen g(16);
  for (int c = 0; c < kCases; ++c) {
    auto vc = var_case(g);
    auto x = build_lagged_design(vc.y, vc.p, true);
    auto n = normalize_groups(regroup_by_variable(x));
    const int d = n.design.n_groups;
    const double nu = g.uniform(0.01, 1.0);
    const double gm = gamma(n.design, nu, d);
    ASSERT_GE(gm, 0.75);
    ASSERT_LT(gm, 1.0);
    ASSERT_LE(gamma(n.design, 1.0, d), gm + 1e-15);
    // Larger lambda gives a smaller rate: scaling the design by s > 1 scales lambda by s^2.
    GroupedDesign scaled = n.design;
    scaled.design *= 1.1;
    ASSERT_LT(gamma(scaled, nu, d), gm);
  }
}

TEST(Properties, PredictionBoundOnNormalizedDesigns) {
  Gen g(17);
  for (int c = 0; c < kCases; ++c) {
    auto vc = var_case(g);
    auto x = build_lagged_design(vc.y, vc.p, true);
    auto n = normalize_groups(regroup_by_variable(x));
    auto path = run_path(n.design, x.response, config(any_variant(g), g.uniform(0.05, 1.0), g.integer(10, 150), false));
    auto report = check_bounds(path, n.design, x.response);
    ASSERT_TRUE(report.prediction_violations.empty()) << "case " << c;
  }
}

TEST(Properties, SplitIsPartition) {
  Gen g(18);
  for (int c = 0; c < kCases; ++c) {
    const double v = g.uniform(0.05, 0.4), t = g.uniform(0.05, 0.4);
    SplitFractions f{1.0 - v - t, v, t};
    const Index rows = g.integer(40, 900);
    const int p = g.integer(0, 3);
    TimeSeriesMatrix y(g.matrix(rows, 2));
    auto s = split(y, f, p);
    ASSERT_EQ(s.counts.train + s.counts.validation + s.counts.test, rows);
    ASSERT_EQ(s.counts.validation, static_cast<Index>(std::floor(rows * v + 1e-9)));
    ASSERT_EQ(s.train.values(), y.values().topRows(s.counts.train));
    ASSERT_EQ(s.test.values(), y.values().bottomRows(s.counts.test));
  }
}

TEST(Properties, CsvValuesRoundTrip) {
  Gen g(19);
  for (int c = 0; c < kCases; ++c) {
    MatrixXd m = g.matrix(g.integer(1, 20), g.integer(1, 4));
    m *= std::exp(g.uniform(-30.0, 30.0));
    std::vector<std::string> names;
    for (Index j = 0; j < m.cols(); ++j) names.push_back("v" + std::to_string(j));
    std::ostringstream out;
    write_panel(TimeSeriesMatrix(m, names), out);
    std::istringstream in(out.str());
    auto back = ingest(parse_panel(in));
    ASSERT_EQ(back.values(), m);
  }
}
