#pragma once

#include <boostvar/var_core.hpp>

#include <cstdint>
#include <random>

namespace boostvar::testing {

using Rng = std::mt19937_64;

inline MatrixXd gaussian(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> z;
  MatrixXd m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = z(rng);
  return m;
}

inline MatrixXd gaussian(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  return gaussian(rows, cols, rng);
}

inline double max_abs(const MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace boostvar::testing
