#pragma once

#include <random>

#include <Eigen/Dense>

#include "trimlab/ensemble.hpp"
#include "trimlab/operators.hpp"

namespace testing {

inline Eigen::MatrixXd random_symmetric(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) A(i, j) = A(j, i) = u(rng);
  return A;
}

inline trimlab::Region box2(int lo0, int lo1, int hi0, int hi1) {
  return trimlab::Region(trimlab::make_box(2, {lo0, lo1}, {hi0, hi1}));
}

inline trimlab::Region chain(int lo, int hi) { return trimlab::Region(trimlab::make_box(1, {lo}, {hi})); }

/// Zeroes the entries of V at sites outside Gamma.
inline std::vector<double> on_gamma(std::vector<double> V, const trimlab::Region& region,
                                    const trimlab::SublatticeMask& gamma) {
  for (std::size_t i = 0; i < region.size(); ++i)
    if (!gamma.contains(region.site(i))) V[i] = 0.0;
  return V;
}

inline trimlab::EnsembleSpec ensemble(trimlab::Region region, trimlab::SublatticeMask gamma, double g,
                                      std::size_t samples, std::uint64_t seed = 1) {
  trimlab::EnsembleSpec e;
  e.region = std::move(region);
  e.gamma = std::move(gamma);
  e.g = g;
  e.samples = samples;
  e.seed = seed;
  e.disorder = trimlab::DisorderSpec::uniform(0.0, 1.0);
  return e;
}

}  // namespace testing
