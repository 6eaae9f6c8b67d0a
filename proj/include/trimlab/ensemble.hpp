#pragma once

#include <cstdint>
#include <utility>

#include "trimlab/disorder.hpp"
#include "trimlab/errors.hpp"
#include "trimlab/operators.hpp"

namespace trimlab {

/// The random family H(g)|_B: region, trimming set, background, coupling, distribution, seed.
struct EnsembleSpec {
  Region region;
  SublatticeMask gamma;
  V0Spec v0;
  double g = 1.0;
  DisorderSpec disorder;
  std::uint64_t seed = 0;
  std::size_t samples = 100;
  std::size_t dense_limit = kDefaultDenseLimit;
};

/// Realization number `sample`; `attempt` > 0 redraws the potential after a rejected draw.
HamiltonianMatrix realize(const EnsembleSpec& ens, std::uint64_t sample, std::uint64_t attempt = 0);

/// Resampling budget: at most 1% of the samples (and at least one) may be redrawn.
std::size_t resample_cap(std::size_t samples);

/// Runs f(attempt) until it does not throw SpectralParameterOnSpectrum. Returns the value and
/// the number of redraws. Gives up after `max_attempts`.
template <class F>
auto with_resampling(F&& f, std::size_t max_attempts = 16) -> std::pair<decltype(f(std::uint64_t{})), std::size_t> {
  for (std::uint64_t attempt = 0;; ++attempt) {
    try {
      return {f(attempt), static_cast<std::size_t>(attempt)};
    } catch (const SpectralParameterOnSpectrum&) {
      if (attempt + 1 >= max_attempts) throw;
    }
  }
}

/// Throws NumericError when the total number of redraws exceeds the cap.
void check_resampling(std::size_t redraws, std::size_t samples);

}  // namespace trimlab
